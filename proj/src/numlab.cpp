#include "spinsym/numlab.h"

#include <cmath>
#include <sstream>

namespace spinsym {

namespace {

const cplx I(0, 1);

struct Binder {
  std::vector<cplx> params;
  std::vector<const Realization*> fns;

  Binder(const Tape& tape, const NumericEnv& env) {
    for (const auto& p : tape.params()) {
      auto it = env.params.find(p);
      if (it == env.params.end()) throw std::invalid_argument("no numeric value for parameter '" + p + "'");
      params.emplace_back(it->second);
    }
    for (const auto& [name, arity] : tape.functions()) {
      auto it = env.functions.find(name);
      if (it == env.functions.end()) throw std::invalid_argument("no realization for function '" + name + "'");
      if (it->second->arity() != arity) throw std::invalid_argument("arity mismatch for function '" + name + "'");
      fns.push_back(it->second.get());
    }
  }
};

/// Evaluates roots at every grid node; out[node * roots + k].
std::vector<cplx> sample_roots(const std::vector<Expr>& roots, const Grid& g, const NumericEnv& env, double t) {
  Tape tape(roots);
  Binder b(tape, env);
  std::vector<cplx> out(g.nodes() * roots.size());
  std::vector<cplx> vals;
  std::vector<double> mags;
  std::array<cplx, kNumVars> vars{};
  vars[0] = t;
  for (int i = 0; i < g.n; ++i) {
    vars[1] = g.coord(i);
    for (int j = 0; j < g.n; ++j) {
      vars[2] = g.coord(j);
      for (int k = 0; k < g.n; ++k) {
        vars[3] = g.coord(k);
        tape.run(vars, b.params, b.fns, vals, mags);
        std::copy(vals.begin(), vals.end(), out.begin() + g.node(i, j, k) * roots.size());
      }
    }
  }
  return out;
}

/// (c0 + c.s) applied to (u, d).
inline void pauli_mul(const cplx* c, cplx u, cplx d, cplx& ou, cplx& od) {
  ou = (c[0] + c[3]) * u + (c[1] - I * c[2]) * d;
  od = (c[1] + I * c[2]) * u + (c[0] - c[3]) * d;
}

bool spatially_constant(const Expr& e) {
  return !e.depends_on(Var::T) && !e.depends_on(Var::X1) && !e.depends_on(Var::X2) && !e.depends_on(Var::X3);
}

}  // namespace

GridState GridState::sample(const Grid& g, const Spinor& s, const std::map<std::string, double>& params,
                            const RealizationMap& functions, double t) {
  GridState out(g);
  out.time = t;
  out.psi = sample_roots({s[0], s[1]}, g, NumericEnv{params, functions}, t);
  return out;
}

double GridState::norm2() const {
  double s = 0;
  for (const auto& v : psi) s += std::norm(v);
  return s * std::pow(grid.h(), 3);
}

void GridState::normalize() {
  double n = std::sqrt(norm2());
  if (n == 0) throw std::invalid_argument("cannot normalize a zero state");
  for (auto& v : psi) v /= n;
}

cplx GridState::inner(const GridState& other) const {
  cplx s = 0;
  for (size_t k = 0; k < psi.size(); ++k) s += std::conj(psi[k]) * other.psi[k];
  return s * std::pow(grid.h(), 3);
}

GridOperator::GridOperator(const DiffOp& op, const Grid& grid, const NumericEnv& env, const StencilSpec& stencil,
                           const GridOperator* hamiltonian)
    : grid_(grid), env_(env), stencil_(stencil), hamiltonian_(hamiltonian) {
  if (stencil.accuracy != 2 && stencil.accuracy != 4) throw std::invalid_argument("stencil accuracy must be 2 or 4");
  if (grid.n < 5) throw std::invalid_argument("grid needs at least 5 nodes per axis");
  PauliExpr zeroth, zeroth_reflected;
  for (const auto& [key, c] : op.terms()) {
    int spatial = key.d[1] + key.d[2] + key.d[3];
    if (key.reflected && !grid.symmetric()) throw UnsupportedOperatorError("parity terms require a symmetric grid");
    if (key.d[0] > 1 || (key.d[0] == 1 && spatial > 0)) {
      throw UnsupportedOperatorError("only a single d/dt factor without spatial derivatives is supported");
    }
    if (key.d[0] == 1 && !hamiltonian) throw UnsupportedOperatorError("d/dt term needs a Hamiltonian");
    if (spatial > 2) throw UnsupportedOperatorError("differential order above 2");
    if (spatial == 0 && key.d[0] == 0) {
      (key.reflected ? zeroth_reflected : zeroth) += c;
      continue;
    }
    Term t;
    t.m = key.d;
    t.reflected = key.reflected;
    t.time_derivative = key.d[0] == 1;
    t.field.source = c.c;
    if (spatial == 1 && !key.reflected) {
      t.symmetrized = true;
      int a = key.d[1] ? 1 : key.d[2] ? 2 : 3;
      zeroth += PauliExpr(Expr(Rational(-1, 2))) * c.map([a](const Expr& e) { return differentiate(e, static_cast<Var>(a)); });
    }
    terms_.push_back(std::move(t));
  }
  for (int r = 0; r < 2; ++r) {
    const PauliExpr& z = r ? zeroth_reflected : zeroth;
    if (z.is_zero()) continue;
    Term t;
    t.reflected = r == 1;
    t.field.source = z.c;
    terms_.push_back(std::move(t));
  }
  for (auto& t : terms_) {
    for (const auto& e : t.field.source) {
      if (!spatially_constant(e)) t.field.constant = false;
      if (e.depends_on(Var::T)) time_dependent_ = true;
    }
  }
  evaluate_fields(0);
}

void GridOperator::evaluate_fields(double t) const {
  for (auto& term : terms_) {
    Field& f = term.field;
    bool depends_t = false;
    for (const auto& e : f.source) depends_t = depends_t || e.depends_on(Var::T);
    if (fields_ready_ && !depends_t) continue;
    if (f.constant) {
      EvalEnv env{Point{t, {0, 0, 0}}, env_.params, env_.functions};
      for (int k = 0; k < 4; ++k) f.c[k] = f.source[k].is_zero() ? cplx(0) : evaluate(f.source[k], env);
    } else {
      f.values = sample_roots({f.source.begin(), f.source.end()}, grid_, env_, t);
    }
  }
  fields_time_ = t;
  fields_ready_ = true;
}

void GridOperator::derivative(const std::vector<cplx>& in, std::vector<cplx>& out, int axis, int order) const {
  const int n = grid_.n;
  const double h = grid_.h();
  const size_t stride = 2 * (axis == 1 ? static_cast<size_t>(n) * n : axis == 2 ? static_cast<size_t>(n) : 1);
  const bool periodic = stencil_.boundary == Boundary::Periodic;
  out.assign(in.size(), 0.0);
  // Offsets -2..2 with weights for the chosen stencil.
  std::array<double, 5> w{};
  if (order == 1) {
    w = stencil_.accuracy == 2 ? std::array<double, 5>{0, -0.5, 0, 0.5, 0}
                               : std::array<double, 5>{1.0 / 12, -8.0 / 12, 0, 8.0 / 12, -1.0 / 12};
    for (auto& x : w) x /= h;
  } else {
    w = stencil_.accuracy == 2 ? std::array<double, 5>{0, 1, -2, 1, 0}
                               : std::array<double, 5>{-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    for (auto& x : w) x /= h * h;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        int pos = axis == 1 ? i : axis == 2 ? j : k;
        size_t base = 2 * grid_.node(i, j, k);
        size_t line0 = base - pos * stride;
        cplx su = 0, sd = 0;
        for (int o = -2; o <= 2; ++o) {
          double wt = w[o + 2];
          if (wt == 0) continue;
          int q = pos + o;
          if (q < 0 || q >= n) {
            if (!periodic) continue;
            q = (q + n) % n;
          }
          size_t idx = line0 + q * stride;
          su += wt * in[idx];
          sd += wt * in[idx + 1];
        }
        out[base] = su;
        out[base + 1] = sd;
      }
    }
  }
}

void GridOperator::add_term(const Term& term, const std::vector<cplx>& in, std::vector<cplx>& out, double t) const {
  const size_t nodes = grid_.nodes();
  const int n = grid_.n;
  const std::vector<cplx>* src = &in;
  std::vector<cplx> reflected;
  if (term.reflected) {
    reflected.resize(in.size());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          size_t a = 2 * grid_.node(i, j, k), b = 2 * grid_.node(n - 1 - i, n - 1 - j, n - 1 - k);
          reflected[a] = in[b];
          reflected[a + 1] = in[b + 1];
        }
    src = &reflected;
  }
  auto coeff = [&](size_t node) -> const cplx* {
    return term.field.constant ? term.field.c.data() : term.field.values.data() + 4 * node;
  };
  auto accumulate = [&](const std::vector<cplx>& v, double factor) {
    for (size_t p = 0; p < nodes; ++p) {
      cplx u, d;
      pauli_mul(coeff(p), v[2 * p], v[2 * p + 1], u, d);
      out[2 * p] += factor * u;
      out[2 * p + 1] += factor * d;
    }
  };

  if (term.time_derivative) {
    hamiltonian_->apply(*src, tmp3_, t);
    for (auto& v : tmp3_) v *= -I;
    accumulate(tmp3_, 1.0);
    return;
  }
  std::vector<int> axes;
  for (int a = 1; a <= 3; ++a)
    for (int r = 0; r < term.m[a]; ++r) axes.push_back(a);
  if (axes.empty()) {
    accumulate(*src, 1.0);
    return;
  }
  if (term.symmetrized) {
    // 1/2 B D psi + 1/2 D (B psi)
    derivative(*src, tmp1_, axes[0], 1);
    accumulate(tmp1_, 0.5);
    tmp2_.assign(src->size(), 0.0);
    for (size_t p = 0; p < nodes; ++p) pauli_mul(coeff(p), (*src)[2 * p], (*src)[2 * p + 1], tmp2_[2 * p], tmp2_[2 * p + 1]);
    derivative(tmp2_, tmp1_, axes[0], 1);
    for (size_t k = 0; k < out.size(); ++k) out[k] += 0.5 * tmp1_[k];
    return;
  }
  if (axes.size() == 2 && axes[0] == axes[1]) {
    derivative(*src, tmp1_, axes[0], 2);
  } else if (axes.size() == 2) {
    derivative(*src, tmp2_, axes[1], 1);
    derivative(tmp2_, tmp1_, axes[0], 1);
  } else {
    derivative(*src, tmp1_, axes[0], 1);
  }
  accumulate(tmp1_, 1.0);
}

void GridOperator::apply(const std::vector<cplx>& in, std::vector<cplx>& out, double t) const {
  if (in.size() != 2 * grid_.nodes()) throw std::invalid_argument("state does not match the operator grid");
  if (time_dependent_ && t != fields_time_) evaluate_fields(t);
  out.assign(in.size(), 0.0);
  for (const auto& term : terms_) add_term(term, in, out, t);
}

GridState GridOperator::apply(const GridState& s) const {
  GridState out(s.grid);
  out.time = s.time;
  apply(s.psi, out.psi, s.time);
  return out;
}

GridState discretize_apply(const DiffOp& H, const GridState& s, const NumericEnv& env, const StencilSpec& stencil) {
  GridOperator op(H, s.grid, env, stencil);
  return op.apply(s);
}

namespace {

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += std::conj(a[k]) * b[k];
  return s;
}

double norm(const std::vector<cplx>& a) { return std::sqrt(std::real(dot(a, a))); }

/// Solves (1 + i c H) x = b; x holds the initial guess. Returns iterations.
int bicgstab(const GridOperator& H, double t, cplx c, const std::vector<cplx>& b, std::vector<cplx>& x, double tol,
             int max_iter) {
  std::vector<cplx> hx;
  auto A = [&](const std::vector<cplx>& v, std::vector<cplx>& out) {
    H.apply(v, hx, t);
    out.resize(v.size());
    for (size_t k = 0; k < v.size(); ++k) out[k] = v[k] + I * c * hx[k];
  };
  const size_t n = b.size();
  std::vector<cplx> r(n), ax, rhat, p(n, 0.0), v(n, 0.0), s(n), tv;
  A(x, ax);
  for (size_t k = 0; k < n; ++k) r[k] = b[k] - ax[k];
  rhat = r;
  double bnorm = norm(b);
  if (bnorm == 0) bnorm = 1;
  if (norm(r) <= tol * bnorm) return 0;
  cplx rho = 1, alpha = 1, omega = 1;
  for (int it = 1; it <= max_iter; ++it) {
    cplx rho_new = dot(rhat, r);
    if (std::abs(rho_new) < 1e-300) throw SolverError("BiCGSTAB breakdown");
    cplx beta = (rho_new / rho) * (alpha / omega);
    for (size_t k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    A(p, v);
    alpha = rho_new / dot(rhat, v);
    for (size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
    if (norm(s) <= tol * bnorm) {
      for (size_t k = 0; k < n; ++k) x[k] += alpha * p[k];
      return it;
    }
    A(s, tv);
    omega = dot(tv, s) / dot(tv, tv);
    for (size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k] + omega * s[k];
      r[k] = s[k] - omega * tv[k];
    }
    rho = rho_new;
    if (norm(r) <= tol * bnorm) return it;
  }
  throw SolverError("BiCGSTAB did not converge in " + std::to_string(max_iter) + " iterations");
}

double boundary_fraction(const GridState& s, double layer) {
  const Grid& g = s.grid;
  double edge = 0, total = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        size_t p = 2 * g.node(i, j, k);
        double w = std::norm(s.psi[p]) + std::norm(s.psi[p + 1]);
        total += w;
        bool near = false;
        for (int q : {i, j, k}) near = near || g.coord(q) - g.lo < layer || g.hi - g.coord(q) < layer;
        if (near) edge += w;
      }
  return total > 0 ? edge / total : 0;
}

}  // namespace

double expectation(const GridOperator& Q, const GridState& s) {
  std::vector<cplx> qpsi;
  Q.apply(s.psi, qpsi, s.time);
  return std::real(dot(s.psi, qpsi)) / std::real(dot(s.psi, s.psi));
}

Trajectory evolve(const GridState& s0, const DiffOp& H, const EvolutionSpec& spec, const NumericEnv& env,
                  const std::vector<TrackedOperator>& tracked) {
  if (spec.steps < 0) throw std::invalid_argument("negative step count");
  GridOperator h(H, s0.grid, env, spec.stencil);
  std::vector<std::unique_ptr<GridOperator>> qs;
  Trajectory traj;
  for (const auto& q : tracked) {
    qs.push_back(std::make_unique<GridOperator>(q.op, s0.grid, env, spec.stencil, &h));
    traj.names.push_back(q.name);
  }
  GridState s = s0;
  auto record = [&]() {
    traj.times.push_back(s.time);
    std::vector<double> row;
    for (const auto& q : qs) row.push_back(expectation(*q, s));
    traj.values.push_back(std::move(row));
    traj.norms.push_back(s.norm2());
  };
  record();
  traj.boundary_contact = boundary_fraction(s, spec.boundary_layer) > spec.boundary_threshold;
  std::vector<cplx> hpsi, rhs(s.psi.size()), x;
  const cplx half = 0.5 * spec.dt;
  for (int step = 1; step <= spec.steps; ++step) {
    double tmid = s.time + 0.5 * spec.dt;
    double before = s.norm2();
    h.apply(s.psi, hpsi, tmid);
    x.resize(s.psi.size());
    for (size_t k = 0; k < s.psi.size(); ++k) {
      rhs[k] = s.psi[k] - I * half * hpsi[k];
      x[k] = s.psi[k] - I * cplx(spec.dt) * hpsi[k];
    }
    int iters = bicgstab(h, tmid, half, rhs, x, spec.tol, spec.max_iterations);
    traj.max_iterations_used = std::max(traj.max_iterations_used, iters);
    s.psi.swap(x);
    s.time = s0.time + step * spec.dt;
    traj.max_step_norm_drift = std::max(traj.max_step_norm_drift, std::abs(s.norm2() - before) / before);
    if (boundary_fraction(s, spec.boundary_layer) > spec.boundary_threshold) traj.boundary_contact = true;
    if (step % std::max(1, spec.record_every) == 0 || step == spec.steps) record();
  }
  traj.final_state = s;
  return traj;
}

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "t";
  for (const auto& n : names) os << "," << n;
  os << ",norm\n";
  for (size_t r = 0; r < times.size(); ++r) {
    os << times[r];
    for (double v : values[r]) os << "," << v;
    os << "," << norms[r] << "\n";
  }
  return os.str();
}

nlohmann::json DriftReport::to_json() const {
  return {{"name", name},       {"initial", initial},           {"scale", scale},
          {"max_abs_drift", max_abs_drift}, {"drift", drift}, {"boundary_contact", boundary_contact}};
}

std::vector<DriftReport> drift_reports(const Trajectory& traj, const GridState& s0,
                                       const std::vector<TrackedOperator>& tracked, const NumericEnv& env,
                                       const StencilSpec& stencil) {
  std::vector<DriftReport> out;
  for (size_t q = 0; q < tracked.size(); ++q) {
    DriftReport d;
    d.name = tracked[q].name;
    d.boundary_contact = traj.boundary_contact;
    d.initial = traj.values.at(0).at(q);
    GridOperator g(tracked[q].op, s0.grid, env, stencil);
    std::vector<cplx> qpsi;
    g.apply(s0.psi, qpsi, s0.time);
    d.scale = std::sqrt(std::real(dot(qpsi, qpsi)) / std::real(dot(s0.psi, s0.psi)));
    for (const auto& row : traj.values) d.max_abs_drift = std::max(d.max_abs_drift, std::abs(row[q] - d.initial));
    d.drift = d.scale > 0 ? d.max_abs_drift / d.scale : d.max_abs_drift;
    out.push_back(d);
  }
  return out;
}

DriftReport conservation_drift(const DiffOp& Q, const GridState& s0, const DiffOp& H, const EvolutionSpec& spec,
                               const NumericEnv& env) {
  std::vector<TrackedOperator> tracked{{"Q", Q}};
  Trajectory traj = evolve(s0, H, spec, env, tracked);
  return drift_reports(traj, s0, tracked, env, spec.stencil).at(0);
}

double discretization_error(const DiffOp& op, const Spinor& psi, const Grid& grid, const NumericEnv& env,
                            const StencilSpec& stencil, double margin) {
  GridState s = GridState::sample(grid, psi, env.params, env.functions);
  GridState num = discretize_apply(op, s, env, stencil);
  Spinor exact = apply(op, psi);
  std::vector<cplx> ex = sample_roots({exact[0], exact[1]}, grid, env, 0);
  double err = 0, scale = 0;
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j)
      for (int k = 0; k < grid.n; ++k) {
        bool inside = true;
        for (int q : {i, j, k}) inside = inside && grid.coord(q) - grid.lo >= margin && grid.hi - grid.coord(q) >= margin;
        size_t p = 2 * grid.node(i, j, k);
        for (int c = 0; c < 2; ++c) {
          scale = std::max(scale, std::abs(ex[p + c]));
          if (inside) err = std::max(err, std::abs(ex[p + c] - num.psi[p + c]));
        }
      }
  return scale > 0 ? err / scale : err;
}

nlohmann::json ConvergenceReport::to_json() const {
  return {{"sizes", sizes}, {"spacings", spacings}, {"errors", errors}, {"order", order}};
}

ConvergenceReport convergence_study(const DiffOp& op, const Spinor& psi, const std::vector<int>& sizes, double extent,
                                    const NumericEnv& env, const StencilSpec& stencil) {
  if (sizes.size() < 2) throw std::invalid_argument("convergence study needs at least two grids");
  ConvergenceReport rep;
  for (int n : sizes) {
    Grid g{n, -extent, extent};
    rep.sizes.push_back(n);
    rep.spacings.push_back(g.h());
    rep.errors.push_back(discretization_error(op, psi, g, env, stencil));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(sizes.size());
  for (size_t k = 0; k < sizes.size(); ++k) {
    double x = std::log(rep.spacings[k]), y = std::log(rep.errors[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return rep;
}

}  // namespace spinsym
