#include "spinsym/eval.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

namespace spinsym {

namespace {

cplx int_power(cplx b, int64_t n) {
  if (n < 0) return 1.0 / int_power(b, -n);
  cplx r = 1.0;
  while (n > 0) {
    if (n & 1) r *= b;
    n >>= 1;
    if (n > 0) b *= b;
  }
  return r;
}

cplx eval_pow(cplx b, cplx e, const Node* exp_node) {
  if (exp_node->kind == Kind::Const && exp_node->value.is_real()) {
    const Rational& q = exp_node->value.re;
    if (q.is_integer()) return int_power(b, q.num());
    if (q.den() == 2) return int_power(std::sqrt(b), q.num());
  }
  return std::pow(b, e);
}

cplx eval_fn(Fn f, cplx u) {
  switch (f) {
    case Fn::Exp: return std::exp(u);
    case Fn::Ln: return std::log(u);
    case Fn::Sin: return std::sin(u);
    case Fn::Cos: return std::cos(u);
    case Fn::Atan: return u.imag() == 0 ? cplx(std::atan(u.real()), 0) : std::atan(u);
  }
  return 0;
}

cplx eval_atom(Atom a, const std::array<cplx, kNumVars>& v) {
  double x1 = v[1].real(), x2 = v[2].real(), x3 = v[3].real();
  double rt = std::hypot(x1, x2);
  double r = std::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
  switch (a) {
    case Atom::R: return r;
    case Atom::Rt: return rt;
    case Atom::Phi: return x1 == 0 ? NAN : std::atan(x2 / x1);
    case Atom::Theta: return r == 0 ? NAN : std::acos(x3 / r);
    case Atom::Rho: return rt == 0 ? NAN : std::log(rt);
  }
  return 0;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

PolyGauss::PolyGauss(size_t arity, std::map<Monomial, double> coeffs) : arity_(arity) {
  if (arity < 1 || arity > 4) throw std::invalid_argument("realization arity must be 1..4");
  cache_[std::vector<uint8_t>(arity, 0)] = std::move(coeffs);
}

std::shared_ptr<PolyGauss> PolyGauss::random(size_t arity, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::map<Monomial, double> c;
  Monomial m{};
  // Enumerate exponents with total degree <= 4 in lexicographic order.
  std::function<void(size_t, int)> rec = [&](size_t k, int left) {
    if (k == arity) {
      c[m] = coeff(rng);
      return;
    }
    for (int d = 0; d <= left; ++d) {
      m[k] = static_cast<uint8_t>(d);
      rec(k + 1, left - d);
    }
    m[k] = 0;
  };
  rec(0, 4);
  return std::make_shared<PolyGauss>(arity, std::move(c));
}

const std::map<PolyGauss::Monomial, double>& PolyGauss::derivative(const std::vector<uint8_t>& index) const {
  auto it = cache_.find(index);
  if (it != cache_.end()) return it->second;
  size_t j = 0;
  while (index[j] == 0) ++j;
  std::vector<uint8_t> lower = index;
  lower[j] -= 1;
  const auto& q = derivative(lower);
  std::map<Monomial, double> out;
  for (const auto& [m, c] : q) {
    if (m[j] > 0) {
      Monomial d = m;
      d[j] -= 1;
      out[d] += c * m[j];
    }
    Monomial up = m;
    up[j] += 1;
    out[up] -= c / 4.0;
  }
  return cache_.emplace(index, std::move(out)).first->second;
}

cplx PolyGauss::eval(const std::vector<uint8_t>& index, const cplx* args) const {
  if (index.size() != arity_) throw std::invalid_argument("derivative index does not match arity");
  std::lock_guard<std::mutex> lock(mu_);
  const auto& q = derivative(index);
  cplx sq = 0;
  std::array<std::array<cplx, 24>, 4> powers;
  for (size_t k = 0; k < arity_; ++k) {
    sq += args[k] * args[k];
    powers[k][0] = 1.0;
    for (size_t p = 1; p < powers[k].size(); ++p) powers[k][p] = powers[k][p - 1] * args[k];
  }
  cplx total = 0;
  for (const auto& [m, c] : q) {
    cplx term = c;
    for (size_t k = 0; k < arity_; ++k) {
      term *= m[k] < powers[k].size() ? powers[k][m[k]] : std::pow(args[k], static_cast<double>(m[k]));
    }
    total += term;
  }
  return total * std::exp(-sq / 8.0);
}

ExprRealization::ExprRealization(size_t arity, Expr body, std::map<std::string, double> params)
    : arity_(arity), body_(std::move(body)), params_(std::move(params)) {
  if (arity < 1 || arity > 4) throw std::invalid_argument("realization arity must be 1..4");
  for (int v = 0; v < 4; ++v) {
    if (body_.depends_on(static_cast<Var>(v))) {
      throw std::invalid_argument("realization body must only depend on u1..u4");
    }
  }
}

cplx ExprRealization::eval(const std::vector<uint8_t>& index, const cplx* args) const {
  std::shared_ptr<const Tape> tape;
  std::vector<cplx> pv;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(index);
    if (it == cache_.end()) {
      Expr e = body_;
      for (size_t k = 0; k < index.size(); ++k) {
        for (int j = 0; j < index[k]; ++j) e = differentiate(e, static_cast<Var>(4 + k));
      }
      auto t = std::make_shared<Tape>(std::vector<Expr>{e});
      if (!t->functions().empty()) throw std::invalid_argument("realization body must not contain opaque functions");
      it = cache_.emplace(index, t).first;
    }
    tape = it->second;
  }
  for (const auto& name : tape->params()) {
    auto it = params_.find(name);
    if (it == params_.end()) throw std::invalid_argument("realization parameter '" + name + "' unbound");
    pv.push_back(it->second);
  }
  std::array<cplx, kNumVars> vars{};
  for (size_t k = 0; k < arity_; ++k) vars[4 + k] = args[k];
  std::vector<cplx> out;
  std::vector<double> mags;
  tape->run(vars, pv, {}, out, mags);
  return out[0];
}

Tape::Tape(const std::vector<Expr>& roots) {
  std::unordered_map<const Node*, uint32_t> pos;
  std::map<std::string, int32_t> param_slot;
  std::map<std::string, int32_t> fn_slot;
  for (const Expr& root : roots) {
    std::vector<std::pair<const Node*, bool>> stack{{root.node(), false}};
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (pos.count(n)) continue;
      if (!expanded) {
        stack.push_back({n, true});
        for (auto it = n->kids.rbegin(); it != n->kids.rend(); ++it) {
          if (!pos.count(*it)) stack.push_back({*it, false});
        }
        continue;
      }
      Op op{n->kind, n->tag, -1, n, {}};
      for (const Node* k : n->kids) op.args.push_back(pos.at(k));
      if (n->kind == Kind::Param) {
        auto [it, inserted] = param_slot.emplace(n->name, static_cast<int32_t>(params_.size()));
        if (inserted) params_.push_back(n->name);
        op.slot = it->second;
      }
      if (n->kind == Kind::Opaque) {
        auto [it, inserted] = fn_slot.emplace(n->name, static_cast<int32_t>(functions_.size()));
        if (inserted) functions_.push_back({n->name, n->kids.size()});
        op.slot = it->second;
      }
      pos.emplace(n, static_cast<uint32_t>(ops_.size()));
      ops_.push_back(std::move(op));
    }
    roots_.push_back(pos.at(root.node()));
  }
  // Slots follow name order so callers can sample deterministically.
  std::vector<std::string> sorted_params = params_;
  std::sort(sorted_params.begin(), sorted_params.end());
  auto sorted_fns = functions_;
  std::sort(sorted_fns.begin(), sorted_fns.end());
  std::map<std::string, int32_t> pmap, fmap;
  for (size_t k = 0; k < sorted_params.size(); ++k) pmap[sorted_params[k]] = static_cast<int32_t>(k);
  for (size_t k = 0; k < sorted_fns.size(); ++k) fmap[sorted_fns[k].first] = static_cast<int32_t>(k);
  for (Op& op : ops_) {
    if (op.kind == Kind::Param) op.slot = pmap.at(op.node->name);
    if (op.kind == Kind::Opaque) op.slot = fmap.at(op.node->name);
  }
  params_ = sorted_params;
  functions_ = sorted_fns;
  for (size_t k = 1; k < functions_.size(); ++k) {
    if (functions_[k].first == functions_[k - 1].first) {
      throw std::invalid_argument("opaque function " + functions_[k].first + " used with inconsistent arity");
    }
  }
}

void Tape::run(const std::array<cplx, kNumVars>& vars, const std::vector<cplx>& param_values,
               const std::vector<const Realization*>& fns, std::vector<cplx>& root_values,
               std::vector<double>& root_mags) const {
  std::lock_guard<std::mutex> lock(mu_);
  vals_.assign(ops_.size(), 0);
  mags_.assign(ops_.size(), 0);
  std::vector<cplx> argbuf;
  for (size_t k = 0; k < ops_.size(); ++k) {
    const Op& op = ops_[k];
    cplx v = 0;
    double mag = 0;
    for (uint32_t a : op.args) mag = std::max(mag, mags_[a]);
    switch (op.kind) {
      case Kind::Const: v = op.node->value.to_complex(); break;
      case Kind::Pi: v = M_PI; break;
      case Kind::Param: v = param_values.at(op.slot); break;
      case Kind::Sym: v = vars[op.tag]; break;
      case Kind::Derived: v = eval_atom(static_cast<Atom>(op.tag), vars); break;
      case Kind::Add:
        for (uint32_t a : op.args) v += vals_[a];
        break;
      case Kind::Mul:
        v = 1.0;
        for (uint32_t a : op.args) v *= vals_[a];
        break;
      case Kind::Pow: v = eval_pow(vals_[op.args[0]], vals_[op.args[1]], op.node->kids[1]); break;
      case Kind::Func: v = eval_fn(static_cast<Fn>(op.tag), vals_[op.args[0]]); break;
      case Kind::Opaque: {
        argbuf.clear();
        for (uint32_t a : op.args) argbuf.push_back(vals_[a]);
        const Realization* f = fns.at(op.slot);
        if (!f) throw std::invalid_argument("missing realization for " + op.node->name);
        v = f->eval(op.node->index, argbuf.data());
        break;
      }
    }
    vals_[k] = v;
    double av = std::abs(v);
    mags_[k] = std::isfinite(av) ? std::max(mag, av) : INFINITY;
  }
  root_values.resize(roots_.size());
  root_mags.resize(roots_.size());
  for (size_t k = 0; k < roots_.size(); ++k) {
    root_values[k] = vals_[roots_[k]];
    root_mags[k] = mags_[roots_[k]];
  }
}

cplx evaluate(const Expr& e, const EvalEnv& env) {
  Tape tape({e});
  std::vector<cplx> pv;
  for (const auto& name : tape.params()) {
    auto it = env.params.find(name);
    if (it == env.params.end()) throw std::invalid_argument("parameter '" + name + "' unbound");
    pv.push_back(it->second);
  }
  std::vector<const Realization*> fns;
  for (const auto& [name, arity] : tape.functions()) {
    auto it = env.functions.find(name);
    if (it == env.functions.end()) throw std::invalid_argument("no realization for opaque function '" + name + "'");
    if (it->second->arity() != arity) throw std::invalid_argument("realization arity mismatch for " + name);
    fns.push_back(it->second.get());
  }
  std::array<cplx, kNumVars> vars{};
  vars[0] = env.point.t;
  for (int a = 0; a < 3; ++a) vars[1 + a] = env.point.x[a];
  std::vector<cplx> out;
  std::vector<double> mags;
  tape.run(vars, pv, fns, out, mags);
  return out[0];
}

std::mt19937_64 trial_rng(uint64_t seed, uint64_t stream, uint64_t trial) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32), static_cast<uint32_t>(stream),
                    static_cast<uint32_t>(stream >> 32), static_cast<uint32_t>(trial)};
  return std::mt19937_64(seq);
}

Point sample_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux1(0.35, 1.7), uxs(-1.7, 1.7), ut(-1.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    Point p;
    p.x = {ux1(rng), uxs(rng), uxs(rng)};
    p.t = ut(rng);
    double rt = std::hypot(p.x[0], p.x[1]);
    double r = std::sqrt(rt * rt + p.x[2] * p.x[2]);
    if (rt >= 0.5 && r <= 3.0) return p;
  }
  throw std::logic_error("point sampler exhausted");
}

double sample_param(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.5, 1.5)(rng); }

ZeroVerdict is_zero(const Expr& e, const ZeroTestOptions& opt) { return all_zero({e}, opt); }

ZeroVerdict all_zero(const std::vector<Expr>& roots, const ZeroTestOptions& opt) {
  if (opt.trials < 16) throw std::invalid_argument("zero test needs at least 16 trials");
  ZeroVerdict verdict;
  std::vector<Expr> live;
  std::vector<size_t> origin;
  for (size_t k = 0; k < roots.size(); ++k) {
    if (!roots[k].is_zero()) {
      live.push_back(roots[k]);
      origin.push_back(k);
    }
  }
  if (live.empty()) return verdict;
  Tape tape(live);
  std::vector<cplx> values;
  std::vector<double> mags;
  for (int trial = 0; trial < opt.trials; ++trial) {
    std::mt19937_64 rng = trial_rng(opt.seed, opt.stream, static_cast<uint64_t>(trial));
    std::vector<cplx> pv;
    std::map<std::string, double> pnamed;
    for (const auto& name : tape.params()) {
      auto it = opt.params.find(name);
      double v = it != opt.params.end() ? it->second : sample_param(rng);
      pv.push_back(v);
      pnamed[name] = v;
    }
    std::vector<std::shared_ptr<const Realization>> owned;
    std::vector<const Realization*> fns;
    for (const auto& [name, arity] : tape.functions()) {
      auto it = opt.functions.find(name);
      if (it != opt.functions.end()) {
        if (it->second->arity() != arity) throw std::invalid_argument("realization arity mismatch for " + name);
        fns.push_back(it->second.get());
      } else {
        owned.push_back(PolyGauss::random(arity, rng));
        fns.push_back(owned.back().get());
      }
    }
    Point p;
    bool ok = false;
    for (int attempt = 0; attempt <= 20 && !ok; ++attempt) {
      p = sample_point(rng);
      std::array<cplx, kNumVars> vars{};
      vars[0] = p.t;
      for (int a = 0; a < 3; ++a) vars[1 + a] = p.x[a];
      tape.run(vars, pv, fns, values, mags);
      ok = true;
      for (size_t k = 0; k < values.size(); ++k) ok = ok && finite(values[k]) && std::isfinite(mags[k]);
    }
    if (!ok) throw SingularPointError("zero test: repeated singular sample points");
    verdict.trials_run = trial + 1;
    for (size_t k = 0; k < values.size(); ++k) {
      double scale = opt.tol * (1.0 + mags[k]);
      if (std::abs(values[k]) > scale) {
        verdict.zero = false;
        verdict.witness = Witness{p, pnamed, origin[k], values[k], scale, trial};
        return verdict;
      }
    }
  }
  return verdict;
}

namespace {

struct JetAlgebra {
  int order;
  std::vector<std::array<int, 4>> monos;
  std::map<std::array<int, 4>, int> index;
  std::vector<std::vector<std::pair<int, int>>> conv;  // output k -> pairs (i, j)

  explicit JetAlgebra(int n) : order(n) {
    for (int d = 0; d <= n; ++d) {
      for (int a = d; a >= 0; --a) {
        for (int b = d - a; b >= 0; --b) {
          for (int c = d - a - b; c >= 0; --c) {
            std::array<int, 4> m{a, b, c, d - a - b - c};
            index[m] = static_cast<int>(monos.size());
            monos.push_back(m);
          }
        }
      }
    }
    conv.resize(monos.size());
    for (size_t i = 0; i < monos.size(); ++i) {
      for (size_t j = 0; j < monos.size(); ++j) {
        std::array<int, 4> s;
        int deg = 0;
        for (int k = 0; k < 4; ++k) {
          s[k] = monos[i][k] + monos[j][k];
          deg += s[k];
        }
        if (deg <= n) conv[index.at(s)].push_back({static_cast<int>(i), static_cast<int>(j)});
      }
    }
  }

  static const JetAlgebra& get(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<JetAlgebra>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<JetAlgebra>(n);
    return *slot;
  }
};

using Jet = std::vector<cplx>;

class JetEvaluator {
 public:
  JetEvaluator(const JetAlgebra& alg, const Point& p, const EvalEnv& env) : alg_(alg), p_(p), env_(env) {}

  Jet eval(const Node* n) {
    auto it = memo_.find(n);
    if (it != memo_.end()) return it->second;
    Jet j = compute(n);
    memo_.emplace(n, j);
    return j;
  }

 private:
  Jet constant(cplx c) const {
    Jet j(alg_.monos.size(), 0);
    j[0] = c;
    return j;
  }

  Jet mul(const Jet& a, const Jet& b) const {
    Jet out(a.size(), 0);
    for (size_t k = 0; k < out.size(); ++k) {
      cplx s = 0;
      for (auto [i, j] : alg_.conv[k]) s += a[i] * b[j];
      out[k] = s;
    }
    return out;
  }

  // f(u0 + delta) from the derivative values d[k] = f^(k)(u0).
  Jet compose(const Jet& u, const std::vector<cplx>& d) const {
    Jet delta = u;
    delta[0] = 0;
    Jet out = constant(d[0]);
    Jet power = constant(1);
    double fact = 1;
    for (int k = 1; k <= alg_.order; ++k) {
      power = mul(power, delta);
      fact *= k;
      for (size_t m = 0; m < out.size(); ++m) out[m] += d[k] / fact * power[m];
    }
    return out;
  }

  std::vector<cplx> fn_derivs(Fn f, cplx u0) const {
    int n = alg_.order;
    std::vector<cplx> d(n + 1);
    const cplx I(0, 1);
    for (int k = 0; k <= n; ++k) {
      switch (f) {
        case Fn::Exp: d[k] = std::exp(u0); break;
        case Fn::Ln: {
          if (k == 0) {
            d[k] = std::log(u0);
          } else {
            double c = std::tgamma(k) * ((k % 2) ? 1.0 : -1.0);
            d[k] = c / int_power(u0, k);
          }
          break;
        }
        case Fn::Sin: {
          cplx vals[4] = {std::sin(u0), std::cos(u0), -std::sin(u0), -std::cos(u0)};
          d[k] = vals[k % 4];
          break;
        }
        case Fn::Cos: {
          cplx vals[4] = {std::cos(u0), -std::sin(u0), -std::cos(u0), std::sin(u0)};
          d[k] = vals[k % 4];
          break;
        }
        case Fn::Atan: {
          if (k == 0) {
            d[k] = eval_fn(Fn::Atan, u0);
          } else {
            double c = 0.5 * std::tgamma(k) * ((k % 2) ? 1.0 : -1.0);
            d[k] = c * (int_power(I, k - 1) / int_power(1.0 + I * u0, k) +
                        int_power(-I, k - 1) / int_power(1.0 - I * u0, k));
          }
          break;
        }
      }
    }
    return d;
  }

  Jet power(const Jet& b, const Node* en) {
    Expr ex(en);
    if (ex.depends_on(Var::T) || ex.depends_on(Var::X1) || ex.depends_on(Var::X2) || ex.depends_on(Var::X3)) {
      Jet lb = compose(b, fn_derivs(Fn::Ln, b[0]));
      Jet prod = mul(eval(en), lb);
      return compose(prod, fn_derivs(Fn::Exp, prod[0]));
    }
    cplx a = eval(en)[0];
    bool rational = en->kind == Kind::Const && en->value.is_real();
    std::vector<cplx> d(alg_.order + 1);
    cplx coef = 1;
    for (int k = 0; k <= alg_.order; ++k) {
      if (coef == 0.0) {
        d[k] = 0;
      } else if (rational) {
        Rational q = en->value.re - Rational(k);
        if (q.is_integer()) {
          d[k] = coef * int_power(b[0], q.num());
        } else if (q.den() == 2) {
          d[k] = coef * int_power(std::sqrt(b[0]), q.num());
        } else {
          d[k] = coef * std::pow(b[0], q.to_double());
        }
      } else {
        d[k] = coef * std::pow(b[0], a - static_cast<double>(k));
      }
      coef *= (a - static_cast<double>(k));
    }
    return compose(b, d);
  }

  Jet opaque(const Node* n) {
    auto it = env_.functions.find(n->name);
    if (it == env_.functions.end()) throw std::invalid_argument("no realization for opaque function '" + n->name + "'");
    const Realization& f = *it->second;
    size_t k = n->kids.size();
    if (f.arity() != k) throw std::invalid_argument("realization arity mismatch for " + n->name);
    std::vector<Jet> deltas;
    std::vector<cplx> u0;
    for (const Node* a : n->kids) {
      Jet j = eval(a);
      u0.push_back(j[0]);
      j[0] = 0;
      deltas.push_back(j);
    }
    int order = alg_.order;
    // powers[j][p] = delta_j^p
    std::vector<std::vector<Jet>> powers(k);
    for (size_t j = 0; j < k; ++j) {
      powers[j].push_back(constant(1));
      for (int p = 1; p <= order; ++p) powers[j].push_back(mul(powers[j][p - 1], deltas[j]));
    }
    Jet out(alg_.monos.size(), 0);
    std::vector<uint8_t> m(k, 0);
    std::function<void(size_t, int)> rec = [&](size_t j, int left) {
      if (j == k) {
        std::vector<uint8_t> idx = n->index;
        double fact = 1;
        for (size_t q = 0; q < k; ++q) {
          idx[q] = static_cast<uint8_t>(idx[q] + m[q]);
          fact *= std::tgamma(m[q] + 1);
        }
        cplx c = f.eval(idx, u0.data()) / fact;
        Jet term = constant(c);
        for (size_t q = 0; q < k; ++q) {
          if (m[q]) term = mul(term, powers[q][m[q]]);
        }
        for (size_t s = 0; s < out.size(); ++s) out[s] += term[s];
        return;
      }
      for (int d = 0; d <= left; ++d) {
        m[j] = static_cast<uint8_t>(d);
        rec(j + 1, left - d);
      }
      m[j] = 0;
    };
    rec(0, order);
    return out;
  }

  Jet compute(const Node* n) {
    switch (n->kind) {
      case Kind::Const: return constant(n->value.to_complex());
      case Kind::Pi: return constant(M_PI);
      case Kind::Param: {
        auto it = env_.params.find(n->name);
        if (it == env_.params.end()) throw std::invalid_argument("parameter '" + n->name + "' unbound");
        return constant(it->second);
      }
      case Kind::Sym: {
        int v = n->tag;
        if (v > 3) throw std::invalid_argument("jet evaluation of realization argument");
        Jet j = constant(v == 0 ? p_.t : p_.x[v - 1]);
        if (alg_.order >= 1) {
          std::array<int, 4> m{0, 0, 0, 0};
          m[v] = 1;
          j[alg_.index.at(m)] = 1;
        }
        return j;
      }
      case Kind::Derived: return eval(expand_atoms(Expr(n)).node());
      case Kind::Add: {
        Jet out(alg_.monos.size(), 0);
        for (const Node* k : n->kids) {
          Jet j = eval(k);
          for (size_t s = 0; s < out.size(); ++s) out[s] += j[s];
        }
        return out;
      }
      case Kind::Mul: {
        Jet out = constant(1);
        for (const Node* k : n->kids) out = mul(out, eval(k));
        return out;
      }
      case Kind::Pow: return power(eval(n->kids[0]), n->kids[1]);
      case Kind::Func: {
        Jet u = eval(n->kids[0]);
        return compose(u, fn_derivs(static_cast<Fn>(n->tag), u[0]));
      }
      case Kind::Opaque: return opaque(n);
    }
    return constant(0);
  }

  const JetAlgebra& alg_;
  Point p_;
  const EvalEnv& env_;
  std::unordered_map<const Node*, Jet> memo_;
};

}  // namespace

cplx JetTable::at(const std::array<int, 4>& m) const {
  auto it = partials.find(m);
  if (it == partials.end()) throw std::out_of_range("jet index beyond computed order");
  return it->second;
}

JetTable evaluate_jet(const Expr& e, const Point& p, int order, const EvalEnv& env) {
  if (order < 0 || order > 4) throw std::invalid_argument("jet order must be 0..4");
  double rt = std::hypot(p.x[0], p.x[1]);
  if (rt == 0 || p.x[0] == 0) throw SingularPointError("jet evaluation on a singular locus");
  const JetAlgebra& alg = JetAlgebra::get(order);
  JetEvaluator ev(alg, p, env);
  Jet j = ev.eval(e.node());
  JetTable table;
  table.order = order;
  for (size_t k = 0; k < alg.monos.size(); ++k) {
    if (!finite(j[k])) throw SingularPointError("jet evaluation produced a non-finite value");
    double fact = 1;
    for (int m : alg.monos[k]) fact *= std::tgamma(m + 1);
    table.partials[alg.monos[k]] = j[k] * fact;
  }
  return table;
}

}  // namespace spinsym
