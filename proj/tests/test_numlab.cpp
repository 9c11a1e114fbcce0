#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spinsym/catalog.h"
#include "spinsym/numlab.h"
#include "spinsym/run.h"

using namespace spinsym;

namespace {

NumericEnv unit_env() {
  NumericEnv env;
  env.params = {{"g", 1}, {"e", 1}, {"nu", 1}, {"mu", 1}, {"q", 0}, {"omega", 0.5}};
  return env;
}

Expr ex(const std::string& s) {
  ParseContext ctx;
  return parse_expr(s, ctx);
}

DiffOp op(const std::string& s) {
  ParseContext ctx;
  return parse_generator(s, ctx);
}

GridState packet(const Grid& g, const std::string& up, const std::string& down) {
  GridState s = GridState::sample(g, {ex(up), ex(down)});
  s.normalize();
  return s;
}

DiffOp config_hamiltonian(const nlohmann::json& j, Variant v) { return build_hamiltonian(PotentialConfig::from_json(j), v); }

double max_diff(const GridState& a, const GridState& b) {
  double m = 0;
  for (size_t k = 0; k < a.psi.size(); ++k) m = std::max(m, std::abs(a.psi[k] - b.psi[k]));
  return m;
}

}  // namespace

TEST_CASE("grid geometry") {
  Grid g{48, -8, 8};
  CHECK(g.h() == doctest::Approx(16.0 / 47));
  CHECK(g.coord(0) == -8);
  CHECK(g.coord(47) == doctest::Approx(8));
  CHECK(g.symmetric());
  CHECK(g.coord(23) == doctest::Approx(-g.coord(24)));
  CHECK_FALSE(Grid{16, -2, 6}.symmetric());
}

TEST_CASE("laplacian of a Gaussian converges at the stencil order") {
  DiffOp lap = DiffOp(Expr(Rational(-1, 2))) * (DiffOp::d(1) * DiffOp::d(1) + DiffOp::d(2) * DiffOp::d(2) +
                                                 DiffOp::d(3) * DiffOp::d(3));
  Spinor psi{ex("exp(-r^2/2)"), Expr(0)};
  ConvergenceReport second = convergence_study(lap, psi, {24, 32, 48, 64}, 6, {}, {2, Boundary::Dirichlet});
  CHECK(second.order >= 1.9);
  CHECK(second.order <= 2.2);
  ConvergenceReport fourth = convergence_study(lap, psi, {32, 48, 64, 80}, 6, {}, {4, Boundary::Dirichlet});
  CHECK(fourth.order >= 3.8);
  CHECK(fourth.errors.back() < second.errors.back());
}

TEST_CASE("grid application agrees with symbolic application for Hamiltonians") {
  NumericEnv env = unit_env();
  DiffOp sp = config_hamiltonian({{"F", "x3*exp(-rt^2/8)"}, {"G", "rt^2/10"}, {"A0", "(rt^2 + x3^2)/20"}}, Variant::SP);
  Spinor s1{ex("(x1 + i*x2)*exp(-r^2/4)"), ex("exp(-((x1-1)^2 + x2^2 + x3^2)/3)")};
  ConvergenceReport a = convergence_study(sp, s1, {48, 64, 80}, 7, env, {2, Boundary::Dirichlet});
  CHECK(a.order >= 1.9);

  DiffOp h3 = config_hamiltonian({{"A0", "x1^2/10 + sin(x2)/4 + x3/5"}}, Variant::H3);
  Spinor s2{ex("exp(-((x1-3)^2 + x2^2 + x3^2)/2)"), ex("0.5*i*exp(-((x1-3)^2 + x2^2 + x3^2)/2)")};
  ConvergenceReport b = convergence_study(h3, s2, {48, 64, 80}, 7, env, {2, Boundary::Dirichlet});
  CHECK(b.order >= 1.9);
}

TEST_CASE("J3 on an axially symmetric spin-up Gaussian") {
  // L3 of an axial function vanishes only up to the stencil error.
  auto error = [](int n, int acc) {
    GridState s = GridState::sample(Grid{n, -6, 6}, {ex("exp(-(x1^2 + x2^2)/2 - x3^2/3)"), Expr(0)});
    GridState out = discretize_apply(op("J3"), s, {}, {acc, Boundary::Dirichlet});
    double m = 0;
    for (size_t k = 0; k < s.psi.size(); ++k) m = std::max(m, std::abs(out.psi[k] - 0.5 * s.psi[k]));
    return m;
  };
  double e4 = error(33, 4), f4 = error(65, 4), e2 = error(33, 2), f2 = error(65, 2);
  CHECK(e4 < 3e-3);
  CHECK(e4 / f4 > 12);
  CHECK(e2 / f2 > 3.5);
  CHECK(f4 < f2);
}

TEST_CASE("parity reverses indices exactly") {
  Grid g{12, -3, 3};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  GridState s(g);
  for (auto& v : s.psi) v = {N(rng), N(rng)};
  GridState out = discretize_apply(DiffOp::parity(), s);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k) {
        size_t a = 2 * g.node(i, j, k), b = 2 * g.node(g.n - 1 - i, g.n - 1 - j, g.n - 1 - k);
        CHECK(out.psi[a] == s.psi[b]);
        CHECK(out.psi[a + 1] == s.psi[b + 1]);
      }
  CHECK_THROWS_AS(discretize_apply(DiffOp::parity(), GridState(Grid{12, -2, 4})), UnsupportedOperatorError);
}

TEST_CASE("unsupported operators are rejected") {
  Grid g{12, -3, 3};
  GridState s(g);
  CHECK_THROWS_AS(discretize_apply(DiffOp::d(1) * DiffOp::d(1) * DiffOp::d(2), s), UnsupportedOperatorError);
  CHECK_THROWS_AS(discretize_apply(op("P0"), s), UnsupportedOperatorError);
  CHECK_THROWS_AS(discretize_apply(op("Bp(1, omega)"), s), std::invalid_argument);
}

TEST_CASE("discretized Hamiltonians are hermitian") {
  Grid g{16, -5, 5};
  NumericEnv env = unit_env();
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N;
  GridState a(g), b(g);
  for (auto& v : a.psi) v = {N(rng), N(rng)};
  for (auto& v : b.psi) v = {N(rng), N(rng)};
  for (Variant v : {Variant::SP, Variant::H3, Variant::H3a}) {
    DiffOp h = config_hamiltonian({{"F", "x3*exp(-rt^2/8)"}, {"G", "x1*x2/3"}, {"A0", "ln(r)/(2*nu) + x3/4"},
                                   {"Atilde", "x1^2/5"}},
                                  v);
    for (int acc : {2, 4}) {
      for (Boundary bc : {Boundary::Dirichlet, Boundary::Periodic}) {
        GridOperator H(h, g, env, {acc, bc});
        cplx lhs = a.inner(H.apply(b)), rhs = std::conj(b.inner(H.apply(a)));
        CHECK(std::abs(lhs - rhs) < 1e-9 * std::abs(lhs));
      }
    }
  }
}

TEST_CASE("zero steps leave the state unchanged") {
  Grid g{12, -4, 4};
  GridState s = packet(g, "exp(-r^2/2)", "0");
  EvolutionSpec spec;
  spec.steps = 0;
  Trajectory t = evolve(s, op("-(d1^2 + d2^2 + d3^2)/2"), spec);
  CHECK(max_diff(t.final_state, s) == 0);
  CHECK(t.times.size() == 1);
}

TEST_CASE("free packet spreads as in closed form") {
  Grid g{48, -8, 8};
  GridState s = packet(g, "exp(-r^2/8)", "0");
  EvolutionSpec spec;
  std::vector<TrackedOperator> tr{{"x1^2", DiffOp(ex("x1^2"))}};
  Trajectory t = evolve(s, op("-(d1^2 + d2^2 + d3^2)/2"), spec, {}, tr);
  // sigma^2 + t^2 / (4 sigma^2) with sigma^2 = 2
  for (size_t k = 0; k < t.times.size(); ++k) {
    double want = 2 + t.times[k] * t.times[k] / 8;
    CHECK(std::abs(t.values[k][0] - want) < 1e-4);
  }
  CHECK(t.max_step_norm_drift < 1e-8);
}

TEST_CASE("spin precesses at twice the Larmor coupling") {
  Grid g{16, -6, 6};
  NumericEnv env = unit_env();
  env.params["g"] = 0.7;
  // G = -c rt^2 / 4 gives H3 = c with c = 1.5
  DiffOp h = config_hamiltonian({{"G", "-3*rt^2/8"}}, Variant::SP);
  GridState s = packet(g, "exp(-r^2/2)", "exp(-r^2/2)");
  EvolutionSpec spec;
  spec.dt = 0.002;
  spec.steps = 300;
  spec.record_every = 10;
  Trajectory t = evolve(s, h, spec, env, {{"s1", op("s1")}});
  const double w = 2 * 0.7 * 1.5;
  for (size_t k = 0; k < t.times.size(); ++k) CHECK(std::abs(t.values[k][0] - std::cos(w * t.times[k])) < 1e-5);
}

TEST_CASE("Crank-Nicolson is time reversible and unitary") {
  Grid g{20, -6, 6};
  NumericEnv env = unit_env();
  DiffOp h = config_hamiltonian({{"G", "rt^2/6"}, {"A0", "ln(r)/(2*nu)"}}, Variant::H3);
  GridState s = packet(g, "r^2*exp(-(x1^2 + x2^2 + (x3 - 1)^2)/2)", "0.3*i*exp(-r^2/2)*x1");
  EvolutionSpec spec;
  spec.dt = 0.01;
  spec.steps = 40;
  Trajectory fwd = evolve(s, h, spec, env);
  CHECK(fwd.max_step_norm_drift < 1e-8);
  spec.dt = -0.01;
  GridState mid = fwd.final_state;
  Trajectory back = evolve(mid, h, spec, env);
  CHECK(max_diff(back.final_state, s) < 1e-7);
  CHECK(std::abs(back.final_state.time - s.time) < 1e-12);
}

TEST_CASE("explicitly time-dependent integrals are evaluated at the step time") {
  Grid g{24, -8, 8};
  GridState s = packet(g, "exp(-r^2/4 + i*x1/2)", "0");
  EvolutionSpec spec;
  spec.dt = 0.005;
  spec.steps = 200;
  spec.record_every = 20;
  std::vector<TrackedOperator> tr{{"G1", op("G1")}, {"x1", DiffOp(ex("x1"))}};
  Trajectory t = evolve(s, op("-(d1^2 + d2^2 + d3^2)/2"), spec, {}, tr);
  auto d = drift_reports(t, s, tr, {}, spec.stencil);
  CHECK(d[0].drift < 1e-4);
  CHECK(d[1].drift > 0.1);
}

TEST_CASE("J3 is conserved and L3 is not under an in-plane Pauli field") {
  Grid g{32, -8, 8};
  NumericEnv env = unit_env();
  DiffOp h = config_hamiltonian({{"F", "x3*exp(-rt^2/8)"}, {"G", "rt^2/10"}, {"A0", "(rt^2 + x3^2)/20"}}, Variant::SP);
  GridState s = packet(g, "(x1 + i*x2)*exp(-r^2/4.5)", "0.5*(x1 + i*x2)*exp(-r^2/4.5)");
  EvolutionSpec spec;
  spec.dt = 0.0025;
  spec.steps = 100;
  std::vector<TrackedOperator> tr{{"J3", op("J3")}, {"L3", op("L3")}};
  Trajectory t = evolve(s, h, spec, env, tr);
  auto d = drift_reports(t, s, tr, env, spec.stencil);
  CHECK(d[0].drift < 1e-3);
  CHECK(d[1].drift > 10 * d[0].drift);
  CHECK_FALSE(d[0].boundary_contact);
  std::string csv = t.to_csv();
  CHECK(csv.rfind("t,J3,L3,norm\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 102);
}

TEST_CASE("boundary contact is flagged") {
  Grid g{16, -4, 4};
  GridState s = packet(g, "exp(-((x1 - 3)^2 + x2^2 + x3^2))", "0");
  EvolutionSpec spec;
  spec.steps = 2;
  Trajectory t = evolve(s, op("-(d1^2 + d2^2 + d3^2)/2"), spec);
  CHECK(t.boundary_contact);
}

TEST_CASE("missing numeric values are reported") {
  Grid g{12, -3, 3};
  GridState s(g);
  CHECK_THROWS_AS(discretize_apply(DiffOp(ex("kappa*x1")), s), std::invalid_argument);
  NumericEnv env;
  env.params["kappa"] = 2;
  CHECK_NOTHROW(discretize_apply(DiffOp(ex("kappa*x1")), s, env));
}

TEST_CASE("run configuration") {
  RunConfig c = RunConfig::load(SPINSYM_DATA_DIR "/runs/j3.json");
  CHECK(c.grid.n == 48);
  CHECK(c.spec.steps == 200);
  CHECK(c.spec.stencil.accuracy == 4);
  CHECK(c.track.size() == 2);
  CHECK(c.env.params.at("g") == 1);

  nlohmann::json j = {{"potential", {{"A0", "R(rt)"}, {"opaque", {{"R", 1}}}}},
                      {"functions", {{"R", {{"arity", 1}, {"body", "u1^2/10"}}}}},
                      {"grid", {{"n", 10}, {"lo", -3}, {"hi", 3}}},
                      {"steps", 3},
                      {"track", {{"J3", "J3"}}}};
  RunResult r = run_conservation(RunConfig::from_json(j));
  CHECK(r.trajectory.times.size() == 4);
  CHECK(r.drift.at(0).drift < 1e-10);
  CHECK(r.to_json().at("steps") == 3);

  CHECK_THROWS_AS(RunConfig::from_json({{"accuracy", 6}}), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json({{"boundary", "absorbing"}}), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json({{"packet", {"1"}}}), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json({{"schema", "other/1"}}), std::invalid_argument);
  CHECK_THROWS_AS(RunConfig::from_json({{"grid", {{"n", 2}}}}), std::invalid_argument);
}
