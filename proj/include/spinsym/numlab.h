#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsym/diffop.h"
#include "spinsym/eval.h"

namespace spinsym {

/// Cubic box [lo, hi]^3 with n nodes per axis, endpoints included.
struct Grid {
  int n = 48;
  double lo = -8, hi = 8;

  double h() const { return (hi - lo) / (n - 1); }
  double coord(int i) const { return lo + i * h(); }
  size_t nodes() const { return static_cast<size_t>(n) * n * n; }
  size_t node(int i, int j, int k) const { return (static_cast<size_t>(i) * n + j) * n + k; }
  bool symmetric() const { return std::abs(lo + hi) < 1e-12 * (hi - lo); }
};

enum class Boundary { Periodic, Dirichlet };

/// Spinor samples interleaved per node: psi[2*node + s].
struct GridState {
  Grid grid;
  std::vector<cplx> psi;
  double time = 0;

  explicit GridState(Grid g = {}) : grid(g), psi(2 * g.nodes(), 0.0) {}

  /// Samples a symbolic spinor at every node.
  static GridState sample(const Grid& g, const Spinor& s, const std::map<std::string, double>& params = {},
                          const RealizationMap& functions = {}, double t = 0);

  double norm2() const;
  void normalize();
  cplx inner(const GridState& other) const;
};

/// Numeric values for parameters and opaque functions appearing in operators.
struct NumericEnv {
  std::map<std::string, double> params;
  RealizationMap functions;
};

struct StencilSpec {
  int accuracy = 4;  // 2 or 4
  Boundary boundary = Boundary::Dirichlet;
};

class UnsupportedOperatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Matrix-free grid discretization of a DiffOp of spatial order <= 2.
/// First-order terms are applied as 1/2 (B D + D B) - 1/2 (d B) so a
/// hermitian operator stays hermitian on the grid. A single d/dt factor
/// is replaced by -i H when a Hamiltonian is supplied.
class GridOperator {
 public:
  GridOperator(const DiffOp& op, const Grid& grid, const NumericEnv& env, const StencilSpec& stencil = {},
               const GridOperator* hamiltonian = nullptr);

  /// Applies the operator with coefficients at time t (recomputed only if
  /// they depend on t).
  void apply(const std::vector<cplx>& in, std::vector<cplx>& out, double t) const;
  GridState apply(const GridState& s) const;

  bool time_dependent() const { return time_dependent_; }
  const Grid& grid() const { return grid_; }

 private:
  struct Field {
    bool constant = true;
    std::array<cplx, 4> c{};      // Pauli components when constant
    std::vector<cplx> values;     // 4 per node otherwise
    std::array<Expr, 4> source;
  };
  struct Term {
    MultiIndex m{};
    bool reflected = false;
    bool time_derivative = false;
    bool symmetrized = false;  // first-order term in 1/2 (B D + D B) form
    Field field;
  };

  void evaluate_fields(double t) const;
  void derivative(const std::vector<cplx>& in, std::vector<cplx>& out, int axis, int order) const;
  void add_term(const Term& term, const std::vector<cplx>& in, std::vector<cplx>& out, double t) const;

  Grid grid_;
  NumericEnv env_;
  StencilSpec stencil_;
  const GridOperator* hamiltonian_ = nullptr;
  mutable std::vector<Term> terms_;
  mutable double fields_time_ = 0;
  mutable bool fields_ready_ = false;
  bool time_dependent_ = false;
  mutable std::vector<cplx> tmp1_, tmp2_, tmp3_;
};

/// Convenience wrapper around GridOperator.
GridState discretize_apply(const DiffOp& H, const GridState& s, const NumericEnv& env = {},
                           const StencilSpec& stencil = {});

struct EvolutionSpec {
  double dt = 0.005;
  int steps = 200;
  StencilSpec stencil;
  double tol = 1e-10;
  int max_iterations = 500;
  /// Record expectation values every this many steps.
  int record_every = 1;
  /// Norm fraction within `boundary_layer` of the faces above which the
  /// run is flagged.
  double boundary_layer = 1.0;
  double boundary_threshold = 1e-6;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrackedOperator {
  std::string name;
  DiffOp op;
};

struct Trajectory {
  std::vector<std::string> names;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[row][operator]
  std::vector<double> norms;
  double max_step_norm_drift = 0;
  int max_iterations_used = 0;
  bool boundary_contact = false;
  GridState final_state;

  std::string to_csv() const;
};

/// Crank-Nicolson with BiCGSTAB; expectation values of the tracked
/// operators are recorded along the way (explicitly time-dependent
/// operators are evaluated at each step's time).
Trajectory evolve(const GridState& s0, const DiffOp& H, const EvolutionSpec& spec, const NumericEnv& env = {},
                  const std::vector<TrackedOperator>& tracked = {});

/// Real part of <psi|Q psi> / <psi|psi>.
double expectation(const GridOperator& Q, const GridState& s);

struct DriftReport {
  std::string name;
  double initial = 0;
  double scale = 0;
  double max_abs_drift = 0;
  double drift = 0;  // max_abs_drift / scale
  bool boundary_contact = false;
  nlohmann::json to_json() const;
};

/// Drift of each tracked operator relative to sqrt(<Q^2>) at t = 0.
std::vector<DriftReport> drift_reports(const Trajectory& traj, const GridState& s0,
                                       const std::vector<TrackedOperator>& tracked, const NumericEnv& env,
                                       const StencilSpec& stencil);

DriftReport conservation_drift(const DiffOp& Q, const GridState& s0, const DiffOp& H, const EvolutionSpec& spec,
                               const NumericEnv& env = {});

/// Max-norm error of the grid discretization against symbolic application,
/// over nodes at least `margin` away from the faces.
double discretization_error(const DiffOp& op, const Spinor& psi, const Grid& grid, const NumericEnv& env,
                            const StencilSpec& stencil, double margin = 2.0);

struct ConvergenceReport {
  std::vector<int> sizes;
  std::vector<double> spacings;
  std::vector<double> errors;
  double order = 0;  // least-squares slope of log error against log h
  nlohmann::json to_json() const;
};

ConvergenceReport convergence_study(const DiffOp& op, const Spinor& psi, const std::vector<int>& sizes, double extent,
                                    const NumericEnv& env, const StencilSpec& stencil);

}  // namespace spinsym
