#pragma once

#include <array>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "spinsym/expr.h"

namespace spinsym {

using cplx = std::complex<double>;

inline constexpr uint64_t kDefaultSeed = 20240607;

struct Point {
  double t = 0;
  std::array<double, 3> x{};
};

class Tape;

class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Concrete smooth stand-in for an opaque function: returns the partial
/// derivative `index` at `args`.
class Realization {
 public:
  virtual ~Realization() = default;
  virtual size_t arity() const = 0;
  virtual cplx eval(const std::vector<uint8_t>& index, const cplx* args) const = 0;
};

/// Q(u) * exp(-|u|^2/8) with Q a polynomial of total degree <= 4.
class PolyGauss : public Realization {
 public:
  using Monomial = std::array<uint8_t, 4>;
  PolyGauss(size_t arity, std::map<Monomial, double> coeffs);
  static std::shared_ptr<PolyGauss> random(size_t arity, std::mt19937_64& rng);

  size_t arity() const override { return arity_; }
  cplx eval(const std::vector<uint8_t>& index, const cplx* args) const override;

 private:
  const std::map<Monomial, double>& derivative(const std::vector<uint8_t>& index) const;

  size_t arity_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<uint8_t>, std::map<Monomial, double>> cache_;
};

/// Realization given by a symbolic expression in u1..u_k.
class ExprRealization : public Realization {
 public:
  ExprRealization(size_t arity, Expr body, std::map<std::string, double> params = {});
  size_t arity() const override { return arity_; }
  cplx eval(const std::vector<uint8_t>& index, const cplx* args) const override;
  const Expr& body() const { return body_; }

 private:
  size_t arity_;
  Expr body_;
  std::map<std::string, double> params_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<uint8_t>, std::shared_ptr<const Tape>> cache_;
};

using RealizationMap = std::map<std::string, std::shared_ptr<const Realization>>;

struct EvalEnv {
  Point point;
  std::map<std::string, double> params;
  RealizationMap functions;
};

/// Flat evaluation program for a set of roots sharing one DAG.
class Tape {
 public:
  explicit Tape(const std::vector<Expr>& roots);

  const std::vector<std::string>& params() const { return params_; }
  const std::vector<std::pair<std::string, size_t>>& functions() const { return functions_; }
  size_t size() const { return ops_.size(); }

  /// vars holds t, x1..x3, u1..u4; param and function values follow params()
  /// and functions() order. Fills root values and magnitudes.
  void run(const std::array<cplx, kNumVars>& vars, const std::vector<cplx>& param_values,
           const std::vector<const Realization*>& fns, std::vector<cplx>& root_values,
           std::vector<double>& root_mags) const;

 private:
  struct Op {
    Kind kind;
    uint8_t tag;
    int32_t slot;  // param or function slot
    const Node* node;
    std::vector<uint32_t> args;
  };
  std::vector<Op> ops_;
  std::vector<uint32_t> roots_;
  std::vector<std::string> params_;
  std::vector<std::pair<std::string, size_t>> functions_;
  mutable std::vector<cplx> vals_;
  mutable std::vector<double> mags_;
  mutable std::mutex mu_;
};

/// Numeric value; throws std::invalid_argument for unbound params/functions.
cplx evaluate(const Expr& e, const EvalEnv& env);

struct ZeroTestOptions {
  int trials = 64;
  double tol = 1e-9;
  uint64_t seed = kDefaultSeed;
  uint64_t stream = 0;  // separates independent checks under one seed
  std::map<std::string, double> params;
  RealizationMap functions;
};

struct Witness {
  Point point;
  std::map<std::string, double> params;
  size_t root = 0;
  cplx value;
  double scale = 0;
  int trial = 0;
};

struct ZeroVerdict {
  bool zero = true;
  int trials_run = 0;
  std::optional<Witness> witness;
};

/// Probabilistic identity test over random points, parameters and opaque
/// realizations. The verdict is zero iff every root vanishes on every trial.
ZeroVerdict is_zero(const Expr& e, const ZeroTestOptions& opt = {});
ZeroVerdict all_zero(const std::vector<Expr>& roots, const ZeroTestOptions& opt = {});

/// Random sample of the test domain: x1 in [0.35, 1.7], x2, x3 in
/// [-1.7, 1.7], with 0.5 <= rt and r <= 3; t in [-1, 1].
Point sample_point(std::mt19937_64& rng);
double sample_param(std::mt19937_64& rng);
std::mt19937_64 trial_rng(uint64_t seed, uint64_t stream, uint64_t trial);

/// Partial derivatives in (t, x1, x2, x3) up to total order.
struct JetTable {
  int order = 0;
  std::map<std::array<int, 4>, cplx> partials;
  cplx at(const std::array<int, 4>& m) const;
};

JetTable evaluate_jet(const Expr& e, const Point& p, int order, const EvalEnv& env);

}  // namespace spinsym
