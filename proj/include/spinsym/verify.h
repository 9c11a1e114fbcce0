#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsym/model.h"

namespace spinsym {

/// Q = xi0 dt + 1/2 (xi^a d_a + d_a xi^a) + i (eta0 + s_a eta^a).
struct SymmetryCandidate {
  Expr xi0;
  Vec3 xi;
  Expr eta0;
  Vec3 eta;

  Expr alpha() const { return -differentiate(xi0, Var::T); }
  PauliExpr eta_matrix() const { return PauliExpr(eta0, eta[0], eta[1], eta[2]); }
  DiffOp to_op() const;
  /// Defined for first-order operators with scalar leading coefficients and
  /// no parity terms.
  static std::optional<SymmetryCandidate> from_op(const DiffOp& q);
};

/// -d_t of the scalar coefficient of dt in q.
Expr derived_alpha(const DiffOp& q);

/// [Q, L] - alpha L with L = i dt - H.
DiffOp symmetry_residual(const DiffOp& Q, const DiffOp& H);
DiffOp symmetry_residual(const SymmetryCandidate& Q, const DiffOp& H);

/// H = -1/2 Lap + B_c d_c + U.
struct HamiltonianParts {
  std::array<PauliExpr, 3> B;
  PauliExpr U;
  DiffOp to_op() const;
};
HamiltonianParts hamiltonian_parts(const PotentialConfig& cfg, Variant variant);

struct EquationResult {
  std::string name;
  bool pass = true;
  std::optional<Witness> witness;
  std::string component;  // failing component label
};

struct DeterminingReport {
  std::vector<EquationResult> equations;
  /// Relations exactly as typeset, reported but not part of the verdict.
  std::vector<EquationResult> as_printed;
  bool all_pass = true;
  /// Differential consequence eps_abc d_b (eta^c_a) of the printed vector
  /// relation; true when it does not vanish.
  std::optional<bool> hop_incompatible;
};

DeterminingReport check_determining_sp(const SymmetryCandidate& Q, const PotentialConfig& cfg,
                                       const ZeroTestOptions& opt = {});
DeterminingReport check_determining_qrse(const SymmetryCandidate& Q, const PotentialConfig& cfg, Variant variant,
                                         const ZeroTestOptions& opt = {});
DeterminingReport check_determining(const SymmetryCandidate& Q, const PotentialConfig& cfg, Variant variant,
                                    const ZeroTestOptions& opt = {});

struct VerificationReport {
  std::string id;
  Variant variant = Variant::SP;
  std::string generator;
  DiffOp residual;
  bool symmetry = false;
  std::optional<Witness> witness;
  std::string failing_term;
  std::optional<DeterminingReport> determining;
  bool routes_agree = true;
  double millis = 0;

  /// Timing is left out so reports are reproducible byte for byte.
  nlohmann::json to_json() const;
  std::string to_text() const;
};

VerificationReport verify_candidate(const std::string& id, const DiffOp& Q, const PotentialConfig& cfg, Variant variant,
                                    const ZeroTestOptions& opt = {});

nlohmann::json witness_json(const Witness& w);

}  // namespace spinsym
