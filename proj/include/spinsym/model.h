#pragma once

#include <array>
#include <optional>
#include <string>

#include <json.hpp>

#include "spinsym/diffop.h"

namespace spinsym {

using Vec3 = std::array<Expr, 3>;

enum class Variant { SP, H3, H3a };

std::string variant_name(Variant v);  // "sp", "qrse-h3", "qrse-h3a"
Variant parse_variant(const std::string& name);

/// Generating functions, scalar potentials and couplings of one system.
/// The vector potential is A = (d2 G, -d1 G, F) + grad Ft with Ft absent by
/// default.
struct PotentialConfig {
  ParseContext ctx;
  Expr F, G, A0, S;
  std::optional<Expr> Ftilde;
  /// Effective potential entering the generalized electric field; defaults
  /// to A0 - q S when absent.
  std::optional<Expr> Atilde;
  Expr e = Expr::param("e");
  Expr g = Expr::param("g");
  Expr nu = Expr::param("nu");
  Expr mu = Expr::param("mu");
  Expr q = Expr::param("q");

  Expr effective_potential() const;

  nlohmann::json to_json() const;
  static PotentialConfig from_json(const nlohmann::json& j);
};

inline constexpr const char* kPotentialSchema = "spinsym.potential/1";

struct FieldSet {
  Vec3 A, H, E, Et, Ht;
};

Vec3 gradient(const Expr& f);
Vec3 curl(const Vec3& v);
Expr divergence(const Vec3& v);
Expr laplacian(const Expr& f);

Vec3 vector_potential(const PotentialConfig& cfg);
/// Curl of the vector potential.
Vec3 magnetic_field(const PotentialConfig& cfg);
/// Closed form in terms of F and G (the gradient part drops out).
Vec3 magnetic_field_formula(const PotentialConfig& cfg);
FieldSet fields(const PotentialConfig& cfg);

/// Momentum p_a = -i d_a, kinetic momentum pi_a = p_a - e A^a.
DiffOp momentum(int a);
DiffOp kinetic_momentum(int a, const Vec3& A, const Expr& e);

/// 1/2 pi.pi + A0 + g s.H
DiffOp build_sp_hamiltonian(const PotentialConfig& cfg);
/// SP plus spin-orbit and Darwin terms; H3 uses E = grad A0 with p, H3a the
/// generalized field grad(Atilde) with pi.
DiffOp build_qrse_hamiltonian(const PotentialConfig& cfg, Variant variant);
DiffOp build_hamiltonian(const PotentialConfig& cfg, Variant variant);

/// exp(-i phi) H exp(i phi).
DiffOp gauge_transform(const DiffOp& H, const Expr& phi);

/// Pauli field after the gauge change for the H3 Hamiltonian:
/// H'^a = H^a - (nu/g) eps_abc phi_b E^c.
Vec3 gauge_shifted_pauli_field(const PotentialConfig& cfg, const Expr& phi);

/// Copy of cfg with the vector potential shifted by -grad(phi)/e through
/// Ftilde.
PotentialConfig gauge_shifted_config(const PotentialConfig& cfg, const Expr& phi);

}  // namespace spinsym
