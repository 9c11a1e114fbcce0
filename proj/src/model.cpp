#include "spinsym/model.h"

#include <stdexcept>

namespace spinsym {

namespace {

int levi(int a, int b, int c) {
  if (a == b || b == c || a == c) return 0;
  return ((b - a + 3) % 3 == 1) ? 1 : -1;
}

Expr d(const Expr& f, int a) { return differentiate(f, static_cast<Var>(a)); }

// Component a (1..3) of x cross y.
Expr cross(const Vec3& x, const Vec3& y, int a) {
  int b = a % 3 + 1, c = b % 3 + 1;
  return x[b - 1] * y[c - 1] - x[c - 1] * y[b - 1];
}

Expr parse_field(const nlohmann::json& j, const char* key, ParseContext& ctx) {
  if (!j.contains(key)) return Expr();
  return parse_expr(j.at(key).get<std::string>(), ctx);
}

// (nu/2) eps_abc s_a (E^b K_c + K_c E^b) for first-order operators K.
DiffOp spin_orbit(const Vec3& E, const std::array<DiffOp, 3>& K, const Expr& nu) {
  DiffOp out;
  for (int a = 1; a <= 3; ++a) {
    for (int b = 1; b <= 3; ++b) {
      for (int c = 1; c <= 3; ++c) {
        int s = levi(a, b, c);
        if (!s || E[b - 1].is_zero()) continue;
        DiffOp Eb(E[b - 1]);
        DiffOp sym = Eb * K[c - 1] + K[c - 1] * Eb;
        out += DiffOp(PauliExpr::sigma(a)) * DiffOp(Expr(s) * nu / Expr(2)) * sym;
      }
    }
  }
  return out;
}

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::SP:
      return "sp";
    case Variant::H3:
      return "qrse-h3";
    case Variant::H3a:
      return "qrse-h3a";
  }
  return "sp";
}

Variant parse_variant(const std::string& name) {
  if (name == "sp") return Variant::SP;
  if (name == "qrse-h3") return Variant::H3;
  if (name == "qrse-h3a") return Variant::H3a;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

Expr PotentialConfig::effective_potential() const { return Atilde ? *Atilde : A0 - q * S; }

nlohmann::json PotentialConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = kPotentialSchema;
  j["opaque"] = nlohmann::json::object();
  for (const auto& [n, a] : ctx.opaque) j["opaque"][n] = a;
  ParseContext defaults;
  std::vector<std::string> extra;
  for (const auto& p : ctx.params) {
    if (!defaults.params.count(p)) extra.push_back(p);
  }
  j["params"] = extra;
  j["F"] = to_string(F);
  j["G"] = to_string(G);
  j["A0"] = to_string(A0);
  j["S"] = to_string(S);
  if (Ftilde) j["Ftilde"] = to_string(*Ftilde);
  if (Atilde) j["Atilde"] = to_string(*Atilde);
  j["couplings"] = {{"e", to_string(e)}, {"g", to_string(g)}, {"nu", to_string(nu)}, {"mu", to_string(mu)},
                    {"q", to_string(q)}};
  return j;
}

PotentialConfig PotentialConfig::from_json(const nlohmann::json& j) {
  if (j.contains("schema") && j.at("schema") != kPotentialSchema) {
    throw std::invalid_argument("unsupported potential schema " + j.at("schema").dump());
  }
  PotentialConfig cfg;
  if (j.contains("opaque")) {
    for (const auto& [n, a] : j.at("opaque").items()) cfg.ctx.declare_opaque(n, a.get<size_t>());
  }
  if (j.contains("params")) {
    for (const auto& p : j.at("params")) cfg.ctx.declare_param(p.get<std::string>());
  }
  cfg.F = parse_field(j, "F", cfg.ctx);
  cfg.G = parse_field(j, "G", cfg.ctx);
  cfg.A0 = parse_field(j, "A0", cfg.ctx);
  cfg.S = parse_field(j, "S", cfg.ctx);
  if (j.contains("Ftilde")) cfg.Ftilde = parse_field(j, "Ftilde", cfg.ctx);
  if (j.contains("Atilde")) cfg.Atilde = parse_field(j, "Atilde", cfg.ctx);
  if (j.contains("couplings")) {
    const auto& c = j.at("couplings");
    if (c.contains("e")) cfg.e = parse_field(c, "e", cfg.ctx);
    if (c.contains("g")) cfg.g = parse_field(c, "g", cfg.ctx);
    if (c.contains("nu")) cfg.nu = parse_field(c, "nu", cfg.ctx);
    if (c.contains("mu")) cfg.mu = parse_field(c, "mu", cfg.ctx);
    if (c.contains("q")) cfg.q = parse_field(c, "q", cfg.ctx);
  }
  return cfg;
}

Vec3 gradient(const Expr& f) { return {d(f, 1), d(f, 2), d(f, 3)}; }

Vec3 curl(const Vec3& v) {
  return {d(v[2], 2) - d(v[1], 3), d(v[0], 3) - d(v[2], 1), d(v[1], 1) - d(v[0], 2)};
}

Expr divergence(const Vec3& v) { return sum({d(v[0], 1), d(v[1], 2), d(v[2], 3)}); }

Expr laplacian(const Expr& f) { return divergence(gradient(f)); }

Vec3 vector_potential(const PotentialConfig& cfg) {
  Vec3 A{d(cfg.G, 2), -d(cfg.G, 1), cfg.F};
  if (cfg.Ftilde) {
    Vec3 gf = gradient(*cfg.Ftilde);
    for (int a = 0; a < 3; ++a) A[a] = A[a] + gf[a];
  }
  return A;
}

Vec3 magnetic_field(const PotentialConfig& cfg) { return curl(vector_potential(cfg)); }

Vec3 magnetic_field_formula(const PotentialConfig& cfg) {
  const Expr& F = cfg.F;
  const Expr& G = cfg.G;
  return {d(F, 2) + d(d(G, 1), 3), d(d(G, 2), 3) - d(F, 1), -(d(d(G, 1), 1) + d(d(G, 2), 2))};
}

FieldSet fields(const PotentialConfig& cfg) {
  FieldSet f;
  f.A = vector_potential(cfg);
  f.H = curl(f.A);
  f.E = gradient(cfg.A0);
  f.Et = gradient(cfg.effective_potential());
  for (int a = 1; a <= 3; ++a) {
    f.Ht[a - 1] = f.H[a - 1] - Expr(2) * cfg.nu * cross(f.A, f.Et, a);
  }
  return f;
}

DiffOp momentum(int a) { return DiffOp(-Expr::imag_unit()) * DiffOp::d(a); }

DiffOp kinetic_momentum(int a, const Vec3& A, const Expr& e) { return momentum(a) - DiffOp(e * A[a - 1]); }

DiffOp build_sp_hamiltonian(const PotentialConfig& cfg) {
  Vec3 A = vector_potential(cfg);
  Vec3 H = curl(A);
  DiffOp out;
  for (int a = 1; a <= 3; ++a) {
    DiffOp pa = kinetic_momentum(a, A, cfg.e);
    out += DiffOp(Expr(Rational(1, 2))) * pa * pa;
  }
  out += DiffOp(PauliExpr(cfg.A0) + PauliExpr::dot({cfg.g * H[0], cfg.g * H[1], cfg.g * H[2]}));
  return out;
}

DiffOp build_qrse_hamiltonian(const PotentialConfig& cfg, Variant variant) {
  DiffOp out = build_sp_hamiltonian(cfg);
  if (variant == Variant::SP) return out;
  if (variant == Variant::H3) {
    Vec3 E = gradient(cfg.A0);
    out += spin_orbit(E, {momentum(1), momentum(2), momentum(3)}, cfg.nu);
    out += DiffOp(cfg.mu * laplacian(cfg.A0));
    return out;
  }
  Vec3 A = vector_potential(cfg);
  Vec3 Et = gradient(cfg.effective_potential());
  out += spin_orbit(Et, {kinetic_momentum(1, A, cfg.e), kinetic_momentum(2, A, cfg.e), kinetic_momentum(3, A, cfg.e)},
                    cfg.nu);
  out += DiffOp(cfg.mu * divergence(Et));
  return out;
}

DiffOp build_hamiltonian(const PotentialConfig& cfg, Variant variant) {
  return variant == Variant::SP ? build_sp_hamiltonian(cfg) : build_qrse_hamiltonian(cfg, variant);
}

DiffOp gauge_transform(const DiffOp& H, const Expr& phi) {
  const Expr I = Expr::imag_unit();
  return DiffOp(exp(-I * phi)) * H * DiffOp(exp(I * phi));
}

Vec3 gauge_shifted_pauli_field(const PotentialConfig& cfg, const Expr& phi) {
  Vec3 H = magnetic_field(cfg);
  Vec3 grad_phi = gradient(phi);
  Vec3 E = gradient(cfg.A0);
  Vec3 out;
  for (int a = 1; a <= 3; ++a) out[a - 1] = H[a - 1] - cfg.nu / cfg.g * cross(grad_phi, E, a);
  return out;
}

PotentialConfig gauge_shifted_config(const PotentialConfig& cfg, const Expr& phi) {
  PotentialConfig out = cfg;
  Expr shift = -phi / cfg.e;
  out.Ftilde = cfg.Ftilde ? *cfg.Ftilde + shift : shift;
  return out;
}

}  // namespace spinsym
