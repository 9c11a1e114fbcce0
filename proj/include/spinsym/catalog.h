#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinsym/verify.h"

namespace spinsym {

inline constexpr const char* kCatalogSchema = "spinsym.catalog/1";

/// Named generators: P0, P1..P3, L1..L3, J1..J3, G1..G3, D, A, Ap(w),
/// Bp(a, w), Bm(a, w), Q(h, c), Qt, Qhat, Qtil, QP. Q(h, c) is the rotating
/// spin symmetry for a constant field h along x3.
std::optional<DiffOp> library_generator(const std::string& name, const std::vector<Expr>& args);
OpResolver generator_resolver();
DiffOp parse_generator(const std::string& text, ParseContext& ctx);

enum class Expect { Pass, Fail };

struct GeneratorTemplate {
  std::string name;
  std::string op;
  /// Verified verdict per variant; defaults to pass.
  std::map<Variant, Expect> expect;
  /// Variants the generator applies to; empty means all.
  std::set<Variant> only;
  std::string note;

  bool applies(Variant v) const { return only.empty() || only.count(v) > 0; }
};

/// One encoding of a row: the literal reading or a corrected one.
struct Reading {
  std::string name;  // "as-printed" or "best-effort"
  nlohmann::json potential;
  std::vector<GeneratorTemplate> generators;
  std::string note;

  PotentialConfig config() const;
};

struct CatalogEntry {
  int table = 0;
  int row = 0;
  std::vector<Reading> readings;
  /// Index of the reading whose verdicts count.
  size_t primary = 0;
  /// Row verdict asserted by the source table per variant (pass means every
  /// applicable generator is a symmetry).
  std::map<Variant, Expect> claim;
  std::string note;

  std::string id() const { return "T" + std::to_string(table) + "." + std::to_string(row); }
  const Reading& primary_reading() const { return readings.at(primary); }
};

struct Catalog {
  std::vector<CatalogEntry> entries;
  std::map<int, std::string> titles;

  const CatalogEntry* find(int table, int row) const;
  size_t count(int table) const;
};

Catalog load_catalog(const std::string& dir = SPINSYM_DATA_DIR "/catalog");
Catalog load_catalog_files(const std::vector<std::string>& files);

struct GeneratorOutcome {
  GeneratorTemplate spec;
  VerificationReport report;
  bool expected_pass = true;
  bool matches_expected() const { return report.symmetry == expected_pass; }
};

struct ReadingOutcome {
  std::string name;
  std::vector<GeneratorOutcome> generators;
  bool all_symmetric() const;
  bool matches_expected() const;
};

struct EntryReport {
  std::string id;
  Variant variant = Variant::SP;
  std::vector<ReadingOutcome> readings;
  size_t primary = 0;

  std::optional<Expect> claim;

  bool verdict() const { return readings.at(primary).all_symmetric(); }
  bool matches_claim() const { return !claim || verdict() == (*claim == Expect::Pass); }
  bool matches_expected() const { return readings.at(primary).matches_expected(); }
  bool routes_agree() const;
  nlohmann::json to_json() const;
};

EntryReport verify_entry(const CatalogEntry& entry, Variant variant, const ZeroTestOptions& opt = {});

struct CatalogSummary {
  Variant variant = Variant::SP;
  std::vector<EntryReport> entries;
  size_t symmetric = 0;
  size_t matched = 0;
  size_t route_mismatches = 0;
  size_t claim_mismatches = 0;

  bool all_matched() const { return matched == entries.size() && route_mismatches == 0; }
  nlohmann::json to_json() const;
};

/// Entries run in parallel; results keep catalog order.
CatalogSummary verify_all(const Catalog& catalog, Variant variant, const ZeroTestOptions& opt = {},
                          unsigned threads = 0);

/// Each J_a generator of the primary reading with J_a replaced by L_a. The
/// replacement should fail exactly when the Pauli term does not commute
/// with s_a.
struct TheoremCheck {
  std::string id;
  std::string generator;
  std::string replaced;
  bool pauli_active = false;
  bool replaced_symmetric = false;
  bool consistent() const { return pauli_active != replaced_symmetric; }
};
std::vector<TheoremCheck> theorem_check(const Catalog& catalog, const ZeroTestOptions& opt = {});

struct ClosureElement {
  std::string name;
  DiffOp op;
  bool odd = false;
};

struct ClosureRelation {
  std::string left, right;
  bool anti = false;
  bool closed = false;
  /// Coefficients over the input elements and "1".
  std::map<std::string, std::complex<double>> coefficients;
  std::string text() const;
};

struct ClosureTable {
  std::vector<ClosureRelation> relations;
  bool closed() const;
  nlohmann::json to_json() const;
};

/// Pairwise brackets ([,] unless both elements are odd) expanded in the
/// span of the inputs plus the identity. Coefficients are fitted numerically,
/// snapped to rationals and confirmed by is_zero_op.
ClosureTable closure(const std::vector<ClosureElement>& elements, const ZeroTestOptions& opt = {});

enum class VecPot { Zero, Axial };

struct SuperintegrableOptions {
  Expr nu = Expr(1);
  Expr g = Expr(1);
  Expr e = Expr(1);
  VecPot vecpot = VecPot::Zero;
  /// Scalar potential factor c in A0 = c ln r; defaults to 1/(2 nu).
  std::optional<Expr> log_factor;
  /// Radial exponent k of A^a = eps_abc phi^b x_c / r^k for the axial
  /// choice phi = (0, 0, 1); defaults to 1 + nu + 1/g.
  std::optional<Expr> exponent;
};

struct SuperintegrableReport {
  PotentialConfig config;
  std::vector<std::pair<std::string, VerificationReport>> checks;
  /// Potential-independent identities of the integrals.
  std::vector<std::pair<std::string, bool>> relations;
  /// Integrals the system is claimed to keep: all six for A = 0, Qhat and
  /// J3 for the axial vector potential.
  std::set<std::string> claimed;

  bool matches_claim() const;
  nlohmann::json to_json() const;
};

/// Commutators of Qhat, J1..J3, Qtil and QP with the H3 Hamiltonian, plus
/// {Qhat, Qtil} = 0, Qhat^2 = 1, Qtil^2 = J^2 + 1/4 and [QP, Qhat] = 0.
SuperintegrableReport verify_superintegrable(const SuperintegrableOptions& so, const ZeroTestOptions& opt = {});

}  // namespace spinsym
