#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgc/audit.hpp"
#include "kgc/media.hpp"

namespace kgc {

/// Schema or range violation in a scenario file.
struct ConfigError : Error {
  using Error::Error;
};

enum class FamilyKind { ConstantK, Example61, Shells, Slabs, Tabulated };

struct FamilySpec {
  FamilyKind kind = FamilyKind::ConstantK;
  /// constant-k: q = -k^2.
  double k = 1.0;
  /// example61: constant lambda.
  double lambda = 1.0;
  double epsilon = 0.5;
  std::optional<double> m0;
  PowerLaw long_range;
  ComplexPowerLaw short_range;
  /// shells / slabs.
  std::vector<double> interfaces;
  std::vector<double> nu;
  /// tabulated lambda(r); a repeated radius marks a jump.
  TabulatedProfile profile;
};

struct GaugeSpec {
  enum class Kind { Family, Power, Kato };
  Kind kind = Kind::Family;
  double epsilon = 0.5;
};

struct InitialSpec {
  enum class Kind { Unit, Random, Explicit };
  Kind kind = Kind::Unit;
  std::vector<cplx> v;
  std::vector<cplx> dv;
};

namespace checks {
inline constexpr std::string_view audit = "audit";
inline constexpr std::string_view monotone_Mplus = "monotone-Mplus";
inline constexpr std::string_view r2N = "r2N";
inline constexpr std::string_view classify = "classify";
inline constexpr std::string_view dichotomy = "dichotomy";
inline constexpr std::string_view prop43 = "prop43";
inline constexpr std::string_view lemma_a = "lemmaA-suite";
} // namespace checks

struct Scenario {
  std::string name = "scenario";
  int dimension = 3;
  int cutoff = 0;
  /// Quadrature exactness degree; -1 picks the basis default.
  int angular_degree = -1;
  FamilySpec family;
  GaugeSpec gauges;
  double inner_radius = 0.5;
  double r_start = 1.0;
  double r_end = 50.0;
  /// Number of uniform grid radii after r_start.
  int grid = 490;
  double tolerance = 1e-9;
  std::uint64_t seed = 20240607;
  /// Relative slack for monotonicity checks; 0 also makes the consistency checks exact.
  double slack = 1e-8;
  InitialSpec initial;
  std::vector<std::string> checks{std::string(checks::audit)};
  /// m used for the N column when no m1 is chosen.
  double m = 1.0;
  int lemma_instances = 100;
  int lemma_constructed = 10;

  /// Throws ConfigError.
  void validate() const;
  bool wants(std::string_view check) const;
  std::vector<double> grid_radii() const;
  /// Canonical text form; hashed into the report.
  std::string canonical() const;
};

Scenario parse_scenario(const std::string &text);
Scenario load_scenario(const std::filesystem::path &path);

/// Built-in suite: kato, example61, two-shell, four-shell, slabs.
const std::vector<Scenario> &scenario_catalog();

std::uint64_t fnv1a64(std::string_view bytes);

/// Field and gauges for the scenario's family, gauge selection applied.
FieldAndGauges build_family(const Scenario &s);

enum class CheckStatus { Pass, Fail, Skipped, Inconclusive };
std::string_view to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::vector<std::string> details;
};

struct RunReport {
  std::string scenario;
  std::string version;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_time = 0.0;
  std::optional<AuditReport> audit;
  bool audit_failed = false;
  std::vector<CheckResult> checks;
  /// CSV bodies keyed by file name; written by emit().
  std::vector<std::pair<std::string, std::string>> csv;
  std::vector<std::string> artifacts;

  /// 0 all passed, 2 a non-audit check failed, 3 audit failed or checks skipped.
  int exit_code() const;
  std::string summary() const;
};

RunReport run(const Scenario &s);
/// Writes trajectory.csv, series.csv and summary.txt into dir.
void emit(RunReport &report, const std::filesystem::path &dir);

std::string_view version();

} // namespace kgc
