#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgc/coefficients.hpp"
#include "kgc/sphere_basis.hpp"

namespace kgc {

enum class Verdict { Pass, PassBeyondThreshold, Fail, Inconclusive, NotApplicable };

std::string_view to_string(Verdict v);

/// Concrete sample point backing a verdict.
struct Witness {
  double r = 0.0;
  Direction omega{0.0, 0.0, 0.0};
  std::vector<std::pair<std::string, double>> values;

  std::string describe() const;
};

struct ClauseResult {
  std::string id;
  std::string statement;
  Verdict verdict = Verdict::Pass;
  double r_lo = 0.0;
  double r_hi = 0.0;
  /// Smallest grid radius beyond which the clause held at every sample.
  double threshold = 0.0;
  /// Smallest (rhs - lhs) seen over the whole grid; negative means violated somewhere.
  double worst_margin = 0.0;
  /// Last violation when the clause failed anywhere, otherwise the tightest sample.
  std::optional<Witness> witness;
  std::string note;

  bool holds() const { return verdict == Verdict::Pass || verdict == Verdict::PassBeyondThreshold; }
};

namespace clause {
inline constexpr std::string_view q0_nonpositive = "Q0-nonpositive";
inline constexpr std::string_view right_limit = "right-limit";
inline constexpr std::string_view dominance = "dominance";
inline constexpr std::string_view h_bound = "h-bound";
inline constexpr std::string_view a2_le_b = "a2-le-b";
inline constexpr std::string_view F_c0 = "F-c0";
inline constexpr std::string_view F_unbounded = "F-unbounded";
inline constexpr std::string_view Fr_c1 = "Fr-c1";
inline constexpr std::string_view h_integrable = "h-integrable";
inline constexpr std::string_view beta = "beta";
inline constexpr std::string_view divergence = "divergence";
inline constexpr std::string_view decay = "decay";
} // namespace clause

/// Hypothesis groups the downstream checks are gated on.
namespace hypotheses {
inline constexpr std::string_view basic[] = {clause::q0_nonpositive, clause::right_limit, clause::dominance,
                                             clause::h_bound, clause::a2_le_b};
inline constexpr std::string_view gauge_F[] = {clause::F_c0, clause::F_unbounded, clause::Fr_c1};
inline constexpr std::string_view lower_bound[] = {clause::h_integrable, clause::beta};
inline constexpr std::string_view growth[] = {clause::divergence};
inline constexpr std::string_view prop43[] = {clause::q0_nonpositive, clause::h_bound, clause::a2_le_b,
                                              clause::F_c0};
} // namespace hypotheses

struct AuditReport {
  std::vector<ClauseResult> clauses;
  std::vector<double> radii;
  std::vector<double> a, b, p;
  /// Joint threshold: max over clauses that hold.
  double threshold = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;

  const ClauseResult *find(std::string_view id) const;
  /// Every listed clause present and holding.
  bool holds(std::span<const std::string_view> ids) const;
  /// Union of all hypothesis groups (decay excluded: it only applies to potential families).
  bool full() const;
  /// Clause ids from the list that do not hold.
  std::vector<std::string> unmet(std::span<const std::string_view> ids) const;
};

struct AuditOptions {
  /// Tolerance for the dominated difference quotient.
  double dominance_tol = 1e-10;
  /// Tolerance for Q0r(x; h) -> Q0r(x), compared at h = h0 / limit_divisor.
  double limit_tol = 1e-6;
  double limit_divisor = 1024;
  double decay_rel_tol = 1e-9;
};

/// Samples every clause on grid x (quadrature nodes + field probes) and fills
/// gauges.c0, c1 and beta with the certified constants.
AuditReport audit_assumptions(const CoefficientField &field, RadialGauges &gauges, std::span<const double> grid,
                              const SphereBasis &basis, const AuditOptions &options = {});

/// Threshold rule shared by sampled clauses: R* = first grid radius past the
/// last violation; a violation in the outer half of the window is a failure.
struct ThresholdVerdict {
  Verdict verdict;
  double threshold;
};
ThresholdVerdict threshold_verdict(std::span<const double> grid, std::optional<double> last_violation);

struct Prop43Result {
  std::vector<ClauseResult> inequalities;
  bool pass() const;
};

/// The three consequences r^2h^2b <= 2p, (r sup|Q1|)^2 <= 2p, r^{-2}F^2 <= 2 c0 p
/// at every grid radius >= from_radius. A violation exceeding slack*max(1, 2p) fails.
Prop43Result check_prop43(const CoefficientField &field, const RadialGauges &gauges, std::span<const double> grid,
                          const SphereBasis &basis, double from_radius, double slack);

} // namespace kgc
