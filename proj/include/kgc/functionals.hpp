#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgc/audit.hpp"
#include "kgc/dist_calc.hpp"
#include "kgc/radial_system.hpp"

namespace kgc {

/// One relative slack for every monotonicity check: a drop is tolerated when
/// it is no larger than relative * max |value| over the checked range.
struct SlackPolicy {
  double relative = 1e-8;
};

struct MonotoneReport {
  bool pass = true;
  std::size_t checked = 0;
  /// Smallest consecutive increment and where it ends.
  double worst_step = 0.0;
  double worst_at = 0.0;
  double scale = 0.0;
  std::string note;
};

/// values nondecreasing over r >= from, consecutive pairs only.
MonotoneReport check_nondecreasing(std::span<const double> r, std::span<const double> values, double from,
                                   const SlackPolicy &slack);

/// Evaluates the functionals on (v, v') at radius r from a radial system.
class FunctionalContext {
public:
  FunctionalContext(const RadialSystem &system, const RadialGauges &gauges) : sys_(system), gauges_(gauges) {}

  /// |v'|^2 - (C0 v, v) - |B^{1/2} v|^2
  double mplus(const ModeVector &v, const ModeVector &dv, double r, Side side = Side::Above) const;
  /// |v'|^2 - (C_R v, v)
  double M(const ModeVector &v, const ModeVector &dv, double r, Side side = Side::Above) const;
  /// N(v, m, r) with w = r^m v, w' = r^m v' + m r^{m-1} v.
  double N(const ModeVector &v, const ModeVector &dv, double m, double r, Side side = Side::Above) const;
  /// r^{-2m} N(v, m, r), free of the r^{2m} factor.
  double N_scaled(const ModeVector &v, const ModeVector &dv, double m, double r, Side side = Side::Above) const;
  /// r^{N-1} * integral over the unit sphere of |du/dr|^2 - Re q |u|^2.
  double surface(const ModeVector &v, const ModeVector &dv, double r, Side side = Side::Above) const;

  const RadialSystem &system() const { return sys_; }
  const RadialGauges &gauges() const { return gauges_; }

private:
  double quad(const Eigen::MatrixXd &g, const ModeVector &v) const;
  double b_part(const ModeVector &v, double r) const;

  const RadialSystem &sys_;
  const RadialGauges &gauges_;
};

struct FunctionalSeries {
  double m = 1.0;
  double R1 = 0.0;
  std::vector<double> r;
  std::vector<double> mplus, M, N, N_scaled, absV2, absDV2, twoReVpV, S, E;
  /// Re Q <= 0 at every node on this sphere.
  std::vector<bool> ReQ_nonpositive;
  /// Per-point marker: "I" when 2Re(v',v) <= F|v|^2/(2 m1 r), "II" otherwise, empty before classification.
  std::vector<std::string> case_flag;

  std::size_t size() const { return r.size(); }
};

/// Series along a trajectory; E(r) = exp(int_{R1}^r h) M+(v, r).
FunctionalSeries compute_series(const Trajectory &traj, const FunctionalContext &ctx, double m, double R1);

/// Columns r, Mplus, M, N_m, absV2, twoReVpV, S, E, case.
void write_series_csv(std::ostream &out, const FunctionalSeries &series);

/// E(r) nondecreasing for r >= R1, i.e. M+(v, r) >= exp(-int_{R1}^r h) M+(v, R1).
MonotoneReport verify_monotone_Mplus(const FunctionalSeries &series, const SlackPolicy &slack);

/// r^2 N(v, m, r), rescaled by a positive constant so it stays finite for large m.
std::vector<double> r2N_scaled(const Trajectory &traj, const FunctionalContext &ctx, double m);

struct M0R0Report {
  /// Smallest grid radius beyond the audit threshold with r^2 p(r) >= 2 c1 from there on.
  std::optional<double> r0;
  double c2_gauge = 0.0;
  /// (c2^2 - 1)/2: r^2 N nondecreasing for m above it by the discriminant of the quadratic form.
  double m0_analytic = 0.0;
  /// Smallest scanned m with r^2 N nondecreasing on [r0, r_end]; empty if none up to 64.
  std::optional<double> m0_empirical;
  std::vector<std::pair<double, MonotoneReport>> scan;
  std::string note;
};

std::span<const double> m_scan_values();

M0R0Report find_m0_r0(const Trajectory &traj, const FunctionalContext &ctx, const AuditReport &audit,
                      const SlackPolicy &slack);

struct DichotomyVerdict {
  enum class Case { I, II, Inconclusive };

  Case kind = Case::Inconclusive;
  std::string reason;
  double m1 = 0.0;
  double r1 = 0.0;
  std::size_t case1_count_final_third = 0;
  std::vector<double> witnesses;
  /// Case II: radius after which the Case II inequality holds at every grid point.
  double r2 = 0.0;

  // Case I consequences.
  bool mplus_tail_checked = false;
  bool mplus_tail_pass = true;
  double mplus_tail_horizon = 0.0;
  std::vector<double> mplus_tail_radii;
  bool n_bound_pass = true;

  // Case II consequences.
  bool growth_checked = false;
  bool growth_pass = true;
  double r3 = 0.0;
  double r4 = 0.0;
  double c2_bound = 0.0;
  bool ReQ_nonpositive = false;
  std::vector<std::string> growth_failures;

  bool consequences_pass() const { return mplus_tail_pass && n_bound_pass && growth_pass; }
};

std::string_view to_string(DichotomyVerdict::Case c);

/// Smallest m = m0 * 2^k (k <= 8) with N(v, m, r1) > 0 at the first r1 >= r0 where |v| > 0,
/// and N(v, m1, r) > 0 verified on [r1, r_end].
struct M1Choice {
  bool found = false;
  double m1 = 0.0;
  double r1 = 0.0;
  bool positive_tail = false;
};
M1Choice choose_m1(const Trajectory &traj, const FunctionalContext &ctx, double m0, double r0);

/// Classifies Case I / II on the grid; marks series.case_flag.
DichotomyVerdict classify_case(FunctionalSeries &series, const std::function<double(double)> &F, double m1,
                               double r1);

struct DichotomyReport {
  DichotomyVerdict verdict;
  double tail_inf_M = 0.0;
  double tail_from = 0.0;
  double M_start = 0.0;
  double R3 = 0.0;
  bool R3_found = false;
  MonotoneReport surface_bound;
  /// M >= beta M+ with the audited beta.
  MonotoneReport beta_chain;
  double R2p = 0.0;
  double c3p = 0.0;
  double c3 = 0.0;
  double R2 = 0.0;
  bool lower_bound_holds = false;
  bool compact_support_triggered = false;
  bool pass = false;
  std::string summary;
};

/// The tail of M stays bounded below, S >= M/2 beyond R3, and M >= beta M+.
DichotomyReport dichotomy_experiment(FunctionalSeries &series, const Trajectory &traj, const FunctionalContext &ctx,
                                     const AuditReport &audit, double m1, double r1);

/// Smallest grid radius with -r^2 Re q - (N^2-1)/4 > 0 on the sampled sphere for it and every later grid radius.
std::optional<double> find_R3(const CoefficientField &field, std::span<const Direction> dirs,
                              std::span<const double> grid);

/// A C^1 path eta(r) in the truncated X with its derivative.
struct EtaPath {
  std::function<ModeVector(double)> eta;
  std::function<ModeVector(double)> deta;
};

struct Prop24Sample {
  double center = 0.0;
  double half_width = 0.0;
  /// -int f phi' (the distributional derivative of f = (C0 eta, eta) tested on phi).
  double lhs = 0.0;
  /// int ((C0r eta, eta) + 2 Re (C0 eta, eta')) phi.
  double rhs = 0.0;
};

struct Prop24Report {
  std::vector<Prop24Sample> samples;
  double worst_excess = 0.0;
  bool pass = true;
};

/// Tests <g, phi> <= <g0, phi> on nonnegative bumps inside [lo, hi].
Prop24Report verify_prop24(const RadialSystem &system, const EtaPath &eta, std::span<const Bump> bumps,
                           double tol = 1e-8);

} // namespace kgc
