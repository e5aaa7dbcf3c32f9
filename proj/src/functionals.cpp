#include "kgc/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>

#include "numfmt.hpp"

namespace kgc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sq(const ModeVector &v) { return v.squaredNorm(); }

} // namespace

MonotoneReport check_nondecreasing(std::span<const double> r, std::span<const double> values, double from,
                                   const SlackPolicy &slack) {
  MonotoneReport rep;
  std::size_t first = 0;
  while (first < r.size() && r[first] < from)
    ++first;
  for (std::size_t i = first; i < r.size(); ++i)
    rep.scale = std::max(rep.scale, std::abs(values[i]));
  const double allowed = slack.relative * rep.scale;
  for (std::size_t i = first + 1; i < r.size(); ++i) {
    const double step = values[i] - values[i - 1];
    ++rep.checked;
    if (rep.checked == 1 || step < rep.worst_step) {
      rep.worst_step = step;
      rep.worst_at = r[i];
    }
    if (!(step >= -allowed))
      rep.pass = false;
  }
  if (rep.checked == 0)
    rep.note = "fewer than two grid points beyond r=" + fmt_double(from);
  return rep;
}

double FunctionalContext::quad(const Eigen::MatrixXd &g, const ModeVector &v) const {
  return (v.adjoint() * g.cast<cplx>() * v)(0, 0).real();
}

double FunctionalContext::b_part(const ModeVector &v, double r) const {
  const auto lam = sys_.basis().eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    s += lam[std::size_t(i)] * std::norm(v[i]);
  return s / (r * r);
}

double FunctionalContext::mplus(const ModeVector &v, const ModeVector &dv, double r, Side side) const {
  return sq(dv) - quad(sys_.gram_Q0(r, side), v) - b_part(v, r);
}

double FunctionalContext::M(const ModeVector &v, const ModeVector &dv, double r, Side side) const {
  return sq(dv) - quad(sys_.gram_ReQ(r, side), v);
}

double FunctionalContext::N_scaled(const ModeVector &v, const ModeVector &dv, double m, double r, Side side) const {
  const ModeVector wt = dv + (m / r) * v;
  return sq(wt) - quad(sys_.gram_Q0(r, side), v) - b_part(v, r) + (m * (m + 1.0) - gauges_.F(r)) / (r * r) * sq(v);
}

double FunctionalContext::N(const ModeVector &v, const ModeVector &dv, double m, double r, Side side) const {
  return std::pow(r, 2.0 * m) * N_scaled(v, dv, m, r, side);
}

double FunctionalContext::surface(const ModeVector &v, const ModeVector &dv, double r, Side side) const {
  const auto &basis = sys_.basis();
  const double half = (basis.dimension() - 1) / 2.0;
  const double s = std::pow(r, -half);
  const CVector yv = basis.synthesize(v);
  const CVector ydv = basis.synthesize(dv);
  const auto nodes = basis.nodes();
  const auto w = basis.weights();
  double acc = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const cplx u = s * yv[Eigen::Index(q)];
    const cplx du = s * (ydv[Eigen::Index(q)] - (half / r) * yv[Eigen::Index(q)]);
    const double req = sys_.field().q_at(r, nodes[q], side).real();
    acc += w[q] * (std::norm(du) - req * std::norm(u));
  }
  return std::pow(r, 2.0 * half) * acc;
}

FunctionalSeries compute_series(const Trajectory &traj, const FunctionalContext &ctx, double m, double R1) {
  FunctionalSeries s;
  s.m = m;
  s.R1 = R1;
  const auto &gauges = ctx.gauges();
  const auto &field = ctx.system().field();
  const auto nodes = ctx.system().basis().nodes();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double r = traj.r[i];
    const auto &v = traj.v[i];
    const auto &dv = traj.dv[i];
    s.r.push_back(r);
    const double mp = ctx.mplus(v, dv, r);
    s.mplus.push_back(mp);
    s.M.push_back(ctx.M(v, dv, r));
    const double ns = ctx.N_scaled(v, dv, m, r);
    s.N_scaled.push_back(ns);
    s.N.push_back(std::pow(r, 2.0 * m) * ns);
    s.absV2.push_back(sq(v));
    s.absDV2.push_back(sq(dv));
    s.twoReVpV.push_back(2.0 * dv.dot(v).real());
    s.S.push_back(ctx.surface(v, dv, r));
    s.E.push_back(std::exp(gauges.integral_h(R1, r)) * mp);
    bool nonpos = true;
    for (const auto &w : nodes)
      nonpos = nonpos && field.Q(r, w).real() <= 0.0;
    s.ReQ_nonpositive.push_back(nonpos);
    s.case_flag.emplace_back();
  }
  return s;
}

void write_series_csv(std::ostream &out, const FunctionalSeries &s) {
  out << "r,Mplus,M,N_m,absV2,twoReVpV,S,E,case\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << fmt_double(s.r[i]) << ',' << fmt_double(s.mplus[i]) << ',' << fmt_double(s.M[i]) << ','
        << fmt_double(s.N[i]) << ',' << fmt_double(s.absV2[i]) << ',' << fmt_double(s.twoReVpV[i]) << ','
        << fmt_double(s.S[i]) << ',' << fmt_double(s.E[i]) << ',' << s.case_flag[i] << '\n';
  }
}

MonotoneReport verify_monotone_Mplus(const FunctionalSeries &series, const SlackPolicy &slack) {
  return check_nondecreasing(series.r, series.E, series.R1, slack);
}

std::vector<double> r2N_scaled(const Trajectory &traj, const FunctionalContext &ctx, double m) {
  std::vector<double> out;
  if (traj.size() == 0)
    return out;
  const double ref = traj.r.back();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double r = traj.r[i];
    out.push_back(std::pow(r / ref, 2.0 * m + 2.0) * ctx.N_scaled(traj.v[i], traj.dv[i], m, r));
  }
  return out;
}

std::span<const double> m_scan_values() {
  static const std::array<double, 9> values = {0.25, 0.5, 1, 2, 4, 8, 16, 32, 64};
  return {values.data(), 9};
}

M0R0Report find_m0_r0(const Trajectory &traj, const FunctionalContext &ctx, const AuditReport &audit,
                      const SlackPolicy &slack) {
  M0R0Report rep;
  const auto &field = ctx.system().field();
  const auto dirs = sample_directions(ctx.system().basis(), field);
  std::optional<double> r0;
  for (std::size_t i = traj.size(); i-- > 0;) {
    const double r = traj.r[i];
    if (r >= audit.threshold && r * r * p_of_r(field, r, dirs) >= 2.0 * audit.c1)
      r0 = r;
    else
      break;
  }
  rep.r0 = r0;
  rep.c2_gauge = std::sqrt(2.0 * audit.c0) + std::sqrt(2.0);
  rep.m0_analytic = (rep.c2_gauge * rep.c2_gauge - 1.0) / 2.0;
  if (!r0) {
    rep.note = "r^2 p(r) >= 2 c1 not reached on the audited part of the grid";
    return rep;
  }
  for (double m : m_scan_values()) {
    const auto vals = r2N_scaled(traj, ctx, m);
    auto mono = check_nondecreasing(traj.r, vals, *r0, slack);
    if (mono.pass && !rep.m0_empirical)
      rep.m0_empirical = m;
    rep.scan.emplace_back(m, std::move(mono));
  }
  if (!rep.m0_empirical)
    rep.note = "no m up to 64 makes r^2 N nondecreasing; scan not extended";
  return rep;
}

std::string_view to_string(DichotomyVerdict::Case c) {
  switch (c) {
  case DichotomyVerdict::Case::I:
    return "I";
  case DichotomyVerdict::Case::II:
    return "II";
  case DichotomyVerdict::Case::Inconclusive:
    return "inconclusive";
  }
  return "?";
}

M1Choice choose_m1(const Trajectory &traj, const FunctionalContext &ctx, double m0, double r0) {
  M1Choice c;
  std::size_t i1 = traj.size();
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj.r[i] >= r0 && traj.v[i].norm() > 0.0) {
      i1 = i;
      break;
    }
  if (i1 == traj.size())
    return c;
  c.r1 = traj.r[i1];
  for (int k = 0; k <= 8; ++k) {
    const double m = m0 * std::pow(2.0, k);
    if (ctx.N_scaled(traj.v[i1], traj.dv[i1], m, c.r1) > 0.0) {
      c.found = true;
      c.m1 = m;
      break;
    }
  }
  if (!c.found)
    return c;
  c.positive_tail = true;
  for (std::size_t i = i1; i < traj.size(); ++i)
    c.positive_tail = c.positive_tail && ctx.N_scaled(traj.v[i], traj.dv[i], c.m1, traj.r[i]) > 0.0;
  return c;
}

DichotomyVerdict classify_case(FunctionalSeries &s, const std::function<double(double)> &F, double m1, double r1) {
  DichotomyVerdict d;
  d.m1 = m1;
  d.r1 = r1;
  const std::size_t n = s.size();
  constexpr std::size_t min_points = 30;
  if (n < min_points) {
    d.reason = "trajectory too short to classify: " + std::to_string(n) + " grid points, need at least " +
               std::to_string(min_points);
    return d;
  }
  std::vector<bool> case1(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rhs = F(s.r[i]) * s.absV2[i] / (2.0 * m1 * s.r[i]);
    case1[i] = s.twoReVpV[i] <= rhs;
    s.case_flag[i] = case1[i] ? "I" : "II";
  }
  const std::size_t third = 2 * n / 3;
  bool trivial = true;
  for (std::size_t i = third; i < n; ++i)
    trivial = trivial && s.absV2[i] == 0.0;
  if (trivial) {
    d.reason = "inconclusive (trivial tail): v vanishes on the final third of the grid";
    return d;
  }
  for (std::size_t i = third; i < n; ++i)
    if (case1[i] && s.r[i] >= r1) {
      ++d.case1_count_final_third;
      d.witnesses.push_back(s.r[i]);
    }

  if (d.case1_count_final_third >= 10) {
    d.kind = DichotomyVerdict::Case::I;
    d.reason = std::to_string(d.case1_count_final_third) + " radii in the final third satisfy 2Re(v',v) <= F|v|^2/(2 m1 r)";
    // N(v, m1, r) <= r^{2 m1} {M+(v, r) + (m1(2m1+1) - F/2) r^-2 |v|^2} at every witness.
    d.mplus_tail_horizon = std::exp(2.0 * m1 * (2.0 * m1 + 1.0));
    for (std::size_t i = third; i < n; ++i) {
      if (!case1[i] || s.r[i] < r1)
        continue;
      const double r = s.r[i];
      const double rhs = s.mplus[i] + (m1 * (2.0 * m1 + 1.0) - 0.5 * F(r)) / (r * r) * s.absV2[i];
      const double scale = std::max({std::abs(rhs), std::abs(s.N_scaled[i]), 1e-300});
      if (s.N_scaled[i] > rhs + 1e-10 * scale)
        d.n_bound_pass = false;
      if (r > d.mplus_tail_horizon) {
        d.mplus_tail_checked = true;
        d.mplus_tail_radii.push_back(r);
        if (!(s.mplus[i] > 0.0))
          d.mplus_tail_pass = false;
      }
    }
    return d;
  }

  if (d.case1_count_final_third == 0) {
    std::size_t last1 = 0;
    bool any = false;
    for (std::size_t i = 0; i < n; ++i)
      if (case1[i] && s.r[i] >= r1) {
        last1 = i;
        any = true;
      }
    std::size_t i2 = any ? last1 + 1 : 0;
    while (i2 < n && s.r[i2] <= r1)
      ++i2;
    if (i2 >= n) {
      d.reason = "no grid radius beyond r1";
      return d;
    }
    d.kind = DichotomyVerdict::Case::II;
    d.r2 = s.r[i2];
    d.reason = "2Re(v',v) > F|v|^2/(2 m1 r) at every grid radius from r2=" + fmt_double(d.r2);

    // Growth chain from r4, where F/(2 m1) >= 2.
    std::size_t i4 = i2;
    while (i4 < n && F(s.r[i4]) / (2.0 * m1) < 2.0)
      ++i4;
    if (i4 == n) {
      d.growth_failures.push_back("F/(2 m1) >= 2 not reached on the grid (needs F >= " + fmt_double(4.0 * m1) + ")");
      return d;
    }
    d.r4 = s.r[i4];
    std::size_t i3 = i4;
    while (i3 < n && s.absV2[i3] == 0.0)
      ++i3;
    if (i3 == n)
      return d;
    d.growth_checked = true;
    d.r3 = s.r[i3];
    d.c2_bound = s.absV2[i3] / (d.r3 * d.r3);
    d.ReQ_nonpositive = true;
    for (std::size_t i = i3; i < n; ++i)
      d.ReQ_nonpositive = d.ReQ_nonpositive && s.ReQ_nonpositive[i];
    constexpr double rel = 1e-9;
    for (std::size_t i = i4; i < n; ++i) {
      const double r = s.r[i];
      const double v2 = s.absV2[i];
      auto fail = [&](const std::string &what) {
        d.growth_pass = false;
        if (d.growth_failures.size() < 5)
          d.growth_failures.push_back(what + " at r=" + fmt_double(r));
      };
      if (s.twoReVpV[i] < 2.0 * v2 / r * (1.0 - rel))
        fail("d|v|^2/dr >= 2|v|^2/r");
      if (v2 / (r * r) > s.absDV2[i] * (1.0 + rel))
        fail("|v|/r <= |v'|");
      if (i >= i3 && v2 / (r * r) < d.c2_bound * (1.0 - rel))
        fail("|v|^2/r^2 >= |v(r3)|^2/r3^2");
      if (i >= i3 && d.ReQ_nonpositive && s.M[i] < d.c2_bound * (1.0 - rel))
        fail("M >= c2");
    }
    return d;
  }

  d.reason = std::to_string(d.case1_count_final_third) +
             " radii in the final third satisfy the Case I inequality (need 10 for Case I, 0 for Case II); extend the window "
             "beyond r=" +
             fmt_double(2.0 * s.r.back() - s.r.front());
  return d;
}

std::optional<double> find_R3(const CoefficientField &field, std::span<const Direction> dirs,
                              std::span<const double> grid) {
  const double c = (double(field.dimension) * field.dimension - 1.0) / 4.0;
  std::optional<double> R3;
  for (std::size_t i = grid.size(); i-- > 0;) {
    const double r = grid[i];
    bool ok = true;
    for (const auto &w : dirs)
      ok = ok && (-r * r * field.q_at(r, w).real() - c > 0.0);
    if (!ok)
      break;
    R3 = r;
  }
  return R3;
}

DichotomyReport dichotomy_experiment(FunctionalSeries &s, const Trajectory &traj, const FunctionalContext &ctx,
                                     const AuditReport &audit, double m1, double r1) {
  DichotomyReport rep;
  rep.verdict = classify_case(s, ctx.gauges().F, m1, r1);
  const std::size_t n = s.size();
  if (n == 0) {
    rep.summary = "empty series";
    return rep;
  }
  const std::size_t half = n / 2;
  rep.tail_from = s.r[half];
  rep.tail_inf_M = *std::min_element(s.M.begin() + std::ptrdiff_t(half), s.M.end());
  rep.M_start = s.M.front();

  const auto dirs = sample_directions(ctx.system().basis(), ctx.system().field());
  const auto R3 = find_R3(ctx.system().field(), dirs, traj.r);
  rep.R3_found = R3.has_value();
  rep.R3 = R3.value_or(inf);

  // M <= 2 S beyond R3; margin stored in worst_step.
  auto bound = [&](double from, auto &&margin) {
    MonotoneReport m;
    for (std::size_t i = 0; i < n; ++i)
      if (s.r[i] >= from)
        m.scale = std::max({m.scale, std::abs(s.M[i]), std::abs(s.S[i]), std::abs(s.mplus[i])});
    for (std::size_t i = 0; i < n; ++i) {
      if (s.r[i] < from)
        continue;
      ++m.checked;
      const double g = margin(i);
      if (g < m.worst_step || m.checked == 1) {
        m.worst_step = g;
        m.worst_at = s.r[i];
      }
    }
    return m;
  };
  rep.surface_bound = bound(rep.R3, [&](std::size_t i) { return 2.0 * s.S[i] - s.M[i]; });
  rep.surface_bound.pass = rep.R3_found && rep.surface_bound.worst_step >= -1e-9 * rep.surface_bound.scale;
  if (!rep.R3_found)
    rep.surface_bound.note = "-r^2 Re q > (N^2-1)/4 not reached on the grid";

  const double beta = audit.beta;
  rep.beta_chain = bound(audit.threshold, [&](std::size_t i) { return s.M[i] - beta * s.mplus[i]; });
  rep.beta_chain.pass = std::isfinite(beta) && rep.beta_chain.worst_step >= -1e-10 * rep.beta_chain.scale;

  // M >= c3 beyond R2.
  std::size_t i2 = 0;
  while (i2 < n && (s.r[i2] < audit.threshold || !(s.mplus[i2] > 0.0)))
    ++i2;
  if (i2 < n) {
    rep.R2p = s.r[i2];
    rep.c3p = beta * std::exp(-ctx.gauges().integral_h(rep.R2p, inf)) * s.mplus[i2];
    rep.c3 = rep.c3p;
    rep.R2 = rep.R2p;
    if (rep.verdict.kind == DichotomyVerdict::Case::II && rep.verdict.growth_checked &&
        rep.verdict.ReQ_nonpositive) {
      rep.c3 = std::min(rep.c3p, rep.verdict.c2_bound);
      rep.R2 = std::max(rep.R2p, rep.verdict.r3);
    }
    rep.lower_bound_holds = rep.c3 > 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (s.r[i] >= rep.R2 && s.M[i] < rep.c3 * (1.0 - 1e-8))
        rep.lower_bound_holds = false;
  }

  rep.compact_support_triggered = !(rep.tail_inf_M >= 1e-6 * rep.M_start);
  rep.pass = !rep.compact_support_triggered && rep.surface_bound.pass && rep.beta_chain.pass && rep.lower_bound_holds &&
             rep.verdict.consequences_pass();
  rep.summary = "case " + std::string(to_string(rep.verdict.kind)) + "; tail inf M=" + fmt_double(rep.tail_inf_M) +
                " over r>=" + fmt_double(rep.tail_from) + "; R3=" + fmt_double(rep.R3) + "; c3=" + fmt_double(rep.c3) +
                " beyond R2=" + fmt_double(rep.R2) +
                (rep.pass ? "; S(r) >= M/2 >= c3/2 > 0 beyond R3, so liminf of the surface integral is positive"
                          : "");
  return rep;
}

Prop24Report verify_prop24(const RadialSystem &sys, const EtaPath &eta, std::span<const Bump> bumps, double tol) {
  Prop24Report rep;
  const auto &breaks = sys.restart_radii();
  auto f = [&](double r) {
    const ModeVector e = eta.eta(r);
    return (e.adjoint() * sys.gram_Q0(r).cast<cplx>() * e)(0, 0).real();
  };
  auto g0 = [&](double r) {
    const ModeVector e = eta.eta(r);
    const ModeVector de = eta.deta(r);
    const CMatrix c0 = sys.gram_Q0(r).cast<cplx>();
    const CMatrix c0r = sys.gram_Q0r(r).cast<cplx>();
    return (e.adjoint() * c0r * e)(0, 0).real() + 2.0 * (de.adjoint() * c0 * e)(0, 0).real();
  };
  for (const auto &phi : bumps) {
    if (phi.lo() < sys.r_start() || phi.hi() > sys.r_end())
      throw InvalidArgument("verify_prop24: bump support leaves the system interval");
    Prop24Sample smp;
    smp.center = phi.center();
    smp.half_width = phi.half_width();
    smp.lhs = -integrate_against_derivative(f, breaks, phi);
    smp.rhs = integrate_against(g0, breaks, phi);
    const double excess = smp.lhs - smp.rhs;
    rep.worst_excess = rep.samples.empty() ? excess : std::max(rep.worst_excess, excess);
    if (excess > tol)
      rep.pass = false;
    rep.samples.push_back(smp);
  }
  return rep;
}

} // namespace kgc
