#include "kgc/audit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "numfmt.hpp"

namespace kgc {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using Values = std::vector<std::pair<std::string, double>>;

// Collects samples of one clause: margin >= 0 means satisfied.
class Tracker {
public:
  Tracker(std::string_view id, std::string statement) {
    res_.id = std::string(id);
    res_.statement = std::move(statement);
    res_.worst_margin = inf;
  }

  template <class MakeValues> void sample(double r, const Direction &w, double margin, MakeValues &&values) {
    if (!(margin >= 0.0)) {
      if (!last_ || r >= *last_) {
        last_ = r;
        res_.witness = Witness{r, w, values()};
      }
    } else if (!last_ && margin < res_.worst_margin) {
      res_.witness = Witness{r, w, values()};
    }
    if (std::isnan(margin))
      res_.worst_margin = -inf;
    else
      res_.worst_margin = std::min(res_.worst_margin, margin);
  }

  std::optional<double> last_violation() const { return last_; }

  ClauseResult finish(std::span<const double> grid) {
    const auto tv = threshold_verdict(grid, last_);
    res_.verdict = tv.verdict;
    res_.threshold = tv.threshold;
    res_.r_lo = grid.front();
    res_.r_hi = grid.back();
    if (res_.worst_margin == inf)
      res_.worst_margin = 0.0;
    return res_;
  }

private:
  ClauseResult res_;
  std::optional<double> last_;
};

ClauseResult analytic(std::string_view id, std::string statement, Verdict v, std::span<const double> grid,
                      std::string note) {
  ClauseResult c;
  c.id = std::string(id);
  c.statement = std::move(statement);
  c.verdict = v;
  c.r_lo = grid.front();
  c.r_hi = grid.back();
  c.threshold = grid.front();
  c.note = std::move(note);
  return c;
}

bool near_break(const std::vector<double> &breaks, double r, double h) {
  for (double b : breaks)
    if (b > r - 1e-12 * r && b <= r + h)
      return true;
  return false;
}

} // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
  case Verdict::Pass:
    return "pass";
  case Verdict::PassBeyondThreshold:
    return "pass-beyond-threshold";
  case Verdict::Fail:
    return "fail";
  case Verdict::Inconclusive:
    return "inconclusive";
  case Verdict::NotApplicable:
    return "not-applicable";
  }
  return "?";
}

std::string Witness::describe() const {
  std::ostringstream os;
  os << "r=" << fmt_double(r) << " omega=(" << fmt_double(omega[0]) << "," << fmt_double(omega[1]) << ","
     << fmt_double(omega[2]) << ")";
  for (const auto &[k, v] : values)
    os << " " << k << "=" << fmt_double(v);
  return os.str();
}

const ClauseResult *AuditReport::find(std::string_view id) const {
  for (const auto &c : clauses)
    if (c.id == id)
      return &c;
  return nullptr;
}

bool AuditReport::holds(std::span<const std::string_view> ids) const { return unmet(ids).empty(); }

std::vector<std::string> AuditReport::unmet(std::span<const std::string_view> ids) const {
  std::vector<std::string> out;
  for (auto id : ids) {
    const auto *c = find(id);
    if (!c || !c->holds())
      out.emplace_back(id);
  }
  return out;
}

bool AuditReport::full() const {
  return holds(hypotheses::basic) && holds(hypotheses::gauge_F) && holds(hypotheses::lower_bound) &&
         holds(hypotheses::growth);
}

ThresholdVerdict threshold_verdict(std::span<const double> grid, std::optional<double> last_violation) {
  if (!last_violation)
    return {Verdict::Pass, grid.front()};
  const auto it = std::upper_bound(grid.begin(), grid.end(), *last_violation);
  const double threshold = it == grid.end() ? inf : *it;
  const double mid = 0.5 * (grid.front() + grid.back());
  if (*last_violation >= mid)
    return {Verdict::Fail, threshold};
  return {Verdict::PassBeyondThreshold, threshold};
}

AuditReport audit_assumptions(const CoefficientField &field, RadialGauges &gauges, std::span<const double> grid,
                              const SphereBasis &basis, const AuditOptions &opt) {
  if (grid.empty())
    throw InvalidArgument("audit: empty radius grid");
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw InvalidArgument("audit: radius grid must be sorted");
  if (!(grid.front() > field.inner_radius))
    throw InvalidArgument("audit: grid starts at r=" + fmt_double(grid.front()) +
                          ", not beyond the inner radius R0=" + fmt_double(field.inner_radius));

  const auto dirs = sample_directions(basis, field);
  AuditReport rep;
  rep.radii.assign(grid.begin(), grid.end());
  rep.epsilon = gauges.epsilon;
  const std::size_t n = grid.size();

  Tracker q0np(clause::q0_nonpositive, "Q0(x) <= 0");
  Tracker rl(clause::right_limit, "r -> (Q0(r.)phi, phi) right-continuous with right limits");
  Tracker dom(clause::dominance, "(Q0(r+h) - Q0(r))/h <= Q0r(x;h), Q0r(x;h) -> Q0r(x)");
  Tracker hb(clause::h_bound, "0 < h(r) <= 2/r");
  Tracker ab(clause::a2_le_b, "a(r)^2 <= b(r)");
  Tracker fr(clause::Fr_c1, "F_r(r) <= c1/r");
  Tracker div(clause::divergence, "r^2 inf Re(-q) positive, nondecreasing, unbounded");

  const double h0 = field.h0;
  const std::array<double, 3> hs = {h0 / 2, h0 / 4, h0 / 8};

  std::vector<double> F_ratio(n, 0.0);
  std::vector<bool> F_bad(n, false);
  double prev_g = -inf;

  for (std::size_t i = 0; i < n; ++i) {
    const double r = grid[i];
    rep.a.push_back(a_of_r(field, gauges, r, dirs));
    rep.b.push_back(b_of_r(field, gauges, r, dirs));
    rep.p.push_back(p_of_r(field, r, dirs));
    const double a = rep.a.back(), b = rep.b.back();
    const double h = gauges.h(r);

    double inf_re = inf;
    Direction inf_dir = dirs.front();
    for (const auto &w : dirs) {
      const double q0 = field.Q0(r, w);
      q0np.sample(r, w, -q0, [&] { return Values{{"Q0", q0}}; });

      const double q0_eps = field.Q0(r * (1.0 + 1e-12), w);
      const double q0_at = field.Q0(r, w, Side::Above);
      const double rl_margin = 1e-6 * std::max(1.0, std::abs(q0)) - std::abs(q0_eps - q0) -
                               (q0_at == q0 ? 0.0 : inf);
      rl.sample(r, w, rl_margin, [&] { return Values{{"Q0", q0}, {"Q0(r+)", q0_eps}}; });

      const auto breaks = field.breaks_along(w);
      for (double hh : hs) {
        const double quotient = (field.Q0(r + hh, w) - q0) / hh;
        const double dominator = field.Q0r_h(r, w, hh);
        const double m = std::isfinite(dominator) ? dominator + opt.dominance_tol - quotient : -inf;
        dom.sample(r, w, m, [&] { return Values{{"h", hh}, {"quotient", quotient}, {"Q0r(x;h)", dominator}}; });
      }
      if (!near_break(breaks, r, h0)) {
        const double lim = field.Q0r(r, w);
        const double fine_h = h0 / opt.limit_divisor;
        const double finest = field.Q0r_h(r, w, fine_h);
        const double m = opt.limit_tol * std::max(1.0, std::abs(lim)) - std::abs(finest - lim);
        dom.sample(r, w, m, [&] { return Values{{"h", fine_h}, {"Q0r(x;h)", finest}, {"Q0r(x)", lim}}; });
      }

      const double re_mq = -field.q_at(r, w).real();
      if (re_mq < inf_re) {
        inf_re = re_mq;
        inf_dir = w;
      }
    }

    hb.sample(r, dirs.front(), h > 0.0 ? 2.0 / r - h : -inf, [&] { return Values{{"h", h}, {"2/r", 2.0 / r}}; });
    ab.sample(r, dirs.front(), b - a * a, [&] { return Values{{"a", a}, {"a^2", a * a}, {"b", b}}; });

    const double F = gauges.F(r);
    if (F > 0.0 && b > 0.0 && h > 0.0)
      F_ratio[i] = F * F / (r * r * r * r * h * h * b);
    else
      F_bad[i] = true;

    const double Fr = gauges.F_r(r);
    fr.sample(r, dirs.front(), std::isfinite(Fr) ? 0.0 : -inf, [&] { return Values{{"F_r", Fr}}; });

    const double g = r * r * inf_re;
    const double gm = std::min(g, g - prev_g);
    div.sample(r, inf_dir, i == 0 ? g : gm, [&] { return Values{{"g", g}, {"g_prev", prev_g}}; });
    prev_g = g;
  }

  // Probes straddling jump radii, so steps show up in the difference quotient.
  for (const auto &w : dirs) {
    for (double bk : field.breaks_along(w)) {
      for (double hh : hs) {
        const double r = bk - hh / 2;
        if (r < grid.front() || r > grid.back())
          continue;
        const double quotient = (field.Q0(r + hh, w) - field.Q0(r, w)) / hh;
        const double dominator = field.Q0r_h(r, w, hh);
        dom.sample(r, w, dominator + opt.dominance_tol - quotient,
                   [&] { return Values{{"h", hh}, {"quotient", quotient}, {"Q0r(x;h)", dominator}}; });
      }
      if (bk >= grid.front() && bk <= grid.back()) {
        const double above = field.Q0(bk, w, Side::Above);
        const double dflt = field.Q0(bk, w);
        const double next = field.Q0(bk * (1.0 + 1e-12), w);
        const double m = (above == dflt ? 0.0 : -inf) + 1e-6 * std::max(1.0, std::abs(above)) -
                         std::abs(next - above);
        rl.sample(bk, w, m, [&] { return Values{{"Q0(r)", dflt}, {"Q0(r,above)", above}, {"Q0(r+)", next}}; });
      }
    }
  }

  // F^2 <= c0 r^4 h^2 b with c0 fitted beyond the last point where the ratio is undefined.
  {
    Tracker fc(clause::F_c0, "F(r) > 0 and F^2 <= c0 r^4 h^2 b");
    for (std::size_t i = 0; i < n; ++i)
      if (F_bad[i])
        fc.sample(grid[i], dirs.front(), -1.0, [&] {
          return Values{{"F", gauges.F(grid[i])}, {"b", rep.b[i]}, {"h", gauges.h(grid[i])}};
        });
    const auto last = fc.last_violation();
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!last || grid[i] > *last)
        sup = std::max(sup, F_ratio[i]);
    rep.c0 = 1.1 * sup;
    for (std::size_t i = 0; i < n; ++i) {
      if (F_bad[i] || (last && grid[i] <= *last))
        continue;
      const double r = grid[i], h = gauges.h(r), F = gauges.F(r);
      const double rhs = rep.c0 * r * r * r * r * h * h * rep.b[i];
      fc.sample(r, dirs.front(), rhs - F * F, [&] { return Values{{"F^2", F * F}, {"c0 r^4 h^2 b", rhs}}; });
    }
    auto res = fc.finish(grid);
    res.note = "c0=" + fmt_double(rep.c0);
    rep.clauses.push_back(std::move(res));
  }

  double sup_rFr = 0.0;
  for (double r : grid)
    sup_rFr = std::max(sup_rFr, r * gauges.F_r(r));
  rep.c1 = 1.1 * (sup_rFr > 0.0 ? sup_rFr : 1.0);

  // 0 >= beta Q0 >= Re Q; keep the largest beta in the ladder that holds.
  {
    const std::array<double, 3> ladder = {0.9, 0.5, 0.1};
    std::vector<ClauseResult> tries;
    for (double beta : ladder) {
      Tracker t(clause::beta, "0 >= beta Q0(x) >= Re Q(x), beta=" + fmt_double(beta));
      for (double r : grid)
        for (const auto &w : dirs) {
          const double q0 = field.Q0(r, w);
          const double req = field.Q(r, w).real();
          t.sample(r, w, std::min(-beta * q0, beta * q0 - req),
                   [&] { return Values{{"beta", beta}, {"beta*Q0", beta * q0}, {"ReQ", req}}; });
        }
      tries.push_back(t.finish(grid));
    }
    std::size_t pick = ladder.size();
    for (std::size_t k = 0; k < ladder.size() && pick == ladder.size(); ++k)
      if (tries[k].verdict == Verdict::Pass)
        pick = k;
    for (std::size_t k = 0; k < ladder.size() && pick == ladder.size(); ++k)
      if (tries[k].holds())
        pick = k;
    if (pick == ladder.size()) {
      pick = ladder.size() - 1;
      rep.beta = std::numeric_limits<double>::quiet_NaN();
    } else {
      rep.beta = ladder[pick];
    }
    tries[pick].note = "beta=" + fmt_double(ladder[pick]);
    rep.clauses.push_back(std::move(tries[pick]));
  }

  rep.clauses.insert(rep.clauses.begin(), {q0np.finish(grid), rl.finish(grid), dom.finish(grid), hb.finish(grid),
                                           ab.finish(grid)});
  {
    auto c = fr.finish(grid);
    c.note = "c1=" + fmt_double(rep.c1);
    rep.clauses.push_back(std::move(c));
  }

  if (gauges.F_label == "log r")
    rep.clauses.push_back(analytic(clause::F_unbounded, "F(r) -> infinity", Verdict::Pass, grid, "F = log r"));
  else
    rep.clauses.push_back(analytic(clause::F_unbounded, "F(r) -> infinity", Verdict::Inconclusive, grid,
                                   "F is not from the catalog"));

  {
    const auto known = gauges.integrable();
    const std::string st = "h in L1((R0, infinity))";
    if (!known) {
      rep.clauses.push_back(analytic(clause::h_integrable, st, Verdict::Inconclusive, grid,
                                     "h is not from the catalog; integral over the window " +
                                         fmt_double(gauges.integral_h(grid.front(), grid.back()))));
    } else if (*known) {
      rep.clauses.push_back(analytic(clause::h_integrable, st, Verdict::Pass, grid,
                                     "h=" + gauges.h_label + ", tail integral " +
                                         fmt_double(gauges.integral_h(grid.front(), inf))));
    } else {
      auto c = analytic(clause::h_integrable, st, Verdict::Fail, grid, "h=" + gauges.h_label + " is not integrable");
      c.threshold = inf;
      c.witness = Witness{grid.back(), dirs.front(), {{"integral_h(r_lo,r_hi)", gauges.integral_h(grid.front(), grid.back())}}};
      rep.clauses.push_back(std::move(c));
    }
  }

  rep.clauses.push_back(div.finish(grid));

  if (field.parts) {
    const auto &pp = *field.parts;
    Tracker dc(clause::decay, "sup|V_long| -> 0, r^{1+eps}|dV_long/dr| and r^{1+eps}|V_short| bounded");
    double prevL = inf, prevD = inf, prevS = inf;
    const double tol = opt.decay_rel_tol;
    for (double r : grid) {
      double sL = 0.0, sD = 0.0, sS = 0.0;
      Direction wit = dirs.front();
      for (const auto &w : dirs) {
        const double l = std::abs(pp.long_range(r, w));
        if (l > sL) {
          sL = l;
          wit = w;
        }
        sD = std::max(sD, std::pow(r, 1.0 + pp.epsilon) * std::abs(pp.long_range_dr(r, w)));
        sS = std::max(sS, std::pow(r, 1.0 + pp.epsilon) * std::abs(pp.short_range(r, w)));
      }
      double m = 0.0;
      if (sL > 0.0 && prevL < inf)
        m = std::min(m, prevL - sL > 0.0 ? 0.0 : -1.0);
      if (prevD < inf)
        m = std::min(m, prevD * (1.0 + tol) + tol - sD);
      if (prevS < inf)
        m = std::min(m, prevS * (1.0 + tol) + tol - sS);
      dc.sample(r, wit, m, [&] {
        return Values{{"sup|V_long|", sL}, {"prev", prevL}, {"r^(1+eps)|dV_long|", sD}, {"r^(1+eps)|V_short|", sS}};
      });
      prevL = sL;
      prevD = sD;
      prevS = sS;
    }
    rep.clauses.push_back(dc.finish(grid));
  }

  double joint = grid.front();
  for (const auto &c : rep.clauses)
    if (c.holds())
      joint = std::max(joint, c.threshold);
  rep.threshold = joint;

  gauges.c0 = rep.c0;
  gauges.c1 = rep.c1;
  gauges.beta = rep.beta;
  return rep;
}

bool Prop43Result::pass() const {
  return std::all_of(inequalities.begin(), inequalities.end(), [](const auto &c) { return c.holds(); });
}

Prop43Result check_prop43(const CoefficientField &field, const RadialGauges &gauges, std::span<const double> grid,
                          const SphereBasis &basis, double from_radius, double slack) {
  if (grid.empty())
    throw InvalidArgument("prop43: empty radius grid");
  const auto dirs = sample_directions(basis, field);
  std::array<Tracker, 3> t = {Tracker("r2h2b-le-2p", "r^2 h^2 b <= 2p"),
                              Tracker("rQ1-le-2p", "(r sup|Q1|)^2 <= 2p"),
                              Tracker("F2-le-2c0p", "r^-2 F^2 <= 2 c0 p")};
  for (double r : grid) {
    if (r < from_radius)
      continue;
    const double h = gauges.h(r);
    const double b = b_of_r(field, gauges, r, dirs);
    const double p = p_of_r(field, r, dirs);
    double sup_q1 = 0.0;
    for (const auto &w : dirs)
      sup_q1 = std::max(sup_q1, std::abs(field.Q1(r, w)));
    const double rhs = 2.0 * p;
    const double tol = slack * std::max(1.0, std::abs(rhs));
    const double l1 = r * r * h * h * b;
    const double l2 = (r * sup_q1) * (r * sup_q1);
    const double F = gauges.F(r);
    const double l3 = F * F / (r * r);
    const double rhs3 = gauges.c0 * rhs;
    const Direction w0 = dirs.front();
    t[0].sample(r, w0, rhs + tol - l1, [&] { return Values{{"r^2h^2b", l1}, {"2p", rhs}}; });
    t[1].sample(r, w0, rhs + tol - l2, [&] { return Values{{"(r sup|Q1|)^2", l2}, {"2p", rhs}}; });
    t[2].sample(r, w0, rhs3 + slack * std::max(1.0, std::abs(rhs3)) - l3,
                [&] { return Values{{"F^2/r^2", l3}, {"2c0p", rhs3}}; });
  }
  Prop43Result out;
  for (auto &tr : t) {
    auto c = tr.finish(grid);
    // A consequence, not a hypothesis: any violation is a failure.
    if (c.verdict == Verdict::PassBeyondThreshold)
      c.verdict = Verdict::Fail;
    c.note = "consistency check";
    out.inequalities.push_back(std::move(c));
  }
  return out;
}

} // namespace kgc
