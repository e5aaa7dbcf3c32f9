#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "kgc/dist_calc.hpp"
#include "kgc/functionals.hpp"
#include "kgc/scenario.hpp"
#include "numfmt.hpp"

namespace kgc {

namespace {

std::string hex64(std::uint64_t x) {
  std::ostringstream o;
  o << std::hex;
  o.width(16);
  o.fill('0');
  o << x;
  return o.str();
}

CheckResult skipped(std::string name, const AuditReport &audit, std::span<const std::string_view> ids) {
  CheckResult c{std::move(name), CheckStatus::Skipped, {}};
  std::string unmet;
  for (const auto &u : audit.unmet(ids))
    unmet += (unmet.empty() ? "" : ", ") + u;
  c.details.push_back("skipped (hypotheses unmet): " + unmet);
  return c;
}

std::string monotone_line(const std::string &what, const MonotoneReport &m) {
  std::string s = what + ": " + (m.pass ? "nondecreasing" : "DECREASES") + " over " + std::to_string(m.checked) +
                  " steps, worst step " + fmt_double(m.worst_step);
  if (m.worst_step < 0.0)
    s += " at r=" + fmt_double(m.worst_at);
  s += ", scale " + fmt_double(m.scale);
  if (!m.note.empty())
    s += " (" + m.note + ")";
  return s;
}

InitialData initial_data(const Scenario &s, std::size_t modes) {
  switch (s.initial.kind) {
  case InitialSpec::Kind::Unit:
    return InitialData::unit(modes, s.r_start);
  case InitialSpec::Kind::Random:
    return InitialData::random(modes, s.r_start, s.seed);
  case InitialSpec::Kind::Explicit:
    break;
  }
  InitialData d;
  d.r_init = s.r_start;
  d.v = Eigen::Map<const ModeVector>(s.initial.v.data(), Eigen::Index(modes));
  d.dv = Eigen::Map<const ModeVector>(s.initial.dv.data(), Eigen::Index(modes));
  return d;
}

std::vector<std::string_view> join(std::initializer_list<std::span<const std::string_view>> groups) {
  std::vector<std::string_view> out;
  for (auto g : groups)
    out.insert(out.end(), g.begin(), g.end());
  return out;
}

} // namespace

std::string_view version() { return "0.3.0"; }

std::string_view to_string(CheckStatus s) {
  switch (s) {
  case CheckStatus::Pass:
    return "PASS";
  case CheckStatus::Fail:
    return "FAIL";
  case CheckStatus::Skipped:
    return "SKIPPED";
  case CheckStatus::Inconclusive:
    return "INCONCLUSIVE";
  }
  return "?";
}

int RunReport::exit_code() const {
  bool skip = audit_failed;
  for (const auto &c : checks) {
    if (c.name == checks::audit)
      continue;
    if (c.status == CheckStatus::Fail || c.status == CheckStatus::Inconclusive)
      return 2;
    skip = skip || c.status == CheckStatus::Skipped;
  }
  return skip ? 3 : 0;
}

std::string RunReport::summary() const {
  std::ostringstream o;
  o << "scenario " << scenario << "\nversion " << version << "\nconfig hash " << hex64(config_hash) << "\nseed "
    << seed << "\nwall time " << fmt_double(std::round(wall_time * 1000.0) / 1000.0) << " s\n";
  for (const auto &c : checks) {
    o << "\n[" << to_string(c.status) << "] " << c.name << '\n';
    for (const auto &d : c.details)
      o << "  " << d << '\n';
  }
  if (!artifacts.empty()) {
    o << "\nartifacts\n";
    for (const auto &a : artifacts)
      o << "  " << a << '\n';
  }
  o << "\nexit code " << exit_code() << '\n';
  return o.str();
}

RunReport run(const Scenario &s) {
  s.validate();
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.scenario = s.name;
  rep.version = std::string(version());
  rep.config_hash = fnv1a64(s.canonical());
  rep.seed = s.seed;

  const bool want_traj = s.wants(checks::monotone_Mplus) || s.wants(checks::r2N) || s.wants(checks::classify) ||
                         s.wants(checks::dichotomy);
  if (want_traj || s.wants(checks::audit) || s.wants(checks::prop43)) {
    auto basis = std::make_shared<const SphereBasis>(SphereBasis::build(s.dimension, s.cutoff, s.angular_degree));
    auto fg = build_family(s);
    auto field = std::make_shared<const CoefficientField>(fg.field);
    auto gauges = fg.gauges;
    auto grid = s.grid_radii();
    std::vector<double> audit_grid{s.r_start};
    audit_grid.insert(audit_grid.end(), grid.begin(), grid.end());
    const auto audit = audit_assumptions(*field, gauges, audit_grid, *basis);
    rep.audit = audit;

    if (s.wants(checks::audit)) {
      CheckResult c{std::string(checks::audit), audit.full() ? CheckStatus::Pass : CheckStatus::Fail, {}};
      rep.audit_failed = !audit.full();
      for (const auto &cl : audit.clauses) {
        std::string line = cl.id + ": " + std::string(to_string(cl.verdict));
        if (cl.verdict == Verdict::PassBeyondThreshold)
          line += " beyond R*=" + fmt_double(cl.threshold);
        if (cl.witness && !cl.holds())
          line += "; witness " + cl.witness->describe();
        if (!cl.note.empty())
          line += " (" + cl.note + ")";
        c.details.push_back(line);
      }
      c.details.push_back("joint R*=" + fmt_double(audit.threshold) + ", c0=" + fmt_double(audit.c0) +
                          ", c1=" + fmt_double(audit.c1) + ", beta=" + fmt_double(audit.beta));
      rep.checks.push_back(std::move(c));
    }

    if (s.wants(checks::prop43)) {
      if (!audit.holds(hypotheses::prop43)) {
        rep.checks.push_back(skipped(std::string(checks::prop43), audit, hypotheses::prop43));
      } else {
        const auto r = check_prop43(*field, gauges, grid, *basis, audit.threshold, s.slack);
        CheckResult c{std::string(checks::prop43), r.pass() ? CheckStatus::Pass : CheckStatus::Fail,
                      {"consistency check of the constants from r=" + fmt_double(audit.threshold) +
                       " with slack " + fmt_double(s.slack)}};
        for (const auto &in : r.inequalities) {
          std::string line = in.id + ": " + std::string(to_string(in.verdict)) +
                             ", worst margin " + fmt_double(in.worst_margin);
          if (in.witness && !in.holds())
            line += "; witness " + in.witness->describe();
          c.details.push_back(line);
        }
        rep.checks.push_back(std::move(c));
      }
    }

    if (want_traj) {
      const auto sys = RadialSystem::assemble(basis, field, s.r_start, s.r_end);
      IntegrateOptions io;
      io.tolerance = s.tolerance;
      const auto traj = integrate(sys, initial_data(s, basis->size()), grid, io);
      FunctionalContext ctx(sys, gauges);
      const SlackPolicy slack{s.slack};
      const double R1 = std::max(audit.threshold, s.r_start);
      const std::string status_line = "integration " + std::string(to_string(traj.status)) + " to r=" +
                                      fmt_double(traj.r.back()) + ", " + std::to_string(traj.rhs_evaluations) +
                                      " rhs evaluations" + (traj.message.empty() ? "" : " (" + traj.message + ")");

      const auto basic = join({hypotheses::basic});
      const auto with_F = join({hypotheses::basic, hypotheses::gauge_F});
      const bool basic_ok = audit.holds(basic);
      const bool F_ok = audit.holds(with_F);

      std::optional<M0R0Report> m0;
      std::optional<M1Choice> m1;
      if (F_ok && (s.wants(checks::r2N) || s.wants(checks::classify) || s.wants(checks::dichotomy))) {
        m0 = find_m0_r0(traj, ctx, audit, slack);
        if (m0->r0)
          m1 = choose_m1(traj, ctx, m0->m0_analytic, *m0->r0);
      }
      const double m_series = m1 && m1->found ? m1->m1 : s.m;
      auto series = compute_series(traj, ctx, m_series, R1);

      if (s.wants(checks::monotone_Mplus)) {
        if (!basic_ok) {
          rep.checks.push_back(skipped(std::string(checks::monotone_Mplus), audit, basic));
        } else {
          const auto mono = verify_monotone_Mplus(series, slack);
          rep.checks.push_back({std::string(checks::monotone_Mplus), mono.pass ? CheckStatus::Pass : CheckStatus::Fail,
                                {status_line, monotone_line("E(r) = exp(int_R1^r h) M+ from R1=" + fmt_double(R1), mono)}});
        }
      }

      if (s.wants(checks::r2N)) {
        if (!F_ok) {
          rep.checks.push_back(skipped(std::string(checks::r2N), audit, with_F));
        } else if (!m0->r0) {
          rep.checks.push_back({std::string(checks::r2N), CheckStatus::Fail, {m0->note}});
        } else {
          CheckResult c{std::string(checks::r2N), CheckStatus::Pass, {}};
          c.details.push_back("r0=" + fmt_double(*m0->r0) + ", c2=" + fmt_double(m0->c2_gauge) +
                              ", analytic m0=" + fmt_double(m0->m0_analytic) + ", empirical m0=" +
                              (m0->m0_empirical ? fmt_double(*m0->m0_empirical) : "none up to 64"));
          for (double m : {m0->m0_analytic, 2.0 * m0->m0_analytic}) {
            const auto vals = r2N_scaled(traj, ctx, m);
            const auto mono = check_nondecreasing(traj.r, vals, *m0->r0, slack);
            if (!mono.pass)
              c.status = CheckStatus::Fail;
            c.details.push_back(monotone_line("r^2 N(v, " + fmt_double(m) + ", r) (rescaled)", mono));
          }
          for (const auto &[m, mono] : m0->scan)
            c.details.push_back("scan m=" + fmt_double(m) + ": " + (mono.pass ? "nondecreasing" : "decreases") +
                                ", worst step " + fmt_double(mono.worst_step));
          rep.checks.push_back(std::move(c));
        }
      }

      auto m1_missing = [&]() -> std::optional<std::string> {
        if (!m0->r0)
          return m0->note;
        if (!m1->found)
          return "no m = m0 2^k (k <= 8) with N(v, m, r1) > 0 at r1=" + fmt_double(m1->r1);
        return std::nullopt;
      };

      if (s.wants(checks::classify)) {
        if (!F_ok) {
          rep.checks.push_back(skipped(std::string(checks::classify), audit, with_F));
        } else if (auto why = m1_missing()) {
          rep.checks.push_back({std::string(checks::classify), CheckStatus::Inconclusive, {*why}});
        } else {
          auto d = classify_case(series, gauges.F, m1->m1, m1->r1);
          CheckResult c{std::string(checks::classify), CheckStatus::Pass, {}};
          if (d.kind == DichotomyVerdict::Case::Inconclusive)
            c.status = CheckStatus::Inconclusive;
          else if (!d.consequences_pass() || !m1->positive_tail)
            c.status = CheckStatus::Fail;
          c.details.push_back("case " + std::string(to_string(d.kind)) + ": " + d.reason);
          c.details.push_back("m1=" + fmt_double(d.m1) + ", r1=" + fmt_double(d.r1) + ", N(v, m1, r) > 0 on [r1, end]: " +
                              (m1->positive_tail ? "yes" : "NO"));
          if (d.kind == DichotomyVerdict::Case::I) {
            c.details.push_back(std::string("N bound at witnesses: ") + (d.n_bound_pass ? "holds" : "VIOLATED"));
            if (d.mplus_tail_checked)
              c.details.push_back("M+ > 0 at " + std::to_string(d.mplus_tail_radii.size()) + " witnesses beyond r=" +
                                  fmt_double(d.mplus_tail_horizon) + ": " + (d.mplus_tail_pass ? "holds" : "VIOLATED"));
            else
              c.details.push_back("M+ > 0 at witnesses not checked: needs r > exp(2 m1 (2 m1 + 1)) = " +
                                  fmt_double(d.mplus_tail_horizon));
          }
          if (d.kind == DichotomyVerdict::Case::II) {
            c.details.push_back("r2=" + fmt_double(d.r2) + ", r4=" + fmt_double(d.r4) + ", r3=" + fmt_double(d.r3) +
                                ", c2=" + fmt_double(d.c2_bound) + ", Re Q <= 0: " + (d.ReQ_nonpositive ? "yes" : "no"));
            c.details.push_back(std::string("growth chain: ") +
                                (d.growth_checked ? (d.growth_pass ? "holds" : "VIOLATED") : "not reached"));
          }
          for (const auto &f : d.growth_failures)
            c.details.push_back(f);
          rep.checks.push_back(std::move(c));
        }
      }

      if (s.wants(checks::dichotomy)) {
        if (!audit.full()) {
          std::vector<std::string_view> ids;
          for (const auto &cl : audit.clauses)
            if (cl.id != clause::decay)
              ids.push_back(cl.id);
          rep.checks.push_back(skipped(std::string(checks::dichotomy), audit, ids));
        } else if (auto why = m1_missing()) {
          rep.checks.push_back({std::string(checks::dichotomy), CheckStatus::Inconclusive, {*why}});
        } else {
          const auto d = dichotomy_experiment(series, traj, ctx, audit, m1->m1, m1->r1);
          CheckResult c{std::string(checks::dichotomy), d.pass ? CheckStatus::Pass : CheckStatus::Fail, {d.summary}};
          c.details.push_back("tail inf M=" + fmt_double(d.tail_inf_M) + " over r>=" + fmt_double(d.tail_from) +
                              ", M at window start=" + fmt_double(d.M_start));
          c.details.push_back(std::string("M <= 2S beyond R3: ") + (d.surface_bound.pass ? "holds" : "VIOLATED") +
                              ", worst margin " + fmt_double(d.surface_bound.worst_step));
          c.details.push_back(std::string("M >= beta M+: ") + (d.beta_chain.pass ? "holds" : "VIOLATED") +
                              ", worst margin " + fmt_double(d.beta_chain.worst_step));
          c.details.push_back("R2'=" + fmt_double(d.R2p) + ", c3'=" + fmt_double(d.c3p) + ", c3=" + fmt_double(d.c3) +
                              ", R2=" + fmt_double(d.R2) + ", M >= c3: " + (d.lower_bound_holds ? "holds" : "VIOLATED"));
          c.details.push_back(std::string("compact-support criterion triggered: ") +
                              (d.compact_support_triggered ? "yes" : "no"));
          rep.checks.push_back(std::move(c));
        }
      }

      std::ostringstream tcsv, scsv;
      write_trajectory_csv(tcsv, traj);
      write_series_csv(scsv, series);
      rep.csv.emplace_back("trajectory.csv", tcsv.str());
      rep.csv.emplace_back("series.csv", scsv.str());
    }
  }

  if (s.wants(checks::lemma_a)) {
    const auto l = run_lemma_a_suite(s.seed, s.lemma_instances, s.lemma_constructed);
    CheckResult c{std::string(checks::lemma_a), l.pass() ? CheckStatus::Pass : CheckStatus::Fail, {}};
    c.details.push_back("seed " + std::to_string(l.seed));
    c.details.push_back("nonnegative certificates: " + std::to_string(l.nonnegative_monotone) + "/" +
                        std::to_string(l.nonnegative_total) + " nondecreasing, " +
                        std::to_string(l.nonnegative_quotient_ok) + " with nonnegative quotients");
    c.details.push_back("injected drops: " + std::to_string(l.injected_flagged) + "/" +
                        std::to_string(l.injected_total) + " flagged, " + std::to_string(l.injected_located) +
                        " located at the injected break");
    c.details.push_back("constructed witnesses: " + std::to_string(l.constructed_within) + "/" +
                        std::to_string(l.constructed_total) + " within 10%, worst relative error " +
                        fmt_double(l.worst_relative_error));
    for (const auto &f : l.failures)
      c.details.push_back(f);
    rep.checks.push_back(std::move(c));
  }

  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void emit(RunReport &report, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error("cannot create " + dir.string() + ": " + ec.message());
  auto write = [&](const std::string &name, const std::string &body) {
    const auto p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << body;
    if (!out)
      throw Error("cannot write " + p.string());
    report.artifacts.push_back(p.string());
  };
  report.artifacts.clear();
  for (const auto &[name, body] : report.csv)
    write(name, body);
  report.artifacts.push_back((dir / "summary.txt").string());
  const auto p = dir / "summary.txt";
  std::ofstream out(p, std::ios::binary);
  out << report.summary();
  if (!out)
    throw Error("cannot write " + p.string());
}

} // namespace kgc
