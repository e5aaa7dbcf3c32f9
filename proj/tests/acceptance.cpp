// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <boost/numeric/odeint.hpp>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "kgc/audit.hpp"
#include "kgc/dist_calc.hpp"
#include "kgc/functionals.hpp"
#include "kgc/media.hpp"
#include "kgc/radial_system.hpp"
#include "kgc/scenario.hpp"

using namespace kgc;

namespace {

namespace ode = boost::numeric::odeint;

std::string fmt_double(double v) {
  char buf[32];
  return std::string(buf, std::to_chars(buf, buf + sizeof buf, v).ptr);
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 1; i <= n; ++i)
    g.push_back(i == n ? b : a + (b - a) * i / n);
  return g;
}

BasisHandle basis_of(int N, int L) { return std::make_shared<const SphereBasis>(SphereBasis::build(N, L)); }

FieldHandle handle(CoefficientField f, double inner = 0.5) {
  f.inner_radius = inner;
  return std::make_shared<const CoefficientField>(std::move(f));
}

FieldAndGauges two_shell() {
  LayeredMedium m;
  m.interfaces = {2.0};
  m.nu = {1.0, 4.0};
  m.inner_radius = 0.5;
  return build_example62(m);
}

/// Columns of a CSV body by header name.
std::map<std::string, std::vector<double>> columns(const std::string &csv) {
  std::istringstream in(csv);
  std::string line, cell;
  std::getline(in, line);
  std::vector<std::string> names;
  for (std::istringstream h(line); std::getline(h, cell, ',');)
    names.push_back(cell);
  std::map<std::string, std::vector<double>> out;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    for (std::size_t k = 0; std::getline(row, cell, ',') && k < names.size(); ++k)
      out[names[k]].push_back(std::strtod(cell.c_str(), nullptr));
  }
  return out;
}

const std::string &csv_body(const RunReport &r, const std::string &name) {
  static const std::string empty;
  for (const auto &[n, body] : r.csv)
    if (n == name)
      return body;
  return empty;
}

const CheckResult *check_of(const RunReport &r, std::string_view name) {
  for (const auto &c : r.checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

bool passed(const RunReport &r, std::string_view name) {
  const auto *c = check_of(r, name);
  return c && c->status == CheckStatus::Pass;
}

// 1. v = sin(r - 1) for q = -1, N = 3; M+ = 1; E nondecreasing.
Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  auto fg = build_example61(PotentialModel::constant(3, 1.0));
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(fg.field), 1.0, 50.0);
  IntegrateOptions io;
  io.tolerance = 1e-9;
  auto t = integrate(sys, InitialData::unit(1, 1.0), grid(1.0, 50.0, 490), io);
  FunctionalContext ctx(sys, fg.gauges);
  auto series = compute_series(t, ctx, 1.0, 1.0);
  auto mono = verify_monotone_Mplus(series, SlackPolicy{1e-8});
  const double elapsed = seconds_since(t0);

  double err = 0.0, mplus = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(t.v[i][0] - std::sin(t.r[i] - 1.0)));
    mplus = std::max(mplus, std::abs(series.mplus[i] - 1.0));
  }
  o.require(t.status == Trajectory::Status::Ok && t.r.back() == 50.0, "integration did not reach r=50");
  o.require(err <= 1e-8, "max |v - sin(r-1)| = " + fmt_double(err));
  o.require(mplus <= 1e-8, "max |M+ - 1| = " + fmt_double(mplus));
  o.require(mono.pass, "E decreases by " + fmt_double(mono.worst_step) + " at r=" + fmt_double(mono.worst_at));
  o.require(elapsed < 2.0, "runtime " + fmt_double(elapsed) + " s");
  if (o.pass)
    o.detail = "sine error " + fmt_double(err) + ", |M+ - 1| <= " + fmt_double(mplus) + ", " + fmt_double(elapsed) + " s";
  return o;
}

/// J0 and J1 by their power series in long double.
std::pair<double, double> bessel01(double x) {
  long double j0 = 0, j1 = 0, t0 = 1, t1 = x / 2.0L;
  const long double y = (long double)x * x / 4.0L;
  for (int k = 0; k < 80; ++k) {
    j0 += t0;
    j1 += t1;
    t0 *= -y / ((k + 1.0L) * (k + 1.0L));
    t1 *= -y / ((k + 1.0L) * (k + 2.0L));
  }
  return {double(j0), double(j1)};
}

// 2. N = 2: v = sqrt(r) J0(r) in the constant mode.
Outcome criterion2() {
  Outcome o;
  auto fg = build_example61(PotentialModel::constant(2, 1.0));
  auto sys = RadialSystem::assemble(basis_of(2, 0), handle(fg.field), 1.0, 20.0);
  const double c = std::sqrt(2 * std::numbers::pi);
  auto ref = [&](double r) {
    auto [j0, j1] = bessel01(r);
    return std::pair{c * std::sqrt(r) * j0, c * (j0 / (2 * std::sqrt(r)) - std::sqrt(r) * j1)};
  };
  InitialData init{1.0, ModeVector::Constant(1, ref(1.0).first), ModeVector::Constant(1, ref(1.0).second)};
  auto t = integrate(sys, init, grid(1.0, 20.0, 380));
  double err = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    err = std::max(err, std::abs(t.v[i][0] / c - ref(t.r[i]).first / c));
  o.require(err <= 1e-6, "max |v - sqrt(r) J0| = " + fmt_double(err));
  if (o.pass)
    o.detail = "max error " + fmt_double(err) + " on [1, 20]";
  return o;
}

// 3. Radial two-shell medium, L = 2: coupled system against scalar mode equations.
Outcome criterion3() {
  Outcome o;
  auto fg = two_shell();
  auto basis = basis_of(3, 2);
  auto sys = RadialSystem::assemble(basis, handle(fg.field), 1.0, 20.0);
  const auto g = grid(1.0, 20.0, 190);
  using State = std::array<double, 4>;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto init = InitialData::random(basis->size(), 1.0, seed);
    const auto t = integrate(sys, init, g);
    for (std::size_t k = 0; k < basis->size(); ++k) {
      const double lam = basis->eigenvalues()[k];
      auto rhs = [lam](const State &x, State &d, double r) {
        const double a = lam / (r * r) - (r < 2.0 ? 1.0 : 4.0);
        d = {x[2], x[3], a * x[0], a * x[1]};
      };
      const auto i0 = Eigen::Index(k);
      State x{init.v[i0].real(), init.v[i0].imag(), init.dv[i0].real(), init.dv[i0].imag()};
      std::vector<cplx> ref{init.v[i0]};
      double r = 1.0, scale = std::abs(init.v[i0]);
      for (std::size_t i = 1; i < t.size(); ++i) {
        // Stop exactly at the shell so no step straddles the jump.
        if (r < 2.0 && t.r[i] > 2.0) {
          ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, x, r,
                                  2.0 - 1e-15, 1e-3);
          r = 2.0;
        }
        ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, x, r,
                                t.r[i], 1e-3);
        r = t.r[i];
        ref.emplace_back(x[0], x[1]);
        scale = std::max(scale, std::abs(ref.back()));
      }
      for (std::size_t i = 0; i < t.size(); ++i)
        worst = std::max(worst, std::abs(t.v[i][i0] - ref[i]) / scale);
    }
  }
  o.require(worst <= 1e-8, "relative deviation " + fmt_double(worst));
  if (o.pass)
    o.detail = "9 modes x 10 seeds, worst relative deviation " + fmt_double(worst);
  return o;
}

// 4. E and r^2 N at m0 and 2 m0 nondecreasing on every audited catalog scenario.
Outcome criterion4() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int audited = 0;
  for (auto s : scenario_catalog()) {
    s.checks = {"audit", "monotone-Mplus", "r2N"};
    const auto rep = run(s);
    if (!rep.audit || !rep.audit->full()) {
      o.require(false, s.name + ": audit failed");
      continue;
    }
    ++audited;
    o.require(passed(rep, "monotone-Mplus"), s.name + ": E not nondecreasing");
    o.require(passed(rep, "r2N"), s.name + ": r^2 N not nondecreasing");
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "suite runtime " + fmt_double(elapsed) + " s");
  if (o.pass)
    o.detail = std::to_string(audited) + " audited scenarios, " + fmt_double(elapsed) + " s";
  return o;
}

// 5. Tail infimum of M and M <= 2S beyond R3, five random seeds per scenario.
Outcome criterion5() {
  Outcome o;
  int runs = 0;
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (const auto &base : scenario_catalog()) {
    for (std::uint64_t k = 1; k <= 5; ++k) {
      auto s = base;
      s.checks = {"audit", "monotone-Mplus"};
      s.initial.kind = InitialSpec::Kind::Random;
      s.seed = base.seed + k;
      const auto rep = run(s);
      const std::string tag = s.name + " seed " + std::to_string(s.seed);
      if (!rep.audit || !rep.audit->full()) {
        o.require(false, tag + ": audit failed");
        continue;
      }
      auto col = columns(csv_body(rep, "series.csv"));
      const auto &r = col["r"], &M = col["M"], &S = col["S"];
      if (r.empty() || M.size() != r.size() || S.size() != r.size()) {
        o.require(false, tag + ": series missing");
        continue;
      }
      ++runs;
      double tail_inf = std::numeric_limits<double>::infinity();
      for (std::size_t i = r.size() / 2; i < r.size(); ++i)
        tail_inf = std::min(tail_inf, M[i]);
      worst_ratio = std::min(worst_ratio, tail_inf / M.front());
      o.require(tail_inf >= 1e-6 * M.front(), tag + ": tail inf M " + fmt_double(tail_inf));

      auto basis = SphereBasis::build(s.dimension, s.cutoff, s.angular_degree);
      auto fg = build_family(s);
      const auto dirs = sample_directions(basis, fg.field);
      const auto R3 = find_R3(fg.field, dirs, r);
      if (!R3) {
        o.require(false, tag + ": no R3 in the window");
        continue;
      }
      double scale = 0.0, worst = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= *R3) {
          scale = std::max({scale, std::abs(M[i]), std::abs(2 * S[i])});
          worst = std::min(worst, 2 * S[i] - M[i]);
        }
      o.require(worst >= -1e-9 * scale, tag + ": M exceeds 2S by " + fmt_double(-worst));
    }
  }
  if (o.pass)
    o.detail = std::to_string(runs) + " runs, smallest tail inf M / M(start) " + fmt_double(worst_ratio);
  return o;
}

CoefficientField field_of(std::function<double(double, const Direction &)> q0,
                          std::function<cplx(double)> q1, std::function<double(double)> q0r) {
  CoefficientField f;
  f.dimension = 3;
  f.inner_radius = 0.5;
  f.q0 = [q0](double r, const Direction &w, Side) { return q0(r, w); };
  f.q1 = [q1](double r, const Direction &, Side) { return q1(r); };
  f.q = [q0, q1](double r, const Direction &w, Side) { return q0(r, w) + q1(r); };
  f.q0r = [q0r](double r, const Direction &, Side) { return q0r(r); };
  f.q0r_h = [q0r](double r, const Direction &, double h) { return (q0r(r) + q0r(r + h)) / 2; };
  return f;
}

// 6. Audit passes the long/short-range family; six injected violations are caught with witnesses.
Outcome criterion6() {
  Outcome o;
  const auto g = [] {
    auto x = grid(1.0, 60.0, 590);
    x.insert(x.begin(), 1.0);
    return x;
  }();
  auto model = PotentialModel::constant(3, 1.0);
  model.long_range = {1.0, 0.5};
  model.short_range = {cplx(0.0, 1.0), 1.5};
  model.inner_radius = 0.5;
  auto good = build_example61(model);
  good.field.inner_radius = 0.5;
  const auto b2 = SphereBasis::build(3, 2);
  const auto rep = audit_assumptions(good.field, good.gauges, g, b2);
  o.require(rep.full() && rep.find(clause::decay)->holds(), "long/short-range family fails the audit");

  std::vector<std::string> caught;
  auto expect = [&](const std::string &what, const CoefficientField &f, RadialGauges gauges,
                    std::string_view id) {
    const auto r = audit_assumptions(f, gauges, g, b2);
    const auto *c = r.find(id);
    const bool ok = c && !c->holds() && c->witness.has_value();
    o.require(ok, what + " not detected by " + std::string(id));
    if (ok)
      caught.push_back(std::string(id) + " at " + c->witness->describe());
  };

  const Direction spot = b2.nodes()[3];
  expect("Q0 > 0 spot",
         field_of([spot](double r, const Direction &w) { return (w == spot && r >= 20) ? 0.25 : -1.0; },
                  [](double) { return cplx(0.0); }, [](double) { return 0.0; }),
         RadialGauges::power(0.5), clause::q0_nonpositive);

  auto flat = PotentialModel::constant(3, 1.0);
  flat.long_range = {2.0, 0.0};
  flat.inner_radius = 0.5;
  auto nd = build_example61(flat);
  expect("non-decaying long-range part", nd.field, nd.gauges, clause::decay);

  auto kato = build_example61(PotentialModel::constant(3, 1.0));
  kato.field.inner_radius = 0.5;
  expect("h = 2/r", kato.field, RadialGauges::kato(), clause::h_integrable);

  auto big = PotentialModel::constant(3, 1.0);
  big.short_range = {cplx(5.0, 0.0), 1.25};
  big.inner_radius = 0.5;
  auto bs = build_example61(big);
  expect("oversized short-range part", bs.field, bs.gauges, clause::a2_le_b);

  // 0 >= beta Q0 >= Re Q fails when Re Q1 pushes Re Q above beta Q0; a very negative Re Q1 cannot.
  expect("Re Q1 above (1 - beta)|Q0|",
         field_of([](double, const Direction &) { return -1.0; }, [](double) { return cplx(1.5); },
                  [](double) { return 0.0; }),
         RadialGauges::power(0.5), clause::beta);
  auto power = RadialGauges::power(0.5);
  const auto neg = audit_assumptions(field_of([](double, const Direction &) { return -1.0; },
                                              [](double) { return cplx(-5.0); }, [](double) { return 0.0; }),
                                     power, g, b2);
  o.require(neg.find(clause::beta)->holds(), "Re Q1 = -5 reported as a beta violation");

  expect("q -> 0 tail",
         field_of([](double r, const Direction &) { return -std::pow(r, -3.0); }, [](double) { return cplx(0.0); },
                  [](double r) { return 3.0 * std::pow(r, -4.0); }),
         RadialGauges::power(0.5), clause::divergence);

  if (o.pass) {
    o.detail = "R*=" + fmt_double(rep.threshold) + "; caught " + std::to_string(caught.size()) + "/6";
    for (const auto &c : caught)
      o.detail += "\n    " + c;
  }
  return o;
}

// 7. Separation condition and ray monotonicity on shells and slabs.
Outcome criterion7() {
  Outcome o;
  LayeredMedium shells;
  shells.interfaces = {2.0, 3.0, 5.0};
  shells.nu = {1.0, 1.5, 2.5, 4.0};
  LayeredMedium slabs;
  slabs.geometry = LayeredMedium::Geometry::Slabs;
  slabs.interfaces = {-3, -2, -1, 1, 2, 3};
  slabs.nu = {5, 4, 2, 1, 2, 3, 6};
  const auto rays = low_discrepancy_rays(3);
  for (const auto *m : {&shells, &slabs}) {
    o.require(check_separating_condition(*m).pass, "separating condition rejects a valid medium");
    o.require(check_theorem72_hypothesis(*m, rays, 10.0).pass, "ray check rejects a valid medium");
  }
  auto inv = shells;
  inv.nu = {1.0, 2.5, 1.5, 4.0};
  const auto sep = check_separating_condition(inv);
  const auto ray = check_theorem72_hypothesis(inv, rays, 10.0);
  o.require(!sep.pass && sep.interface == std::size_t(1), "inverted shell pair not located");
  o.require(!ray.pass && ray.radius == 3.0, "inverted shell pair not found on rays");
  auto sinv = slabs;
  sinv.nu = {5, 4, 2, 1, 2, 1.5, 6};
  const auto ssep = check_separating_condition(sinv);
  o.require(!ssep.pass && ssep.interface == std::size_t(4), "inverted slab pair not located");
  o.require(!check_theorem72_hypothesis(sinv, rays, 10.0).pass, "inverted slab pair not found on rays");
  if (o.pass)
    o.detail = "inverted pairs located at shell interface 1 (r=3) and slab interface 4 (x3=2)";
  return o;
}

// 8. Randomized monotonicity-oracle suite.
Outcome criterion8() {
  Outcome o;
  const auto r = run_lemma_a_suite(20240607, 100, 10);
  o.require(r.nonnegative_monotone == 100 && r.nonnegative_total == 100, "nonnegative certificates not all monotone");
  o.require(r.injected_flagged == 100 && r.injected_located == 100, "injected drops not all flagged and located");
  o.require(r.constructed_within == 10, "constructed witnesses off by more than 10%");
  o.require(r.pass(), "suite reported failures");
  if (o.pass)
    o.detail = "100/100 monotone, 100/100 drops located, 10/10 witnesses within 10% (worst " +
               fmt_double(r.worst_relative_error) + ")";
  return o;
}

// 9. Distributional derivative of (C0 eta, eta) on the two-shell medium.
Outcome criterion9() {
  Outcome o;
  auto fg = two_shell();
  auto sys = RadialSystem::assemble(basis_of(3, 1), handle(fg.field), 1.2, 4.0);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t samples = 0;
  for (int trial = 0; trial < 20; ++trial) {
    ModeVector a(4), b(4);
    std::array<double, 4> c{};
    for (int k = 0; k < 4; ++k) {
      a[k] = {U(rng) - 0.5, U(rng) - 0.5};
      b[k] = {U(rng) - 0.5, U(rng) - 0.5};
      c[std::size_t(k)] = 2 * U(rng);
    }
    EtaPath eta{[=](double r) {
                  ModeVector e(4);
                  for (int k = 0; k < 4; ++k)
                    e[k] = a[k] + b[k] * std::sin(c[std::size_t(k)] * r);
                  return e;
                },
                [=](double r) {
                  ModeVector e(4);
                  for (int k = 0; k < 4; ++k)
                    e[k] = b[k] * c[std::size_t(k)] * std::cos(c[std::size_t(k)] * r);
                  return e;
                }};
    std::vector<Bump> bumps;
    for (int i = 0; i < 20; ++i) {
      const double w = 0.05 + 0.4 * U(rng);
      bumps.emplace_back(1.2 + w + (2.8 - 2 * w) * U(rng), w);
    }
    const auto rep = verify_prop24(sys, eta, bumps, 1e-8);
    samples += rep.samples.size();
    worst = std::max(worst, rep.worst_excess);
    o.require(rep.pass, "eta " + std::to_string(trial) + " exceeds the bound by " + fmt_double(rep.worst_excess));
  }
  if (o.pass)
    o.detail = std::to_string(samples) + " (eta, bump) pairs, largest lhs - rhs " + fmt_double(worst);
  return o;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string &args) {
  const std::string cmd = std::string(KGC_CLI) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// 10. Byte-identical CSVs and the four exit codes.
Outcome criterion10() {
  Outcome o;
  const auto base = std::filesystem::temp_directory_path() / "kgc_acceptance";
  std::filesystem::remove_all(base);
  const std::string cfg = std::string(KGC_SCENARIO_DIR) + "/suite/example61.yaml";
  const int c1 = cli("run --config " + cfg + " --out " + (base / "a").string());
  const int c2 = cli("run --config " + cfg + " --out " + (base / "b").string());
  o.require(c1 == 0 && c2 == 0, "example61 run exit " + std::to_string(c1));
  for (const char *f : {"trajectory.csv", "series.csv"}) {
    const auto a = slurp(base / "a" / f), b = slurp(base / "b" / f);
    o.require(!a.empty() && a == b, std::string(f) + " differs between runs");
  }
  std::filesystem::remove_all(base);

  const std::string demo = std::string(KGC_SCENARIO_DIR) + "/demo/";
  const int pass = cli("run --config " + std::string(KGC_SCENARIO_DIR) + "/suite/kato.yaml");
  const int fail = cli("run --config " + demo + "zero-slack.yaml");
  const int audit = cli("run --config " + demo + "decreasing-shell.yaml");
  const int config = cli("run --config " + demo + "lemma-a.yaml --grid 0");
  o.require(pass == 0, "passing run exit " + std::to_string(pass));
  o.require(fail == 2, "check-fail run exit " + std::to_string(fail));
  o.require(audit == 3, "audit-fail run exit " + std::to_string(audit));
  o.require(config == 4, "configuration error exit " + std::to_string(config));
  if (o.pass)
    o.detail = "identical CSVs; exit codes 0, 2, 3, 4";
  return o;
}

} // namespace

int main() {
  const std::vector<std::pair<const char *, Outcome (*)()>> criteria{
      {"constant-k closed form", criterion1},   {"Bessel oracle", criterion2},
      {"mode decoupling", criterion3},          {"monotonicity suite", criterion4},
      {"dichotomy shadow", criterion5},         {"audit correctness", criterion6},
      {"layered-media geometry", criterion7},   {"monotonicity-oracle suite", criterion8},
      {"distributional derivative bound", criterion9}, {"determinism and exit codes", criterion10}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("criterion %zu (%s): %s  %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
