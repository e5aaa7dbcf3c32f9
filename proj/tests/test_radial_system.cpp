#include "doctest.h"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kgc/media.hpp"
#include "kgc/radial_system.hpp"

using namespace kgc;

namespace {

BasisHandle basis_of(int N, int L, int degree = -1) {
  return std::make_shared<const SphereBasis>(SphereBasis::build(N, L, degree));
}

FieldHandle handle(CoefficientField f, double inner = 0.5) {
  f.inner_radius = inner;
  return std::make_shared<const CoefficientField>(std::move(f));
}

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 1; i <= n; ++i)
    g.push_back(i == n ? b : a + (b - a) * i / n);
  return g;
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

double rel_diff(const ModeVector &a, const ModeVector &b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

} // namespace

TEST_CASE("assemble") {
  auto kato = build_example61(PotentialModel::constant(3, 1.0)).field;
  auto s0 = RadialSystem::assemble(basis_of(3, 0), handle(kato), 1.0, 10.0);
  CHECK(s0.matrix(3.0).rows() == 1);
  CHECK(s0.matrix(3.0)(0, 0) == cplx(-1.0));
  CHECK(s0.diagonal());

  auto s1 = RadialSystem::assemble(basis_of(3, 1), handle(kato), 1.0, 10.0);
  const double r = 1.7;
  const auto A = s1.matrix(r);
  REQUIRE(A.rows() == 4);
  const auto &ev = s1.basis().eigenvalues();
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      const double expect = i == j ? (ev[std::size_t(i)] == 0 ? -1.0 : 2.0 / (r * r) - 1.0) : 0.0;
      CHECK(std::abs(A(i, j) - expect) < 1e-13);
    }

  // Hemisphere step: dense A(r) = B + Gram of the step.
  auto step = kato;
  step.radial = false;
  step.q0 = [](double, const Direction &w, Side) { return w[2] >= 0.0 ? -1.0 : -2.0; };
  step.q = [](double, const Direction &w, Side) { return cplx(w[2] >= 0.0 ? -1.0 : -2.0); };
  auto basis = basis_of(3, 1, 78);
  auto sh = RadialSystem::assemble(basis, handle(step), 1.0, 10.0);
  CHECK_FALSE(sh.diagonal());
  const auto G = gram_of(*basis, [](const Direction &w) { return cplx(w[2] >= 0.0 ? -1.0 : -2.0); }).matrix;
  CMatrix expect = G;
  for (std::size_t i = 0; i < basis->size(); ++i)
    expect(Eigen::Index(i), Eigen::Index(i)) += basis->eigenvalues()[i] / (r * r);
  CHECK((sh.matrix(r) - expect).cwiseAbs().maxCoeff() < 1e-13);
  CMatrix off = sh.matrix(r);
  off.diagonal().setZero();
  CHECK(off.cwiseAbs().maxCoeff() > 0.1);

  CHECK_THROWS_AS(RadialSystem::assemble(basis_of(3, 0), handle(kato, 1.0), 1.0, 10.0), InvalidArgument);
  CHECK_THROWS_AS(RadialSystem::assemble(basis_of(3, 0), handle(kato), 5.0, 2.0), InvalidArgument);
}

TEST_CASE("sine oracle") {
  auto fg = build_example61(PotentialModel::constant(3, 1.0));
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(fg.field), 1.0, 30.0);
  auto t = integrate(sys, InitialData::unit(1, 1.0), grid(1.0, 30.0, 580));
  REQUIRE(t.status == Trajectory::Status::Ok);
  CHECK(t.r.front() == 1.0);
  CHECK(t.r.back() == 30.0);
  double err = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    err = std::max(err, std::abs(t.v[i][0] - std::sin(t.r[i] - 1.0)));
    err = std::max(err, std::abs(t.dv[i][0] - std::cos(t.r[i] - 1.0)));
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("Bessel oracle, N = 2") {
  auto fg = build_example61(PotentialModel::constant(2, 1.0));
  auto sys = RadialSystem::assemble(basis_of(2, 0), handle(fg.field), 1.0, 20.0);
  // Mode coefficient of u = J0(r) is sqrt(2 pi) J0; v = sqrt(r) of that.
  const double c = std::sqrt(2 * std::numbers::pi);
  auto v_ref = [&](double r) {
    auto [j0, j1] = bessel01(r);
    return std::pair{c * std::sqrt(r) * j0, c * (j0 / (2 * std::sqrt(r)) - std::sqrt(r) * j1)};
  };
  CHECK(bessel01(2.404825557695773).first == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(bessel01(1.0).first == doctest::Approx(0.7651976865579666).epsilon(1e-15));
  InitialData init;
  init.r_init = 1.0;
  init.v = ModeVector::Constant(1, v_ref(1.0).first);
  init.dv = ModeVector::Constant(1, v_ref(1.0).second);
  auto t = integrate(sys, init, grid(1.0, 20.0, 380));
  double err = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto [v, dv] = v_ref(t.r[i]);
    err = std::max({err, std::abs(t.v[i][0] - v), std::abs(t.dv[i][0] - dv)});
  }
  MESSAGE("max error against the series ", err);
  CHECK(err <= 1e-6);
}

TEST_CASE("two-shell medium: frequency doubles after r = 2") {
  LayeredMedium m;
  m.interfaces = {2.0};
  m.nu = {1.0, 4.0};
  m.inner_radius = 0.5;
  auto fg = build_example62(m);
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(fg.field), 1.0, 12.0);
  REQUIRE(sys.restart_radii() == std::vector<double>{2.0});
  auto t = integrate(sys, InitialData::unit(1, 1.0), grid(1.0, 12.0, 77));
  const auto at2 = t.index_of(2.0);
  REQUIRE(at2 != std::size_t(-1));
  CHECK(t.restart[at2]);
  auto exact = [](double r) {
    if (r <= 2.0)
      return std::pair{std::sin(r - 1.0), std::cos(r - 1.0)};
    const double s = 2.0 * (r - 2.0);
    return std::pair{std::sin(1.0) * std::cos(s) + 0.5 * std::cos(1.0) * std::sin(s),
                     -2.0 * std::sin(1.0) * std::sin(s) + std::cos(1.0) * std::cos(s)};
  };
  double err = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto [v, dv] = exact(t.r[i]);
    err = std::max({err, std::abs(t.v[i][0] - v), std::abs(t.dv[i][0] - dv)});
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("radial coupled system equals independent scalar mode equations") {
  auto model = PotentialModel::constant(3, 1.0);
  model.long_range = {1.0, 0.5};
  model.short_range = {cplx(0.0, 1.0), 1.5};
  model.inner_radius = 0.5;
  auto fg = build_example61(model);
  auto basis = basis_of(3, 2);
  auto sys = RadialSystem::assemble(basis, handle(fg.field), 1.0, 15.0);
  const auto g = grid(1.0, 15.0, 140);
  using State = std::array<double, 4>; // Re v, Im v, Re v', Im v'
  namespace ode = boost::numeric::odeint;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto init = InitialData::random(basis->size(), 1.0, seed);
    const auto t = integrate(sys, init, g);
    for (std::size_t k = 0; k < basis->size(); ++k) {
      const double lam = basis->eigenvalues()[k];
      auto rhs = [lam](const State &x, State &d, double r) {
        const cplx a = lam / (r * r) - 1.0 + std::pow(r, -0.5) + cplx(0.0, 1.0) * std::pow(r, -1.5);
        const cplx y = cplx(x[0], x[1]) * a;
        d = {x[2], x[3], y.real(), y.imag()};
      };
      State x{init.v[Eigen::Index(k)].real(), init.v[Eigen::Index(k)].imag(), init.dv[Eigen::Index(k)].real(),
              init.dv[Eigen::Index(k)].imag()};
      double r = 1.0, worst = 0.0;
      for (std::size_t i = 1; i < t.size(); ++i) {
        ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(1e-13, 1e-13), rhs, x, r,
                                t.r[i], 1e-3);
        r = t.r[i];
        const cplx v(x[0], x[1]);
        worst = std::max(worst, std::abs(t.v[i][Eigen::Index(k)] - v) / std::max(1.0, std::abs(v)));
      }
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("linearity") {
  LayeredMedium m;
  m.interfaces = {2.0, 3.0, 5.0};
  m.nu = {1.0, 1.5, 2.5, 4.0};
  m.inner_radius = 0.5;
  m.mu_short = {cplx(0.3, 0.2), 1.5};
  auto fg = build_example62(m);
  auto sys = RadialSystem::assemble(basis_of(3, 2), handle(fg.field), 1.0, 12.0);
  const auto g = grid(1.0, 12.0, 110);
  const auto a = InitialData::random(sys.size(), 1.0, 5), b = InitialData::random(sys.size(), 1.0, 6);
  const cplx alpha(0.7, -1.3), beta(-2.0, 0.4);
  InitialData c{1.0, alpha * a.v + beta * b.v, alpha * a.dv + beta * b.dv};
  const auto ta = integrate(sys, a, g), tb = integrate(sys, b, g), tc = integrate(sys, c, g);
  REQUIRE(ta.size() == tc.size());
  double worst = 0;
  for (std::size_t i = 0; i < tc.size(); ++i) {
    worst = std::max(worst, rel_diff(alpha * ta.v[i] + beta * tb.v[i], tc.v[i]));
    worst = std::max(worst, rel_diff(alpha * ta.dv[i] + beta * tb.dv[i], tc.dv[i]));
  }
  CHECK(worst <= 1e-8);
  const auto ts = ta.scaled(alpha);
  CHECK(ts.v.back() == alpha * ta.v.back());
}

TEST_CASE("Wronskian across jumps") {
  LayeredMedium m;
  m.interfaces = {2.0, 3.0, 5.0};
  m.nu = {1.0, 1.5, 2.5, 4.0};
  m.inner_radius = 0.5;
  auto fg = build_example62(m);
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(fg.field), 1.0, 20.0);
  auto t = integrate(sys, InitialData::random(1, 1.0, 11), grid(1.0, 20.0, 190));
  auto w = [&](std::size_t i) { return (std::conj(t.v[i][0]) * t.dv[i][0]).imag(); };
  const double w0 = w(0);
  CHECK(std::abs(w0) > 0.1);
  double worst = 0;
  for (std::size_t i = 1; i < t.size(); ++i)
    worst = std::max(worst, std::abs(w(i) - w0) / (t.r[i] - t.r[0]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("halving the tolerance") {
  auto model = PotentialModel::constant(3, 1.0);
  model.long_range = {1.0, 0.5};
  model.inner_radius = 0.5;
  auto fg = build_example61(model);
  auto sys = RadialSystem::assemble(basis_of(3, 1), handle(fg.field), 1.0, 25.0);
  const auto init = InitialData::random(sys.size(), 1.0, 3);
  for (double tol : {1e-7, 1e-8, 1e-9}) {
    IntegrateOptions o1, o2;
    o1.tolerance = tol;
    o2.tolerance = tol / 2;
    const std::vector<double> g{25.0};
    const auto t1 = integrate(sys, init, g, o1), t2 = integrate(sys, init, g, o2);
    CHECK(rel_diff(t1.v.back(), t2.v.back()) < 10 * tol);
    CHECK(rel_diff(t1.dv.back(), t2.dv.back()) < 10 * tol);
  }
}

TEST_CASE("growth overflow keeps the partial trajectory") {
  CoefficientField f = build_example61(PotentialModel::constant(3, 1.0)).field;
  f.q0 = [](double, const Direction &, Side) { return 100.0; };
  f.q = [](double, const Direction &, Side) { return cplx(100.0); };
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(f), 1.0, 50.0);
  auto t = integrate(sys, InitialData::unit(1, 1.0), grid(1.0, 50.0, 49));
  CHECK(t.status == Trajectory::Status::GrowthOverflow);
  CHECK(t.stop_radius > 20.0);
  CHECK(t.stop_radius < 26.0);
  CHECK(t.r.back() < t.stop_radius + 1e-12);
  CHECK(t.size() > 10);
  CHECK(to_string(t.status) == "growth overflow");
}

TEST_CASE("initial data and grid errors") {
  auto fg = build_example61(PotentialModel::constant(3, 1.0));
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(fg.field), 1.0, 10.0);
  InitialData zero{1.0, ModeVector::Zero(1), ModeVector::Zero(1)};
  CHECK_THROWS_AS(integrate(sys, zero, grid(1.0, 10.0, 9)), InvalidArgument);
  CHECK_THROWS_AS(integrate(sys, InitialData::unit(2, 1.0), grid(1.0, 10.0, 9)), InvalidArgument);
  const std::vector<double> outside{2.0, 11.0};
  CHECK_THROWS_AS(integrate(sys, InitialData::unit(1, 1.0), outside), InvalidArgument);
}

TEST_CASE("u from v") {
  auto fg = build_example61(PotentialModel::constant(3, 1.0));
  auto basis = basis_of(3, 0);
  auto sys = RadialSystem::assemble(basis, handle(fg.field), 1.0, 10.0);
  auto t = integrate(sys, InitialData::unit(1, 1.0), grid(1.0, 10.0, 18));
  auto s = u_from_v(t, *basis);
  const double y00 = 1.0 / std::sqrt(4 * std::numbers::pi);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = t.r[i];
    for (Eigen::Index k = 0; k < s.u[i].size(); ++k) {
      CHECK(std::abs(s.u[i][k] - std::sin(r - 1.0) / r * y00) < 1e-8);
      CHECK(std::abs(s.du[i][k] - (std::cos(r - 1.0) / r - std::sin(r - 1.0) / (r * r)) * y00) < 1e-8);
    }
  }

  Trajectory two;
  two.dimension = 2;
  two.r = {4.0};
  two.v = {ModeVector::Constant(1, cplx(3.0, 1.0))};
  two.dv = {ModeVector::Zero(1)};
  auto b2 = SphereBasis::build(2, 0);
  auto s2 = u_from_v(two, b2);
  const cplx expect = cplx(3.0, 1.0) * 0.5 / std::sqrt(2 * std::numbers::pi);
  for (Eigen::Index k = 0; k < s2.u[0].size(); ++k) {
    CHECK(std::abs(s2.u[0][k] - expect) < 1e-15);
    CHECK(std::abs(s2.du[0][k] + expect / 8.0) < 1e-15);
  }

  two.v = {ModeVector::Zero(1)};
  auto z = u_from_v(two, b2);
  CHECK(z.u[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trajectory CSV") {
  auto fg = build_example61(PotentialModel::constant(3, 1.0));
  auto sys = RadialSystem::assemble(basis_of(3, 0), handle(fg.field), 1.0, 3.0);
  auto t = integrate(sys, InitialData::unit(1, 1.0), grid(1.0, 3.0, 2));
  std::ostringstream out;
  write_trajectory_csv(out, t);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "r,v0_re,v0_im,dv0_re,dv0_im,restart");
  int rows = 0;
  while (std::getline(in, line))
    ++rows;
  CHECK(rows == 3);
}
