#include "kgc/dist_calc.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "numfmt.hpp"

namespace kgc {

namespace {

double gk(const std::function<double(double)> &f, double a, double b) {
  if (!(b > a))
    return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-10, &err);
}

// Splits [a, b] at the given interior points and sums the integrals.
double split_integral(const std::function<double(double)> &f, double a, double b, std::vector<double> cuts) {
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0, x = a;
  for (double c : cuts) {
    if (c <= x || c >= b)
      continue;
    s += gk(f, x, c);
    x = c;
  }
  return s + gk(f, x, b);
}

} // namespace

void PiecewiseFunction::validate() const {
  if (!(hi > lo))
    throw InvalidArgument("piecewise function: empty domain");
  if (pieces.size() != breaks.size() + 1 || slopes.size() != pieces.size())
    throw InvalidArgument("piecewise function: need one piece and one slope per interval");
  for (std::size_t k = 0; k < breaks.size(); ++k) {
    if (!(breaks[k] > lo && breaks[k] < hi))
      throw InvalidArgument("piecewise function: breakpoint outside the open domain");
    if (k > 0 && !(breaks[k] > breaks[k - 1]))
      throw InvalidArgument("piecewise function: breakpoints must be strictly increasing");
  }
}

std::size_t PiecewiseFunction::piece_of(double r) const {
  return std::size_t(std::upper_bound(breaks.begin(), breaks.end(), r) - breaks.begin());
}

double PiecewiseFunction::operator()(double r) const { return pieces[piece_of(r)](r); }

double PiecewiseFunction::left_limit(double r) const {
  return pieces[std::size_t(std::lower_bound(breaks.begin(), breaks.end(), r) - breaks.begin())](r);
}

double PiecewiseFunction::jump(std::size_t k) const { return pieces[k + 1](breaks[k]) - pieces[k](breaks[k]); }

DerivativeSignCertificate derivative_sign(const PiecewiseFunction &f, int density) {
  f.validate();
  if (density < 2)
    throw InvalidArgument("derivative_sign: need at least two samples per piece");
  DerivativeSignCertificate c;
  for (std::size_t k = 0; k < f.pieces.size(); ++k) {
    const double a = k == 0 ? f.lo : f.breaks[k - 1];
    const double b = k == f.breaks.size() ? f.hi : f.breaks[k];
    for (int j = 0; j < density; ++j) {
      const double t = a + (b - a) * j / (density - 1);
      const double d = f.slopes[k](t);
      if (d < -1e-12) {
        c.nonnegative = false;
        c.witness = DerivativeSignCertificate::Kind::Interval;
        c.a = std::max(a, t - (b - a) / (density - 1));
        c.b = std::min(b, t + (b - a) / (density - 1));
        c.value = d;
        return c;
      }
    }
    if (k < f.breaks.size()) {
      const double jmp = f.jump(k);
      if (jmp < 0.0) {
        c.nonnegative = false;
        c.witness = DerivativeSignCertificate::Kind::Jump;
        c.a = c.b = f.breaks[k];
        c.value = jmp;
        return c;
      }
    }
  }
  return c;
}

MonotoneVerdict is_nondecreasing(const PiecewiseFunction &f, std::span<const double> grid) {
  f.validate();
  for (double b : f.breaks)
    if (b >= grid.front() && b <= grid.back() && !std::binary_search(grid.begin(), grid.end(), b))
      throw InvalidArgument("is_nondecreasing: grid is missing breakpoint " + fmt_double(b));
  MonotoneVerdict v;
  double prev = f(grid.front());
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double cur = f(grid[i]);
    if (cur < prev - 1e-12 * std::max(1.0, std::abs(prev))) {
      v.nondecreasing = false;
      v.r_prev = grid[i - 1];
      v.r = grid[i];
      v.drop = cur - prev;
      return v;
    }
    prev = cur;
  }
  return v;
}

Bump::Bump(double center, double half_width) : c_(center), w_(half_width) {
  if (!(half_width > 0.0))
    throw InvalidArgument("bump: half width must be positive");
  z_ = 1.0;
  z_ = gk([this](double r) { return (*this)(r); }, lo(), hi());
}

double Bump::operator()(double r) const {
  const double t = (r - c_) / w_;
  if (!(std::abs(t) < 1.0))
    return 0.0;
  return std::exp(-1.0 / (1.0 - t * t)) / z_;
}

double Bump::derivative(double r) const {
  const double t = (r - c_) / w_;
  if (!(std::abs(t) < 1.0))
    return 0.0;
  const double s = 1.0 - t * t;
  return (*this)(r) * (-2.0 * t / (s * s)) / w_;
}

QuotientReport mollified_quotient_check(const PiecewiseFunction &f, std::span<const Bump> bumps,
                                        std::span<const double> hs, double tol) {
  f.validate();
  QuotientReport rep;
  rep.min_integral = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    const auto &phi = bumps[i];
    if (phi.lo() < f.lo)
      throw InvalidArgument("mollified_quotient_check: bump support leaves the domain");
    for (double h : hs) {
      if (!(h > 0.0) || phi.hi() + h > f.hi)
        throw InvalidArgument("mollified_quotient_check: shifted support leaves the domain");
      std::vector<double> cuts;
      for (double b : f.breaks) {
        cuts.push_back(b);
        cuts.push_back(b - h);
      }
      const double I = split_integral([&](double r) { return (f(r + h) - f(r)) * phi(r); }, phi.lo(), phi.hi(), cuts);
      rep.samples.push_back({i, h, I});
      rep.min_integral = std::min(rep.min_integral, I);
      if (I < -tol)
        rep.nonnegative = false;
    }
  }
  return rep;
}

double integrate_against_derivative(const std::function<double(double)> &f, std::span<const double> breaks,
                                    const Bump &phi) {
  return split_integral([&](double r) { return f(r) * phi.derivative(r); }, phi.lo(), phi.hi(),
                        std::vector<double>(breaks.begin(), breaks.end()));
}

double integrate_against(const std::function<double(double)> &g, std::span<const double> breaks, const Bump &phi) {
  return split_integral([&](double r) { return g(r) * phi(r); }, phi.lo(), phi.hi(),
                        std::vector<double>(breaks.begin(), breaks.end()));
}

PiecewiseFunction random_monotone_function(std::uint64_t seed, double lo, double hi, int nbreaks,
                                           std::optional<double> injected_drop, std::size_t *injected_break) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  PiecewiseFunction f;
  f.lo = lo;
  f.hi = hi;
  const double margin = 0.02 * (hi - lo);
  while (int(f.breaks.size()) < nbreaks) {
    const double b = lo + margin + (hi - lo - 2 * margin) * u01(gen);
    if (std::none_of(f.breaks.begin(), f.breaks.end(), [&](double x) { return std::abs(x - b) < 1e-3; }))
      f.breaks.push_back(b);
  }
  std::sort(f.breaks.begin(), f.breaks.end());
  std::size_t flip = f.breaks.size();
  if (injected_drop && !f.breaks.empty())
    flip = std::size_t(u01(gen) * double(f.breaks.size())) % f.breaks.size();
  if (injected_break)
    *injected_break = flip;

  double start = lo, base = u01(gen);
  for (std::size_t k = 0; k <= f.breaks.size(); ++k) {
    const double alpha = u01(gen);
    const double beta = 0.05 * u01(gen);
    const double s = start;
    f.pieces.push_back([=](double r) { return base + alpha * (r - s) + beta * std::pow(r - s, 3); });
    f.slopes.push_back([=](double r) { return alpha + 3.0 * beta * (r - s) * (r - s); });
    if (k == f.breaks.size())
      break;
    const double end = f.breaks[k];
    const double jump = k == flip ? -*injected_drop : u01(gen);
    base = base + alpha * (end - s) + beta * std::pow(end - s, 3) + jump;
    start = end;
  }
  return f;
}

ConstructedWitness constructed_witness(double slope, double jump, double at, double h0) {
  if (!(jump > slope * h0))
    throw InvalidArgument("constructed_witness: jump must exceed slope*h0");
  ConstructedWitness w;
  w.f.lo = at - 3.0 * h0;
  w.f.hi = at + 3.0 * h0;
  w.f.breaks = {at};
  w.f.pieces = {[=](double r) { return slope * r; }, [=](double r) { return slope * r - jump; }};
  w.f.slopes = {[=](double) { return slope; }, [=](double) { return slope; }};
  w.h0 = h0;
  w.r0 = at - 0.75 * h0;
  w.r1 = at - 0.25 * h0;
  w.eta0 = jump - slope * h0;
  return w;
}

bool LemmaASuiteReport::pass() const {
  return failures.empty() && nonnegative_monotone == nonnegative_total &&
         nonnegative_quotient_ok == nonnegative_total && injected_flagged == injected_total &&
         injected_located == injected_total && constructed_within == constructed_total;
}

LemmaASuiteReport run_lemma_a_suite(std::uint64_t seed, int instances, int constructed) {
  LemmaASuiteReport rep;
  rep.seed = seed;
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double lo = 1.0, hi = 11.0;

  auto grid_for = [&](const PiecewiseFunction &f) {
    std::vector<double> g;
    for (int i = 0; i <= 4000; ++i)
      g.push_back(lo + (hi - lo) * i / 4000.0);
    g.insert(g.end(), f.breaks.begin(), f.breaks.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  };

  for (int i = 0; i < instances; ++i) {
    const std::uint64_t s = gen();
    const int nb = 3 + int(u01(gen) * 10);
    const auto f = random_monotone_function(s, lo, hi, nb);
    ++rep.nonnegative_total;
    const auto cert = derivative_sign(f);
    if (!cert.nonnegative) {
      rep.failures.push_back("instance " + std::to_string(i) + ": generator produced a negative derivative");
      continue;
    }
    const auto grid = grid_for(f);
    const auto mono = is_nondecreasing(f, grid);
    if (mono.nondecreasing)
      ++rep.nonnegative_monotone;
    else
      rep.failures.push_back("instance " + std::to_string(i) + ": drop " + fmt_double(mono.drop) + " at r=" +
                             fmt_double(mono.r));
    std::vector<Bump> bumps;
    for (int k = 0; k < 5; ++k) {
      const double w = 0.05 + 0.25 * u01(gen);
      const double c = lo + w + (hi - lo - 2 * w - 0.3) * u01(gen);
      bumps.emplace_back(c, w);
    }
    const double hs[] = {0.01, 0.05, 0.2};
    if (mollified_quotient_check(f, bumps, hs).nonnegative)
      ++rep.nonnegative_quotient_ok;
    else
      rep.failures.push_back("instance " + std::to_string(i) + ": negative mollified quotient");
  }

  for (int i = 0; i < instances; ++i) {
    const std::uint64_t s = gen();
    const int nb = 3 + int(u01(gen) * 10);
    const double eta = 0.1 + 0.9 * u01(gen);
    std::size_t idx = 0;
    const auto f = random_monotone_function(s, lo, hi, nb, eta, &idx);
    ++rep.injected_total;
    const double b = f.breaks[idx];
    const auto cert = derivative_sign(f);
    if (!cert.nonnegative && cert.witness == DerivativeSignCertificate::Kind::Jump && cert.a == b &&
        cert.value < 0.0)
      ++rep.injected_flagged;
    else
      rep.failures.push_back("injected " + std::to_string(i) + ": negative jump at " + fmt_double(b) +
                             " not certified");
    const auto mono = is_nondecreasing(f, grid_for(f));
    if (!mono.nondecreasing && mono.r_prev < b && b <= mono.r)
      ++rep.injected_located;
    else
      rep.failures.push_back("injected " + std::to_string(i) + ": violation not located at " + fmt_double(b));
  }

  for (int i = 0; i < constructed; ++i) {
    const double slope = u01(gen);
    const double jump = 1.0 + 2.0 * u01(gen);
    const double h0 = 0.1 + 0.4 * u01(gen);
    const double at = 3.0 + 4.0 * u01(gen);
    const auto w = constructed_witness(slope, jump, at, h0);
    ++rep.constructed_total;
    const Bump phi[] = {Bump(0.5 * (w.r0 + w.r1), 0.5 * (w.r1 - w.r0))};
    const double hs[] = {w.h0};
    const double I = mollified_quotient_check(w.f, phi, hs).samples.front().integral;
    const double rel = std::abs(I - (-w.eta0)) / w.eta0;
    rep.worst_relative_error = std::max(rep.worst_relative_error, rel);
    if (rel <= 0.1 && I <= -w.eta0 / 3.0)
      ++rep.constructed_within;
    else
      rep.failures.push_back("constructed " + std::to_string(i) + ": integral " + fmt_double(I) + " vs -eta0 " +
                             fmt_double(-w.eta0));
  }
  return rep;
}

} // namespace kgc
