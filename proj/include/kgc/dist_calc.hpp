#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgc/core.hpp"

namespace kgc {

/// Right-continuous piecewise smooth function on [lo, hi]: piece k lives on
/// [breaks[k-1], breaks[k]) and the value at a breakpoint is the right piece.
struct PiecewiseFunction {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> breaks;
  std::vector<std::function<double(double)>> pieces;
  std::vector<std::function<double(double)>> slopes;

  void validate() const;
  std::size_t piece_of(double r) const;
  double operator()(double r) const;
  double left_limit(double r) const;
  /// f(b+) - f(b-) at breaks[k].
  double jump(std::size_t k) const;
};

struct DerivativeSignCertificate {
  enum class Kind { None, Interval, Jump };

  bool nonnegative = true;
  Kind witness = Kind::None;
  /// Interval [a, b] with a negative sampled slope, or a = b = the breakpoint.
  double a = 0.0;
  double b = 0.0;
  /// The negative slope or the negative jump.
  double value = 0.0;
};

/// Smooth part sampled at `density` points per piece (>= -1e-12) plus the sign of every jump.
DerivativeSignCertificate derivative_sign(const PiecewiseFunction &f, int density = 64);

struct MonotoneVerdict {
  bool nondecreasing = true;
  /// First grid pair (r_prev, r) with f(r) < f(r_prev).
  double r_prev = 0.0;
  double r = 0.0;
  double drop = 0.0;
};

/// Pointwise check over a grid that must contain every breakpoint.
MonotoneVerdict is_nondecreasing(const PiecewiseFunction &f, std::span<const double> grid);

/// phi(r) = exp(-1/(1-t^2)) / Z, t = (r - center)/half_width, with Z making the integral 1.
class Bump {
public:
  Bump(double center, double half_width);
  double center() const { return c_; }
  double half_width() const { return w_; }
  double lo() const { return c_ - w_; }
  double hi() const { return c_ + w_; }
  double operator()(double r) const;
  double derivative(double r) const;

private:
  double c_;
  double w_;
  double z_ = 1.0;
};

struct QuotientSample {
  std::size_t bump = 0;
  double h = 0.0;
  /// Integral of (f(r+h) - f(r)) phi(r) dr.
  double integral = 0.0;
};

struct QuotientReport {
  std::vector<QuotientSample> samples;
  double min_integral = 0.0;
  /// All integrals >= -tol.
  bool nonnegative = true;
};

/// Adaptive quadrature of (f(r+h) - f(r)) phi(r), split where f(r) or f(r+h) jumps.
QuotientReport mollified_quotient_check(const PiecewiseFunction &f, std::span<const Bump> bumps,
                                        std::span<const double> hs, double tol = 1e-9);

/// Integral of f phi' over the support of phi, split at the breakpoints of f.
double integrate_against_derivative(const std::function<double(double)> &f, std::span<const double> breaks,
                                    const Bump &phi);
/// Integral of g phi over the support of phi, split at the given radii.
double integrate_against(const std::function<double(double)> &g, std::span<const double> breaks, const Bump &phi);

struct LemmaASuiteReport {
  std::uint64_t seed = 0;
  int nonnegative_total = 0;
  int nonnegative_monotone = 0;
  int nonnegative_quotient_ok = 0;
  int injected_total = 0;
  int injected_flagged = 0;
  int injected_located = 0;
  int constructed_total = 0;
  int constructed_within = 0;
  double worst_relative_error = 0.0;
  std::vector<std::string> failures;

  bool pass() const;
};

/// Random right-continuous functions with nonnegative slopes and jumps; optionally one jump flipped to -eta.
PiecewiseFunction random_monotone_function(std::uint64_t seed, double lo, double hi, int breaks,
                                           std::optional<double> injected_drop = std::nullopt,
                                           std::size_t *injected_break = nullptr);

/// f = s r with one downward jump J at `at`. On [r0, r1] every window
/// (r, r + h0] contains the jump, so f(r + h0) - f(r) = s h0 - J = -eta0.
struct ConstructedWitness {
  PiecewiseFunction f;
  double r0 = 0.0;
  double r1 = 0.0;
  double h0 = 0.0;
  double eta0 = 0.0;
};
ConstructedWitness constructed_witness(double slope, double jump, double at, double h0);

LemmaASuiteReport run_lemma_a_suite(std::uint64_t seed, int instances = 100, int constructed = 10);

} // namespace kgc
