#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgc/core.hpp"
#include "kgc/sphere_basis.hpp"

namespace kgc {

using RealEvaluator = std::function<double(double r, const Direction &omega, Side side)>;
using ComplexEvaluator = std::function<cplx(double r, const Direction &omega, Side side)>;

/// Ingredients of a field of the form q = -lambda + V_long + V_short, kept so the
/// auditor can check the decay hypotheses on the potentials themselves.
struct PotentialParts {
  RealEvaluator lambda;
  std::function<double(double r, const Direction &omega)> long_range;
  std::function<double(double r, const Direction &omega)> long_range_dr;
  std::function<cplx(double r, const Direction &omega)> short_range;
  double epsilon = 0.5;
  double lambda_min = 0.0;
};

/// Coefficient q(x) of -Laplace u + q u = 0 on |x| > R0 with the splitting
/// Q = q + (N-1)(N-3)/(4r^2) = Q0 + Q1.
///
/// Evaluators are right-continuous in r: at a declared jump radius
/// Side::Above returns the limit from above (the default), Side::Below the
/// limit from below. `jump_radii` lists radii where the field jumps on every
/// ray; fields that jump across non-spherical surfaces set `ray_breaks`, which
/// returns the jump radii along one ray.
struct CoefficientField {
  int dimension = 3;
  double inner_radius = 1.0;
  double h0 = 1e-4;
  bool radial = true;
  std::string label;

  ComplexEvaluator q;
  RealEvaluator q0;
  ComplexEvaluator q1;
  /// Q0r(x): the h -> 0 limit of the difference-quotient dominator.
  RealEvaluator q0r;
  /// Q0r(x; h), 0 < h <= h0, dominating the forward quotient of Q0.
  std::function<double(double r, const Direction &omega, double h)> q0r_h;

  std::vector<double> jump_radii;
  std::function<std::vector<double>(const Direction &omega)> ray_breaks;
  /// Extra directions used, with the quadrature nodes, for sampled sup/inf over spheres.
  std::vector<Direction> probes;

  std::optional<PotentialParts> parts;

  double Q0(double r, const Direction &w, Side s = Side::Above) const { return q0(r, w, s); }
  cplx Q1(double r, const Direction &w, Side s = Side::Above) const { return q1(r, w, s); }
  cplx Q(double r, const Direction &w, Side s = Side::Above) const { return q0(r, w, s) + q1(r, w, s); }
  cplx q_at(double r, const Direction &w, Side s = Side::Above) const { return q(r, w, s); }
  double Q0r(double r, const Direction &w, Side s = Side::Above) const { return q0r(r, w, s); }
  double Q0r_h(double r, const Direction &w, double h) const { return q0r_h(r, w, h); }

  /// Jump radii along the ray through omega.
  std::vector<double> breaks_along(const Direction &omega) const;
  /// Sorted union of jump radii in the open interval (lo, hi) over the given rays.
  std::vector<double> breaks_between(double lo, double hi, std::span<const Direction> rays) const;
};

using FieldHandle = std::shared_ptr<const CoefficientField>;

/// Directions over which spherical sup/inf are sampled: quadrature nodes plus field probes.
std::vector<Direction> sample_directions(const SphereBasis &basis, const CoefficientField &field);

/// Q(x) = q(x) + (N-1)(N-3)/(4 r^2).
ComplexEvaluator shift_to_Q(ComplexEvaluator q, int dimension);

/// Gauge functions h, F and the constants the audit certifies.
struct RadialGauges {
  enum class Kind { Power, Kato, Custom };

  Kind kind = Kind::Power;
  double epsilon = 0.5;
  std::function<double(double)> h;
  std::function<double(double)> F;
  std::function<double(double)> F_r;
  std::string h_label;
  std::string F_label;

  double c0 = std::numeric_limits<double>::quiet_NaN();
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();

  /// h(r) = r^{-1-epsilon/2}, F(r) = log r.
  static RadialGauges power(double epsilon);
  /// h(r) = 2/r, F(r) = log r.
  static RadialGauges kato();

  /// Integral of h over [a, b]; b may be +infinity. Closed forms for the
  /// catalog gauges, adaptive quadrature otherwise.
  double integral_h(double a, double b) const;
  /// Whether h is integrable at infinity, when known analytically.
  std::optional<bool> integrable() const;
};

/// a(r) = h(r)^{-1} sup |Q1| over the sampled sphere.
double a_of_r(const CoefficientField &field, const RadialGauges &gauges, double r,
              std::span<const Direction> directions);
/// b(r) = inf [-(Q0 + h^{-1} Q0r)] over the sampled sphere.
double b_of_r(const CoefficientField &field, const RadialGauges &gauges, double r,
              std::span<const Direction> directions);
/// p(r) = inf [-(2 Q0 + r Q0r)] over the sampled sphere.
double p_of_r(const CoefficientField &field, double r, std::span<const Direction> directions);

/// Largest |q + (N-1)(N-3)/(4r^2) - Q0 - Q1| over the given sample points.
double decomposition_residual(const CoefficientField &field, std::span<const double> radii,
                              std::span<const Direction> directions);

} // namespace kgc
