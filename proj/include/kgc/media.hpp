#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgc/coefficients.hpp"

namespace kgc {

/// coefficient * r^{-exponent}
struct PowerLaw {
  double coefficient = 0.0;
  double exponent = 0.0;

  double value(double r) const;
  double derivative(double r) const;
};

struct ComplexPowerLaw {
  cplx coefficient = 0.0;
  double exponent = 0.0;

  cplx value(double r) const;
};

/// Radial profile sampled at increasing radii, linear in between, constant
/// beyond the ends. A repeated radius encodes a jump: the first row is the
/// limit from below, the second the value from above.
struct TabulatedProfile {
  std::vector<double> radii;
  std::vector<double> values;

  void validate() const;
  double value(double r, Side side = Side::Above) const;
  /// Slope of the linear piece containing r (from above).
  double slope(double r) const;
  std::vector<double> jump_radii() const;
  /// Sum of jumps in (r, r + h].
  double jump_sum(double r, double h) const;
};

/// Potential -lambda(x) + V_long(x) + V_short(x): the long/short-range
/// perturbation model of a positive, radially nondecreasing main part.
struct PotentialModel {
  int dimension = 3;
  double inner_radius = 1.0;
  double epsilon = 0.5;
  double m0 = 1.0;
  bool radial = true;
  std::string label = "potential";

  RealEvaluator lambda;
  /// Change of lambda's continuous part over [r, r+h]; unset for piecewise constant lambda.
  std::function<double(double r, const Direction &omega, double h)> lambda_smooth_increment;
  /// Radial derivative of lambda's continuous part; unset means zero.
  RealEvaluator lambda_smooth_dr;
  std::vector<double> jump_radii;
  std::function<std::vector<double>(const Direction &omega)> ray_breaks;

  PowerLaw long_range;
  ComplexPowerLaw short_range;

  static PotentialModel constant(int dimension, double lambda);
  static PotentialModel tabulated(int dimension, TabulatedProfile profile);
};

struct FieldAndGauges {
  CoefficientField field;
  RadialGauges gauges;
};

/// Q0 = -lambda + V_long, Q1 = V_short + (N-1)(N-3)/(4r^2), Q0r(x; h) the
/// integral mean of dV_long/dr over [r, r+h] (minus the continuous part of
/// lambda's increment), gauges h = r^{-1-epsilon/2}, F = log r.
FieldAndGauges build_example61(const PotentialModel &model);

/// Piecewise constant mu0 over concentric shells or planar slabs, plus
/// optional long/short-range perturbations.
struct LayeredMedium {
  enum class Geometry { Shells, Slabs };

  Geometry geometry = Geometry::Shells;
  int dimension = 3;
  /// Shell radii, or slab cut levels along x_N; strictly increasing.
  std::vector<double> interfaces;
  /// interfaces.size() + 1 layer values, inner to outer or bottom to top.
  std::vector<double> nu;
  double lambda = 1.0;
  double inner_radius = 1.0;
  double epsilon = 0.5;
  PowerLaw mu_long;
  ComplexPowerLaw mu_short;

  void validate() const;
  /// Layer index (storage order) of the point r*omega, right-continuous in r.
  std::size_t layer_at(double r, const Direction &omega, Side side = Side::Above) const;
  double mu0(double r, const Direction &omega, Side side = Side::Above) const;
  /// Radii where the ray through omega crosses an interface.
  std::vector<double> ray_breaks(const Direction &omega) const;
  /// Slabs: storage index of the layer containing the origin; shells: 0.
  std::size_t origin_layer() const;
  /// Layer index k as counted from the origin layer (k = 0), negative below it.
  int signed_index(std::size_t layer) const;
};

FieldAndGauges build_example62(const LayeredMedium &medium);

struct SeparationVerdict {
  bool pass = true;
  /// First violating interface, storage index: between layer i and i + 1.
  std::optional<std::size_t> interface;
  int k_lower = 0;
  int k_upper = 0;
  double level = 0.0;
  std::string detail;
};

/// (nu_{k+1} - nu_k)(n^{(k)} . x) >= 0 on every interface.
SeparationVerdict check_separating_condition(const LayeredMedium &medium);

struct RayMonotonicityVerdict {
  bool pass = true;
  std::size_t rays_checked = 0;
  std::optional<Direction> omega;
  double radius = 0.0;
  double before = 0.0;
  double after = 0.0;
};

/// mu0(r omega) nondecreasing in r on every sampled ray over (0, r_max].
RayMonotonicityVerdict check_theorem72_hypothesis(const LayeredMedium &medium,
                                                  std::span<const Direction> rays, double r_max,
                                                  int samples_per_ray = 400);

/// Deterministic quasi-uniform directions (Fibonacci lattice on S^2, offset uniform on S^1).
std::vector<Direction> low_discrepancy_rays(int dimension, int count = 64);

struct SurfaceSample {
  Direction point;
  Direction normal;
};

/// Rows of "x,y[,z],nx,ny[,nz]"; a non-numeric first line is taken as a header.
std::vector<SurfaceSample> read_surface_samples(std::istream &in, int dimension);

struct NormalConeVerdict {
  bool pass = true;
  std::optional<std::size_t> row;
  double value = 0.0;
};

/// outward normal . x >= 0 at every supplied surface sample.
NormalConeVerdict check_normal_cone(std::span<const SurfaceSample> samples);

} // namespace kgc
