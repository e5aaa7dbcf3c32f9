#include "kgc/media.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>

namespace kgc {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> gl8_x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> gl8_w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};

template <class F> double interval_mean(F &&f, double a, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < gl8_x.size(); ++i)
    s += gl8_w[i] * f(a + 0.5 * h * (gl8_x[i] + 1.0));
  return 0.5 * s;
}

std::size_t count_below(const std::vector<double> &sorted, double x, bool inclusive) {
  auto it = inclusive ? std::upper_bound(sorted.begin(), sorted.end(), x)
                      : std::lower_bound(sorted.begin(), sorted.end(), x);
  return std::size_t(it - sorted.begin());
}

} // namespace

double PowerLaw::value(double r) const {
  return coefficient == 0.0 ? 0.0 : coefficient * std::pow(r, -exponent);
}

double PowerLaw::derivative(double r) const {
  return coefficient == 0.0 ? 0.0 : -exponent * coefficient * std::pow(r, -exponent - 1.0);
}

cplx ComplexPowerLaw::value(double r) const {
  return coefficient == 0.0 ? cplx(0.0) : coefficient * std::pow(r, -exponent);
}

void TabulatedProfile::validate() const {
  if (radii.size() != values.size() || radii.size() < 2)
    throw InvalidArgument("tabulated profile: need at least two (radius, value) rows");
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (radii[i] < radii[i - 1])
      throw InvalidArgument("tabulated profile: radii must be nondecreasing");
    if (i >= 2 && radii[i] == radii[i - 1] && radii[i - 1] == radii[i - 2])
      throw InvalidArgument("tabulated profile: a radius may appear at most twice");
  }
  for (double v : values)
    if (!std::isfinite(v))
      throw InvalidArgument("tabulated profile: non-finite value");
}

double TabulatedProfile::value(double r, Side side) const {
  // Index of the first row strictly to the right of r (or at r, for Below).
  const auto it = side == Side::Above ? std::upper_bound(radii.begin(), radii.end(), r)
                                      : std::lower_bound(radii.begin(), radii.end(), r);
  const std::size_t j = std::size_t(it - radii.begin());
  if (j == 0)
    return values.front();
  if (j == radii.size())
    return values.back();
  const double r0 = radii[j - 1], r1 = radii[j];
  if (side == Side::Below && r == r1)
    return values[j];
  if (r1 == r0)
    return values[j];
  const double t = (r - r0) / (r1 - r0);
  return values[j - 1] + t * (values[j] - values[j - 1]);
}

double TabulatedProfile::slope(double r) const {
  const std::size_t j = std::size_t(std::upper_bound(radii.begin(), radii.end(), r) - radii.begin());
  if (j == 0 || j == radii.size())
    return 0.0;
  const double dr = radii[j] - radii[j - 1];
  return dr > 0.0 ? (values[j] - values[j - 1]) / dr : 0.0;
}

std::vector<double> TabulatedProfile::jump_radii() const {
  std::vector<double> out;
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] == radii[i - 1])
      out.push_back(radii[i]);
  return out;
}

double TabulatedProfile::jump_sum(double r, double h) const {
  double s = 0.0;
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] == radii[i - 1] && radii[i] > r && radii[i] <= r + h)
      s += values[i] - values[i - 1];
  return s;
}

PotentialModel PotentialModel::constant(int dimension, double lambda) {
  PotentialModel m;
  m.dimension = dimension;
  m.m0 = lambda;
  m.label = "constant";
  m.lambda = [lambda](double, const Direction &, Side) { return lambda; };
  return m;
}

PotentialModel PotentialModel::tabulated(int dimension, TabulatedProfile profile) {
  profile.validate();
  PotentialModel m;
  m.dimension = dimension;
  m.label = "tabulated";
  m.m0 = *std::min_element(profile.values.begin(), profile.values.end());
  m.jump_radii = profile.jump_radii();
  m.lambda = [profile](double r, const Direction &, Side s) { return profile.value(r, s); };
  m.lambda_smooth_increment = [profile](double r, const Direction &, double h) {
    return profile.value(r + h) - profile.value(r) - profile.jump_sum(r, h);
  };
  m.lambda_smooth_dr = [profile](double r, const Direction &, Side) { return profile.slope(r); };
  return m;
}

FieldAndGauges build_example61(const PotentialModel &model) {
  if (!(model.epsilon > 0.0 && model.epsilon < 2.0))
    throw InvalidArgument("potential model: epsilon must lie in (0, 2)");
  if (!(model.m0 > 0.0))
    throw InvalidArgument("potential model: lower bound m0 of lambda must be positive");
  if (model.dimension != 2 && model.dimension != 3)
    throw InvalidArgument("potential model: dimension must be 2 or 3");
  if (!model.lambda)
    throw InvalidArgument("potential model: lambda evaluator missing");

  const int n = model.dimension;
  const double shift = (n - 1.0) * (n - 3.0) / 4.0;
  const auto lambda = model.lambda;
  const auto vl = model.long_range;
  const auto vs = model.short_range;
  const auto inc = model.lambda_smooth_increment;
  const auto ldr = model.lambda_smooth_dr;

  CoefficientField f;
  f.dimension = n;
  f.inner_radius = model.inner_radius;
  f.radial = model.radial;
  f.label = model.label;
  f.jump_radii = model.jump_radii;
  f.ray_breaks = model.ray_breaks;

  f.q = [=](double r, const Direction &w, Side s) -> cplx {
    return -lambda(r, w, s) + vl.value(r) + vs.value(r);
  };
  f.q0 = [=](double r, const Direction &w, Side s) { return -lambda(r, w, s) + vl.value(r); };
  f.q1 = [=](double r, const Direction &, Side) -> cplx { return vs.value(r) + shift / (r * r); };
  f.q0r = [=](double r, const Direction &w, Side s) {
    const double smooth = ldr ? ldr(r, w, s) : 0.0;
    return -smooth + vl.derivative(r);
  };
  f.q0r_h = [=](double r, const Direction &w, double h) {
    const double smooth = inc ? inc(r, w, h) / h : 0.0;
    return -smooth + interval_mean([&](double s) { return vl.derivative(s); }, r, h);
  };

  PotentialParts parts;
  parts.lambda = lambda;
  parts.long_range = [vl](double r, const Direction &) { return vl.value(r); };
  parts.long_range_dr = [vl](double r, const Direction &) { return vl.derivative(r); };
  parts.short_range = [vs](double r, const Direction &) { return vs.value(r); };
  parts.epsilon = model.epsilon;
  parts.lambda_min = model.m0;
  f.parts = parts;

  return {std::move(f), RadialGauges::power(model.epsilon)};
}

void LayeredMedium::validate() const {
  if (dimension != 2 && dimension != 3)
    throw InvalidArgument("layered medium: dimension must be 2 or 3");
  if (nu.size() != interfaces.size() + 1)
    throw InvalidArgument("layered medium: need exactly one more layer value than interfaces");
  for (std::size_t i = 1; i < interfaces.size(); ++i)
    if (!(interfaces[i] > interfaces[i - 1]))
      throw InvalidArgument("layered medium: interfaces must be strictly increasing");
  for (double v : nu)
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("layered medium: layer values must be positive and bounded "
                            "(mu0 must be bounded below by a positive constant)");
  if (!(lambda > 0.0))
    throw InvalidArgument("layered medium: lambda must be positive");
  if (geometry == Geometry::Shells) {
    if (!interfaces.empty() && !(interfaces.front() > 0.0))
      throw InvalidArgument("layered medium: shell radii must be positive");
  } else {
    const bool has_neg = !interfaces.empty() && interfaces.front() < 0.0;
    const bool has_pos = !interfaces.empty() && interfaces.back() > 0.0;
    if (!has_neg || !has_pos)
      throw InvalidArgument("layered medium: slab cuts need c_{-1} < 0 < c_1");
    for (double c : interfaces)
      if (c == 0.0)
        throw InvalidArgument("layered medium: no slab cut may pass through the origin");
  }
}

std::size_t LayeredMedium::layer_at(double r, const Direction &omega, Side side) const {
  if (geometry == Geometry::Shells)
    return count_below(interfaces, r, side == Side::Above);
  const double wn = omega[std::size_t(dimension - 1)];
  const double xn = r * wn;
  // Moving outward along the ray moves x_N up when wn >= 0 and down otherwise.
  const bool above_in_xn = (side == Side::Above) == (wn >= 0.0);
  return count_below(interfaces, xn, above_in_xn);
}

double LayeredMedium::mu0(double r, const Direction &omega, Side side) const {
  return nu[layer_at(r, omega, side)];
}

std::vector<double> LayeredMedium::ray_breaks(const Direction &omega) const {
  if (geometry == Geometry::Shells)
    return interfaces;
  std::vector<double> out;
  const double wn = omega[std::size_t(dimension - 1)];
  if (wn == 0.0)
    return out;
  for (double c : interfaces) {
    const double r = c / wn;
    if (r > 0.0)
      out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t LayeredMedium::origin_layer() const {
  if (geometry == Geometry::Shells)
    return 0;
  return count_below(interfaces, 0.0, true);
}

int LayeredMedium::signed_index(std::size_t layer) const {
  return int(layer) - int(origin_layer());
}

FieldAndGauges build_example62(const LayeredMedium &medium) {
  medium.validate();
  const double lam = medium.lambda;
  PotentialModel m;
  m.dimension = medium.dimension;
  m.inner_radius = medium.inner_radius;
  m.epsilon = medium.epsilon;
  m.m0 = lam * *std::min_element(medium.nu.begin(), medium.nu.end());
  m.label = medium.geometry == LayeredMedium::Geometry::Shells ? "shells" : "slabs";
  m.lambda = [medium, lam](double r, const Direction &w, Side s) { return lam * medium.mu0(r, w, s); };
  m.long_range = {lam * medium.mu_long.coefficient, medium.mu_long.exponent};
  m.short_range = {lam * medium.mu_short.coefficient, medium.mu_short.exponent};
  if (medium.geometry == LayeredMedium::Geometry::Shells) {
    m.radial = true;
    m.jump_radii = medium.interfaces;
  } else {
    m.radial = false;
    m.ray_breaks = [medium](const Direction &w) { return medium.ray_breaks(w); };
  }
  return build_example61(m);
}

SeparationVerdict check_separating_condition(const LayeredMedium &medium) {
  medium.validate();
  SeparationVerdict v;
  for (std::size_t i = 0; i < medium.interfaces.size(); ++i) {
    // Outward normal of the lower/inner layer points towards the upper/outer
    // one: n.x = |x| on a sphere, n.x = c on the plane x_N = c.
    const double n_dot_x = medium.interfaces[i];
    const double jump = medium.nu[i + 1] - medium.nu[i];
    if (jump * n_dot_x < 0.0) {
      v.pass = false;
      v.interface = i;
      v.k_lower = medium.signed_index(i);
      v.k_upper = medium.signed_index(i + 1);
      v.level = medium.interfaces[i];
      std::ostringstream os;
      os << "interface " << v.k_lower << "->" << v.k_upper << " at "
         << (medium.geometry == LayeredMedium::Geometry::Shells ? "radius " : "x_N = ") << v.level
         << ": (nu_upper - nu_lower) * (n.x) = " << jump * n_dot_x << " < 0";
      v.detail = os.str();
      return v;
    }
  }
  v.detail = "all interfaces satisfy the sign condition";
  return v;
}

RayMonotonicityVerdict check_theorem72_hypothesis(const LayeredMedium &medium,
                                                  std::span<const Direction> rays, double r_max,
                                                  int samples_per_ray) {
  medium.validate();
  RayMonotonicityVerdict out;
  for (const auto &w : rays) {
    std::vector<double> radii;
    for (int i = 1; i <= samples_per_ray; ++i)
      radii.push_back(r_max * double(i) / samples_per_ray);
    for (double b : medium.ray_breaks(w))
      if (b <= r_max)
        radii.push_back(b);
    std::sort(radii.begin(), radii.end());
    ++out.rays_checked;
    double prev = medium.mu0(radii.front(), w);
    for (std::size_t i = 1; i < radii.size(); ++i) {
      const double cur = medium.mu0(radii[i], w);
      if (cur < prev) {
        out.pass = false;
        out.omega = w;
        out.radius = radii[i];
        out.before = prev;
        out.after = cur;
        return out;
      }
      prev = cur;
    }
  }
  return out;
}

std::vector<Direction> low_discrepancy_rays(int dimension, int count) {
  std::vector<Direction> out;
  const double pi = std::numbers::pi;
  if (dimension == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * pi * (i + 0.5) / count;
      out.push_back({std::cos(t), std::sin(t), 0.0});
    }
    return out;
  }
  const double golden = pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < count; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / count;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.push_back({s * std::cos(phi), s * std::sin(phi), z});
  }
  return out;
}

std::vector<SurfaceSample> read_surface_samples(std::istream &in, int dimension) {
  std::vector<SurfaceSample> out;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#')
      continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::vector<double> vals;
    double x;
    while (row >> x)
      vals.push_back(x);
    if (!row.eof()) {
      if (first) {
        first = false;
        continue;
      }
      throw InvalidArgument("surface samples: non-numeric entry on line " + std::to_string(lineno));
    }
    first = false;
    if (vals.size() != std::size_t(2 * dimension))
      throw InvalidArgument("surface samples: expected " + std::to_string(2 * dimension) +
                            " columns on line " + std::to_string(lineno));
    SurfaceSample s{{0, 0, 0}, {0, 0, 0}};
    for (int k = 0; k < dimension; ++k) {
      s.point[std::size_t(k)] = vals[std::size_t(k)];
      s.normal[std::size_t(k)] = vals[std::size_t(dimension + k)];
    }
    out.push_back(s);
  }
  return out;
}

NormalConeVerdict check_normal_cone(std::span<const SurfaceSample> samples) {
  NormalConeVerdict v;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double d = dot(samples[i].normal, samples[i].point);
    if (d < 0.0) {
      v.pass = false;
      v.row = i;
      v.value = d;
      return v;
    }
  }
  return v;
}

} // namespace kgc
