#include "kgc/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kgc {

namespace {

void require_radius(double r, const char *what) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw InvalidArgument(std::string(what) + ": radius must be positive and finite");
}

} // namespace

std::vector<double> CoefficientField::breaks_along(const Direction &omega) const {
  if (ray_breaks)
    return ray_breaks(omega);
  return jump_radii;
}

std::vector<double> CoefficientField::breaks_between(double lo, double hi,
                                                     std::span<const Direction> rays) const {
  std::vector<double> out;
  auto take = [&](const std::vector<double> &b) {
    for (double r : b)
      if (r > lo && r < hi)
        out.push_back(r);
  };
  if (ray_breaks) {
    for (const auto &w : rays)
      take(ray_breaks(w));
  } else {
    take(jump_radii);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Direction> sample_directions(const SphereBasis &basis, const CoefficientField &field) {
  std::vector<Direction> out(basis.nodes().begin(), basis.nodes().end());
  out.insert(out.end(), field.probes.begin(), field.probes.end());
  return out;
}

ComplexEvaluator shift_to_Q(ComplexEvaluator q, int dimension) {
  if (dimension < 2)
    throw InvalidArgument("shift_to_Q: dimension must be >= 2");
  const double c = (dimension - 1.0) * (dimension - 3.0) / 4.0;
  return [q = std::move(q), c](double r, const Direction &w, Side s) -> cplx {
    if (!(r > 0.0))
      throw InvalidArgument("shift_to_Q: evaluation at r <= 0");
    return q(r, w, s) + c / (r * r);
  };
}

RadialGauges RadialGauges::power(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 2.0))
    throw InvalidArgument("gauges: epsilon must lie in (0, 2)");
  RadialGauges g;
  g.kind = Kind::Power;
  g.epsilon = epsilon;
  const double e = -1.0 - epsilon / 2.0;
  g.h = [e](double r) { return std::pow(r, e); };
  g.F = [](double r) { return std::log(r); };
  g.F_r = [](double r) { return 1.0 / r; };
  g.h_label = "r^" + std::to_string(e);
  g.F_label = "log r";
  return g;
}

RadialGauges RadialGauges::kato() {
  RadialGauges g;
  g.kind = Kind::Kato;
  g.epsilon = 0.0;
  g.h = [](double r) { return 2.0 / r; };
  g.F = [](double r) { return std::log(r); };
  g.F_r = [](double r) { return 1.0 / r; };
  g.h_label = "2/r";
  g.F_label = "log r";
  return g;
}

double RadialGauges::integral_h(double a, double b) const {
  if (b < a)
    return -integral_h(b, a);
  switch (kind) {
  case Kind::Power: {
    const double k = epsilon / 2.0;
    const double tail_a = std::pow(a, -k) / k;
    const double tail_b = std::isinf(b) ? 0.0 : std::pow(b, -k) / k;
    return tail_a - tail_b;
  }
  case Kind::Kato:
    return std::isinf(b) ? std::numeric_limits<double>::infinity() : 2.0 * std::log(b / a);
  case Kind::Custom:
    break;
  }
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(h, a, b, 15, 1e-10, &err);
}

std::optional<bool> RadialGauges::integrable() const {
  switch (kind) {
  case Kind::Power:
    return true;
  case Kind::Kato:
    return false;
  case Kind::Custom:
    break;
  }
  return std::nullopt;
}

double a_of_r(const CoefficientField &field, const RadialGauges &gauges, double r,
              std::span<const Direction> directions) {
  require_radius(r, "a_of_r");
  double sup = 0.0;
  for (const auto &w : directions) {
    const cplx v = field.Q1(r, w);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw InvalidArgument("a_of_r: non-finite Q1 sample at r=" + std::to_string(r));
    sup = std::max(sup, std::abs(v));
  }
  return sup / gauges.h(r);
}

double b_of_r(const CoefficientField &field, const RadialGauges &gauges, double r,
              std::span<const Direction> directions) {
  require_radius(r, "b_of_r");
  const double inv_h = 1.0 / gauges.h(r);
  double inf = std::numeric_limits<double>::infinity();
  for (const auto &w : directions) {
    const double v = -(field.Q0(r, w) + inv_h * field.Q0r(r, w));
    if (!std::isfinite(v))
      throw InvalidArgument("b_of_r: non-finite Q0/Q0r sample at r=" + std::to_string(r));
    inf = std::min(inf, v);
  }
  return inf;
}

double p_of_r(const CoefficientField &field, double r, std::span<const Direction> directions) {
  require_radius(r, "p_of_r");
  double inf = std::numeric_limits<double>::infinity();
  for (const auto &w : directions) {
    const double v = -(2.0 * field.Q0(r, w) + r * field.Q0r(r, w));
    if (!std::isfinite(v))
      throw InvalidArgument("p_of_r: non-finite Q0/Q0r sample at r=" + std::to_string(r));
    inf = std::min(inf, v);
  }
  return inf;
}

double decomposition_residual(const CoefficientField &field, std::span<const double> radii,
                              std::span<const Direction> directions) {
  const auto shifted = shift_to_Q(field.q, field.dimension);
  double worst = 0.0;
  for (double r : radii)
    for (const auto &w : directions)
      worst = std::max(worst, std::abs(shifted(r, w, Side::Above) - field.Q(r, w)));
  return worst;
}

} // namespace kgc
