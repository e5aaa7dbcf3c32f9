#include "kgc/sphere_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

namespace kgc {

namespace {

constexpr double pi = std::numbers::pi;

struct GaussNode {
  double x;
  double w;
};

std::vector<GaussNode> gauss_legendre(int n) {
  std::vector<GaussNode> out;
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  for (double z : zeros) {
    const double dp = boost::math::legendre_p_prime(n, z);
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    out.push_back({z, w});
    if (z != 0.0)
      out.push_back({-z, w});
  }
  std::sort(out.begin(), out.end(), [](const GaussNode &a, const GaussNode &b) { return a.x < b.x; });
  return out;
}

// Orthonormal associated Legendre functions without the Condon-Shortley phase,
// normalized so that integral over S^2 of (pbar_lm(cos t) e^{i m phi})^2 = 1.
// Returned as table[l][m], 0 <= m <= l <= lmax.
std::vector<std::vector<double>> normalized_legendre(int lmax, double x) {
  std::vector<std::vector<double>> p(lmax + 1);
  for (int l = 0; l <= lmax; ++l)
    p[l].assign(l + 1, 0.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  p[0][0] = std::sqrt(1.0 / (4.0 * pi));
  for (int m = 1; m <= lmax; ++m)
    p[m][m] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * p[m - 1][m - 1];
  for (int m = 0; m < lmax; ++m)
    p[m + 1][m] = std::sqrt(2.0 * m + 3.0) * x * p[m][m];
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m + 2; l <= lmax; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) / (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      p[l][m] = a * (x * p[l - 1][m] - b * p[l - 2][m]);
    }
  }
  return p;
}

} // namespace

SphereBasis SphereBasis::build(int dimension, int cutoff, int quadrature_degree) {
  if (dimension != 2 && dimension != 3)
    throw InvalidArgument("sphere basis: dimension N=" + std::to_string(dimension) +
                          " is not supported (supported: N=2, N=3)");
  if (cutoff < 0)
    throw InvalidArgument("sphere basis: cutoff degree must be >= 0");
  if (quadrature_degree < 0)
    quadrature_degree = 2 * cutoff;
  if (quadrature_degree < 2 * cutoff)
    throw InvalidArgument("sphere basis: quadrature degree " + std::to_string(quadrature_degree) +
                          " cannot integrate products up to degree 2L=" + std::to_string(2 * cutoff));

  SphereBasis b;
  b.dimension_ = dimension;
  b.cutoff_ = cutoff;
  b.quadrature_degree_ = quadrature_degree;

  if (dimension == 2) {
    b.modes_.push_back({0, 0});
    for (int l = 1; l <= cutoff; ++l) {
      b.modes_.push_back({l, -l});
      b.modes_.push_back({l, l});
    }
    const int n = quadrature_degree + 1;
    for (int j = 0; j < n; ++j) {
      const double t = 2.0 * pi * j / n;
      b.nodes_.push_back({std::cos(t), std::sin(t), 0.0});
      b.weights_.push_back(2.0 * pi / n);
    }
  } else {
    for (int l = 0; l <= cutoff; ++l)
      for (int m = -l; m <= l; ++m)
        b.modes_.push_back({l, m});
    const auto polar = gauss_legendre(quadrature_degree / 2 + 1);
    const int nphi = quadrature_degree + 1;
    for (const auto &g : polar) {
      const double st = std::sqrt(std::max(0.0, 1.0 - g.x * g.x));
      for (int j = 0; j < nphi; ++j) {
        const double phi = 2.0 * pi * j / nphi;
        b.nodes_.push_back({st * std::cos(phi), st * std::sin(phi), g.x});
        b.weights_.push_back(g.w * 2.0 * pi / nphi);
      }
    }
  }

  for (const auto &m : b.modes_)
    b.eigenvalues_.push_back(double(m.degree) * (m.degree + dimension - 2));

  b.values_.resize(Eigen::Index(b.nodes_.size()), Eigen::Index(b.modes_.size()));
  for (std::size_t q = 0; q < b.nodes_.size(); ++q)
    b.values_.row(Eigen::Index(q)) = b.evaluate(b.nodes_[q]).transpose();
  return b;
}

double SphereBasis::area() const { return dimension_ == 2 ? 2.0 * pi : 4.0 * pi; }

Eigen::VectorXd SphereBasis::evaluate(const Direction &omega) const {
  Eigen::VectorXd out(Eigen::Index(modes_.size()));
  if (dimension_ == 2) {
    const double t = std::atan2(omega[1], omega[0]);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      const auto &m = modes_[i];
      if (m.degree == 0)
        out[Eigen::Index(i)] = 1.0 / std::sqrt(2.0 * pi);
      else if (m.order > 0)
        out[Eigen::Index(i)] = std::cos(m.degree * t) / std::sqrt(pi);
      else
        out[Eigen::Index(i)] = std::sin(m.degree * t) / std::sqrt(pi);
    }
    return out;
  }
  const double z = std::clamp(omega[2], -1.0, 1.0);
  const double phi = std::atan2(omega[1], omega[0]);
  const auto p = normalized_legendre(cutoff_, z);
  for (std::size_t i = 0; i < modes_.size(); ++i) {
    const int l = modes_[i].degree;
    const int m = modes_[i].order;
    double v;
    if (m == 0)
      v = p[l][0];
    else if (m > 0)
      v = std::sqrt(2.0) * p[l][m] * std::cos(m * phi);
    else
      v = std::sqrt(2.0) * p[l][-m] * std::sin(-m * phi);
    out[Eigen::Index(i)] = v;
  }
  return out;
}

CVector SphereBasis::synthesize(const ModeVector &coefficients) const {
  return values_.cast<cplx>() * coefficients;
}

ModeVector SphereBasis::analyze(const CVector &node_values) const {
  const Eigen::Map<const Eigen::VectorXd> w(weights_.data(), Eigen::Index(weights_.size()));
  return values_.transpose().cast<cplx>() * (w.cast<cplx>().cwiseProduct(node_values));
}

cplx SphereBasis::quadrature_inner(const ModeVector &a, const ModeVector &b) const {
  const CVector fa = synthesize(a);
  const CVector fb = synthesize(b);
  cplx s = 0.0;
  for (std::size_t q = 0; q < weights_.size(); ++q)
    s += weights_[q] * fa[Eigen::Index(q)] * std::conj(fb[Eigen::Index(q)]);
  return s;
}

std::vector<double> b_operator_eigenvalues(const SphereBasis &basis, double r) {
  if (!(r > 0.0))
    throw InvalidArgument("b_operator_eigenvalues: radius must be positive");
  std::vector<double> out;
  out.reserve(basis.size());
  for (double lam : basis.eigenvalues())
    out.push_back(lam / (r * r));
  return out;
}

Eigen::MatrixXd gram_from_real_samples(const SphereBasis &basis, const Eigen::VectorXd &samples) {
  const auto &y = basis.values();
  const Eigen::Map<const Eigen::VectorXd> w(basis.weights().data(), Eigen::Index(basis.node_count()));
  const Eigen::VectorXd d = w.cwiseProduct(samples);
  Eigen::MatrixXd g = y.transpose() * d.asDiagonal() * y;
  return 0.5 * (g + g.transpose());
}

GramOperator gram_from_samples(const SphereBasis &basis, const CVector &samples) {
  if (samples.size() != Eigen::Index(basis.node_count()))
    throw InvalidArgument("gram_from_samples: sample count does not match the node count");
  double imag_scale = 0.0, real_scale = 0.0;
  for (Eigen::Index q = 0; q < samples.size(); ++q) {
    if (!std::isfinite(samples[q].real()) || !std::isfinite(samples[q].imag()))
      throw InvalidArgument("gram_of: non-finite sample value at quadrature node " + std::to_string(q));
    imag_scale = std::max(imag_scale, std::abs(samples[q].imag()));
    real_scale = std::max(real_scale, std::abs(samples[q].real()));
  }
  GramOperator out;
  const Eigen::MatrixXd re = gram_from_real_samples(basis, samples.real());
  if (imag_scale == 0.0) {
    out.matrix = re.cast<cplx>();
    return out;
  }
  const Eigen::MatrixXd im = gram_from_real_samples(basis, samples.imag());
  out.matrix = re.cast<cplx>() + cplx(0.0, 1.0) * im.cast<cplx>();
  out.hermitian = imag_scale <= 1e-15 * std::max(1.0, real_scale);
  return out;
}

GramOperator gram_of(const SphereBasis &basis, const std::function<cplx(const Direction &)> &f) {
  CVector samples(Eigen::Index(basis.node_count()));
  const auto nodes = basis.nodes();
  for (std::size_t q = 0; q < nodes.size(); ++q)
    samples[Eigen::Index(q)] = f(nodes[q]);
  return gram_from_samples(basis, samples);
}

} // namespace kgc
