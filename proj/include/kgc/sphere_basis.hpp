#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "kgc/core.hpp"

namespace kgc {

struct Mode {
  int degree;
  int order;
};

/// Truncated orthonormal eigenbasis of -Lambda_N on S^{N-1} together with a
/// product quadrature that integrates basis products exactly.
///
/// N = 2 uses the real Fourier basis {1, cos(l t), sin(l t)} / norm, N = 3 real
/// spherical harmonics. Both are real valued, so Gram matrices of real
/// functions are real symmetric. Coefficients are still complex.
///
/// Quadrature of exactness degree d: N = 2 takes d + 1 uniform nodes; N = 3
/// takes d/2 + 1 Gauss-Legendre nodes in cos(theta) times d + 1 uniform
/// azimuths. The default d = 2L integrates every product of two basis
/// functions exactly.
class SphereBasis {
public:
  static SphereBasis build(int dimension, int cutoff, int quadrature_degree = -1);

  int dimension() const { return dimension_; }
  int cutoff() const { return cutoff_; }
  int quadrature_degree() const { return quadrature_degree_; }
  std::size_t size() const { return modes_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  std::span<const Mode> modes() const { return modes_; }
  /// Eigenvalue l(l+N-2) of -Lambda_N per mode.
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  std::span<const Direction> nodes() const { return nodes_; }
  std::span<const double> weights() const { return weights_; }
  /// Basis values, one row per node, one column per mode.
  const Eigen::MatrixXd &values() const { return values_; }
  /// Surface area of S^{N-1}.
  double area() const;

  /// Basis functions evaluated at an arbitrary direction.
  Eigen::VectorXd evaluate(const Direction &omega) const;

  /// Point values at the quadrature nodes of the function with these coefficients.
  CVector synthesize(const ModeVector &coefficients) const;
  /// Quadrature projection of node samples onto the basis.
  ModeVector analyze(const CVector &node_values) const;

  /// X-inner product (a, b) = integral of a conj(b), evaluated by quadrature on
  /// synthesized node values.
  cplx quadrature_inner(const ModeVector &a, const ModeVector &b) const;

private:
  SphereBasis() = default;

  int dimension_ = 0;
  int cutoff_ = 0;
  int quadrature_degree_ = 0;
  std::vector<Mode> modes_;
  std::vector<double> eigenvalues_;
  std::vector<Direction> nodes_;
  std::vector<double> weights_;
  Eigen::MatrixXd values_;
};

/// Multiplication by an angular function at fixed radius, projected on the basis.
/// (f phi, phi) = c^H matrix c for phi with coefficients c.
struct GramOperator {
  CMatrix matrix;
  /// False when the sampled function had a non-negligible imaginary part.
  bool hermitian = true;
};

/// Spectrum of B(r) = -r^{-2} Lambda_N: lambda_l / r^2 per mode.
std::vector<double> b_operator_eigenvalues(const SphereBasis &basis, double r);

GramOperator gram_of(const SphereBasis &basis, const std::function<cplx(const Direction &)> &f);

/// Gram matrix from samples of f at the basis quadrature nodes.
GramOperator gram_from_samples(const SphereBasis &basis, const CVector &samples);

/// Real-valued fast path; the result is real symmetric.
Eigen::MatrixXd gram_from_real_samples(const SphereBasis &basis, const Eigen::VectorXd &samples);

using BasisHandle = std::shared_ptr<const SphereBasis>;

} // namespace kgc
