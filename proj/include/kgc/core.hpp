#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace kgc {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Element of the truncated X = L2(S^{N-1}): one complex coefficient per basis mode.
using ModeVector = CVector;

/// Unit vector on S^{N-1}. For N = 2 the third component is zero.
using Direction = std::array<double, 3>;

/// Which one-sided limit an evaluator returns at a declared discontinuity radius.
/// Evaluation away from a jump is independent of the side.
enum class Side { Above, Below };

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid arguments and violated preconditions of public operations.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

inline double dot(const Direction &a, const Direction &b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

} // namespace kgc
