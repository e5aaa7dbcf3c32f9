#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <iosfwd>
#include <string>
#include <vector>

#include "kgc/coefficients.hpp"
#include "kgc/sphere_basis.hpp"

namespace kgc {

/// Truncated operator ODE v'' = A(r) v with A = B + C0 + C1 on the span of the basis.
class RadialSystem {
public:
  static RadialSystem assemble(BasisHandle basis, FieldHandle field, double r_start, double r_end);

  const SphereBasis &basis() const { return *basis_; }
  const BasisHandle &basis_handle() const { return basis_; }
  const CoefficientField &field() const { return *field_; }
  double r_start() const { return r_start_; }
  double r_end() const { return r_end_; }
  std::size_t size() const { return basis_->size(); }
  /// Radial field: every Gram matrix is a multiple of the identity and A(r) is diagonal.
  bool diagonal() const { return field_->radial; }

  CMatrix matrix(double r, Side side = Side::Above) const;
  /// Diagonal of A(r); only meaningful when diagonal().
  CVector diagonal_entries(double r, Side side = Side::Above) const;
  /// y = A(r) x without forming A for radial fields.
  void apply(double r, Side side, const cplx *x, cplx *y) const;

  /// Gram(Q0(r.)), real symmetric.
  Eigen::MatrixXd gram_Q0(double r, Side side = Side::Above) const;
  /// Gram(Re Q(r.)) = Gram(Q0 + Re Q1).
  Eigen::MatrixXd gram_ReQ(double r, Side side = Side::Above) const;
  Eigen::MatrixXd gram_Q0r(double r) const;
  /// Gram(Re q(r.)) of the unshifted coefficient.
  Eigen::MatrixXd gram_Req(double r, Side side = Side::Above) const;

  /// Radii in (r_start, r_end) where A(r) may jump: the field's jump radii or,
  /// for fields with non-spherical interfaces, the union of ray breaks over the
  /// quadrature nodes.
  const std::vector<double> &restart_radii() const { return restarts_; }

private:
  RadialSystem() = default;
  Eigen::VectorXd node_values_real(double r, Side side, int which) const;

  BasisHandle basis_;
  FieldHandle field_;
  double r_start_ = 0.0;
  double r_end_ = 0.0;
  std::vector<double> restarts_;
  std::vector<double> lambda_;
};

struct InitialData {
  double r_init = 1.0;
  ModeVector v;
  ModeVector dv;

  /// v = 0, v' = e_0.
  static InitialData unit(std::size_t modes, double r_init);
  /// Gaussian coefficients for v and v' drawn from the seed.
  static InitialData random(std::size_t modes, double r_init, std::uint64_t seed);
  void validate(std::size_t modes) const;
};

struct IntegrateOptions {
  /// Relative accuracy target; the step controller runs at a tenth of it so the
  /// accumulated error over a few dozen units stays near the target.
  double tolerance = 1e-9;
  double overflow = 1e100;
  /// Upper bound on steps between two output radii before giving up.
  std::size_t max_steps = 200000;
};

struct Trajectory {
  enum class Status { Ok, GrowthOverflow, StepUnderflow };

  int dimension = 3;
  std::vector<double> r;
  std::vector<ModeVector> v;
  std::vector<ModeVector> dv;
  /// Grid point is a restart radius (a declared jump of A).
  std::vector<bool> restart;

  Status status = Status::Ok;
  /// Radius where integration stopped early.
  double stop_radius = 0.0;
  std::string message;
  double tolerance = 0.0;
  std::size_t rhs_evaluations = 0;
  std::vector<double> restarts;

  std::size_t size() const { return r.size(); }
  /// Index of grid radius r (exact match), or npos.
  std::size_t index_of(double radius) const;
  Trajectory scaled(cplx alpha) const;
};

std::string_view to_string(Trajectory::Status s);

/// Integrates from init.r_init through every grid radius > r_init, stopping and
/// restarting at restart radii so no step crosses a discontinuity. The output
/// grid is {r_init} + grid + restart radii in range.
Trajectory integrate(const RadialSystem &system, const InitialData &init, std::span<const double> grid,
                     const IntegrateOptions &options = {});

struct SurfaceValues {
  /// Node values of u and du/dr on each grid sphere.
  std::vector<CVector> u;
  std::vector<CVector> du;
};

/// u = r^{-(N-1)/2} v, du/dr = r^{-(N-1)/2} (v' - (N-1)/(2r) v), synthesized at the quadrature nodes.
SurfaceValues u_from_v(const Trajectory &traj, const SphereBasis &basis);

/// Columns r, v<k>_re, v<k>_im, dv<k>_re, dv<k>_im, restart.
void write_trajectory_csv(std::ostream &out, const Trajectory &traj);

} // namespace kgc
