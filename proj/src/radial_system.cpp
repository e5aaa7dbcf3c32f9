#include "kgc/radial_system.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include <boost/numeric/odeint.hpp>

#include "numfmt.hpp"

namespace kgc {

namespace {

enum Which { kQ0, kReQ, kQ0r, kReq };

struct Overflow {
  double r;
};

} // namespace

RadialSystem RadialSystem::assemble(BasisHandle basis, FieldHandle field, double r_start, double r_end) {
  if (!basis || !field)
    throw InvalidArgument("assemble: basis and field are required");
  if (basis->dimension() != field->dimension)
    throw InvalidArgument("assemble: basis dimension differs from field dimension");
  if (!(r_start > field->inner_radius))
    throw InvalidArgument("assemble: interval must lie beyond the inner radius R0=" +
                          fmt_double(field->inner_radius));
  if (!(r_end > r_start))
    throw InvalidArgument("assemble: empty radius interval");
  RadialSystem s;
  s.basis_ = std::move(basis);
  s.field_ = std::move(field);
  s.r_start_ = r_start;
  s.r_end_ = r_end;
  s.restarts_ = s.field_->breaks_between(r_start, r_end, s.basis_->nodes());
  s.lambda_.assign(s.basis_->eigenvalues().begin(), s.basis_->eigenvalues().end());
  return s;
}

Eigen::VectorXd RadialSystem::node_values_real(double r, Side side, int which) const {
  const auto nodes = basis_->nodes();
  Eigen::VectorXd out(Eigen::Index(nodes.size()));
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const auto &w = nodes[q];
    double v = 0.0;
    switch (which) {
    case kQ0:
      v = field_->Q0(r, w, side);
      break;
    case kReQ:
      v = field_->Q(r, w, side).real();
      break;
    case kQ0r:
      v = field_->Q0r(r, w, side);
      break;
    case kReq:
      v = field_->q_at(r, w, side).real();
      break;
    }
    if (!std::isfinite(v))
      throw InvalidArgument("radial system: non-finite coefficient sample at r=" + fmt_double(r));
    out[Eigen::Index(q)] = v;
  }
  return out;
}

CVector RadialSystem::diagonal_entries(double r, Side side) const {
  const auto &w = basis_->nodes().front();
  const cplx c = field_->Q(r, w, side);
  const double r2 = r * r;
  CVector d(Eigen::Index(lambda_.size()));
  for (std::size_t i = 0; i < lambda_.size(); ++i)
    d[Eigen::Index(i)] = lambda_[i] / r2 + c;
  return d;
}

CMatrix RadialSystem::matrix(double r, Side side) const {
  if (diagonal())
    return diagonal_entries(r, side).asDiagonal();
  const auto nodes = basis_->nodes();
  CVector samples(Eigen::Index(nodes.size()));
  for (std::size_t q = 0; q < nodes.size(); ++q)
    samples[Eigen::Index(q)] = field_->Q(r, nodes[q], side);
  CMatrix a = gram_from_samples(*basis_, samples).matrix;
  for (std::size_t i = 0; i < lambda_.size(); ++i)
    a(Eigen::Index(i), Eigen::Index(i)) += lambda_[i] / (r * r);
  return a;
}

void RadialSystem::apply(double r, Side side, const cplx *x, cplx *y) const {
  const Eigen::Index n = Eigen::Index(size());
  Eigen::Map<const CVector> xv(x, n);
  Eigen::Map<CVector> yv(y, n);
  if (diagonal())
    yv = diagonal_entries(r, side).cwiseProduct(xv);
  else
    yv = matrix(r, side) * xv;
}

namespace {
Eigen::MatrixXd scalar_identity(std::size_t n, double c) {
  return c * Eigen::MatrixXd::Identity(Eigen::Index(n), Eigen::Index(n));
}
} // namespace

Eigen::MatrixXd RadialSystem::gram_Q0(double r, Side side) const {
  if (diagonal())
    return scalar_identity(size(), field_->Q0(r, basis_->nodes().front(), side));
  return gram_from_real_samples(*basis_, node_values_real(r, side, kQ0));
}

Eigen::MatrixXd RadialSystem::gram_ReQ(double r, Side side) const {
  if (diagonal())
    return scalar_identity(size(), field_->Q(r, basis_->nodes().front(), side).real());
  return gram_from_real_samples(*basis_, node_values_real(r, side, kReQ));
}

Eigen::MatrixXd RadialSystem::gram_Q0r(double r) const {
  if (diagonal())
    return scalar_identity(size(), field_->Q0r(r, basis_->nodes().front(), Side::Above));
  return gram_from_real_samples(*basis_, node_values_real(r, Side::Above, kQ0r));
}

Eigen::MatrixXd RadialSystem::gram_Req(double r, Side side) const {
  if (diagonal())
    return scalar_identity(size(), field_->q_at(r, basis_->nodes().front(), side).real());
  return gram_from_real_samples(*basis_, node_values_real(r, side, kReq));
}

InitialData InitialData::unit(std::size_t modes, double r_init) {
  InitialData d;
  d.r_init = r_init;
  d.v = ModeVector::Zero(Eigen::Index(modes));
  d.dv = ModeVector::Zero(Eigen::Index(modes));
  d.dv[0] = 1.0;
  return d;
}

InitialData InitialData::random(std::size_t modes, double r_init, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  InitialData d;
  d.r_init = r_init;
  d.v.resize(Eigen::Index(modes));
  d.dv.resize(Eigen::Index(modes));
  for (Eigen::Index i = 0; i < Eigen::Index(modes); ++i)
    d.v[i] = cplx(nd(gen), nd(gen));
  for (Eigen::Index i = 0; i < Eigen::Index(modes); ++i)
    d.dv[i] = cplx(nd(gen), nd(gen));
  return d;
}

void InitialData::validate(std::size_t modes) const {
  if (v.size() != Eigen::Index(modes) || dv.size() != Eigen::Index(modes))
    throw InvalidArgument("initial data: expected " + std::to_string(modes) + " mode coefficients");
  if (v.norm() == 0.0 && dv.norm() == 0.0)
    throw InvalidArgument("initial data: v and v' are both zero (trivial solution)");
  if (!v.allFinite() || !dv.allFinite())
    throw InvalidArgument("initial data: non-finite coefficients");
}

std::size_t Trajectory::index_of(double radius) const {
  const auto it = std::lower_bound(r.begin(), r.end(), radius);
  if (it == r.end() || *it != radius)
    return std::size_t(-1);
  return std::size_t(it - r.begin());
}

Trajectory Trajectory::scaled(cplx alpha) const {
  Trajectory t = *this;
  for (auto &x : t.v)
    x *= alpha;
  for (auto &x : t.dv)
    x *= alpha;
  return t;
}

std::string_view to_string(Trajectory::Status s) {
  switch (s) {
  case Trajectory::Status::Ok:
    return "ok";
  case Trajectory::Status::GrowthOverflow:
    return "growth overflow";
  case Trajectory::Status::StepUnderflow:
    return "step-size underflow";
  }
  return "?";
}

Trajectory integrate(const RadialSystem &system, const InitialData &init, std::span<const double> grid,
                     const IntegrateOptions &options) {
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;

  const std::size_t n = system.size();
  init.validate(n);
  if (init.r_init < system.r_start() || init.r_init > system.r_end())
    throw InvalidArgument("integrate: r_init outside the system interval");
  for (double r : grid)
    if (r < init.r_init || r > system.r_end())
      throw InvalidArgument("integrate: grid radius " + fmt_double(r) + " outside [r_init, r_end]");
  if (!(options.tolerance > 0.0))
    throw InvalidArgument("integrate: tolerance must be positive");

  std::vector<double> pts(grid.begin(), grid.end());
  pts.push_back(init.r_init);
  const double last = grid.empty() ? init.r_init : *std::max_element(grid.begin(), grid.end());
  std::vector<double> restarts;
  for (double b : system.restart_radii())
    if (b > init.r_init && b <= last)
      restarts.push_back(b);
  pts.insert(pts.end(), restarts.begin(), restarts.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  Trajectory traj;
  traj.dimension = system.basis().dimension();
  traj.tolerance = options.tolerance;
  traj.restarts = restarts;

  State x(4 * n);
  {
    auto *c = reinterpret_cast<cplx *>(x.data());
    for (std::size_t i = 0; i < n; ++i) {
      c[i] = init.v[Eigen::Index(i)];
      c[n + i] = init.dv[Eigen::Index(i)];
    }
  }

  auto record = [&](const State &s, double r) {
    const auto *c = reinterpret_cast<const cplx *>(s.data());
    ModeVector v = Eigen::Map<const CVector>(c, Eigen::Index(n));
    ModeVector dv = Eigen::Map<const CVector>(c + n, Eigen::Index(n));
    traj.r.push_back(r);
    traj.v.push_back(std::move(v));
    traj.dv.push_back(std::move(dv));
    traj.restart.push_back(std::binary_search(restarts.begin(), restarts.end(), r));
    if (!(traj.v.back().norm() <= options.overflow) || !(traj.dv.back().norm() <= options.overflow))
      throw Overflow{r};
  };

  double last_r = init.r_init;
  try {
    record(x, init.r_init);
    std::size_t seg_begin = 0;
    while (seg_begin + 1 < pts.size()) {
      // Segment ends at the next restart radius or the last point.
      std::size_t seg_end = seg_begin + 1;
      while (seg_end + 1 < pts.size() && !std::binary_search(restarts.begin(), restarts.end(), pts[seg_end]))
        ++seg_end;
      const double a = pts[seg_begin], b = pts[seg_end];
      auto rhs = [&](const State &s, State &ds, double r) {
        ++traj.rhs_evaluations;
        last_r = r;
        const double re = std::min(r, b);
        const Side side = re == b ? Side::Below : Side::Above;
        const auto *c = reinterpret_cast<const cplx *>(s.data());
        auto *d = reinterpret_cast<cplx *>(ds.data());
        std::copy(c + n, c + 2 * n, d);
        system.apply(re, side, c, d + n);
      };
      const double local = options.tolerance / 10.0;
      auto stepper = ode::make_controlled(local, local, ode::runge_kutta_dopri5<State>());
      bool first = true;
      auto obs = [&](const State &s, double r) {
        if (first) {
          first = false;
          return;
        }
        record(s, r);
      };
      const double dt = std::min(0.01, b - a);
      ode::integrate_times(stepper, rhs, x, pts.begin() + std::ptrdiff_t(seg_begin),
                           pts.begin() + std::ptrdiff_t(seg_end) + 1, dt, obs,
                           ode::max_step_checker(options.max_steps));
      seg_begin = seg_end;
    }
  } catch (const Overflow &o) {
    traj.status = Trajectory::Status::GrowthOverflow;
    traj.stop_radius = o.r;
    traj.message = "|v| exceeded " + fmt_double(options.overflow) + " at r=" + fmt_double(o.r);
  } catch (const ode::odeint_error &e) {
    traj.status = Trajectory::Status::StepUnderflow;
    traj.stop_radius = last_r;
    traj.message = std::string("step size control failed near r=") + fmt_double(last_r) + ": " + e.what();
  } catch (const std::overflow_error &e) {
    traj.status = Trajectory::Status::StepUnderflow;
    traj.stop_radius = last_r;
    traj.message = std::string("step size control failed near r=") + fmt_double(last_r) + ": " + e.what();
  }
  return traj;
}

SurfaceValues u_from_v(const Trajectory &traj, const SphereBasis &basis) {
  SurfaceValues out;
  const double half = (traj.dimension - 1) / 2.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const double r = traj.r[i];
    const double s = std::pow(r, -half);
    const CVector v = basis.synthesize(traj.v[i]);
    const CVector dv = basis.synthesize(traj.dv[i]);
    out.u.push_back(s * v);
    out.du.push_back(s * (dv - (half / r) * v));
  }
  return out;
}

void write_trajectory_csv(std::ostream &out, const Trajectory &traj) {
  const std::size_t n = traj.v.empty() ? 0 : std::size_t(traj.v.front().size());
  out << "r";
  for (std::size_t k = 0; k < n; ++k)
    out << ",v" << k << "_re,v" << k << "_im";
  for (std::size_t k = 0; k < n; ++k)
    out << ",dv" << k << "_re,dv" << k << "_im";
  out << ",restart\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << fmt_double(traj.r[i]);
    for (std::size_t k = 0; k < n; ++k) {
      const cplx c = traj.v[i][Eigen::Index(k)];
      out << ',' << fmt_double(c.real()) << ',' << fmt_double(c.imag());
    }
    for (std::size_t k = 0; k < n; ++k) {
      const cplx c = traj.dv[i][Eigen::Index(k)];
      out << ',' << fmt_double(c.real()) << ',' << fmt_double(c.imag());
    }
    out << ',' << (traj.restart[i] ? 1 : 0) << '\n';
  }
}

} // namespace kgc
