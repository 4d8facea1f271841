#include "lorentz/jacobi.hpp"

#include <cmath>
#include <numbers>

namespace lorentz {

MatX tidal_matrix(const ChartedSpacetime& M, const VecX& x, const VecX& v, const MatX& E) {
  const int d = M.dim();
  const RiemannTensor R = riemann_unchecked(M, x);
  MatX W = MatX::Zero(d, d);  // W(r, m) = R^r_{s m n} v^s v^n
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) W(r, m) += R(r, s, m, n) * v(s) * v(n);
  MatX g = M.metric(x);
  g = 0.5 * (g + g.transpose());
  const MatX T = E.transpose() * g * W * E;
  return 0.5 * (T + T.transpose());
}

namespace {

constexpr double kUnitTolerance = 1e-8;

GeodesicResult run_bundle(const ChartedSpacetime& M, const GeodesicState& s0, const IntegratorConfig& cfg,
                          const JacobiMode& mode) {
  const int d = M.dim(), n = d - 1;
  const MatX g = eval_metric(M, s0.x);
  const double q = inner(g, s0.v, s0.v);
  if (std::abs(q + 1.0) > kUnitTolerance)
    throw ContractError("propagate_jacobi: the geodesic must be unit timelike");

  MatX E;
  MatX A0, Ad0;
  if (mode.kind == JacobiMode::Kind::FromPoint) {
    E = mode.frame.size() ? mode.frame : MatX(orthonormal_frame_from(g, s0.v).rightCols(n));
    A0 = MatX::Zero(n, n);
    Ad0 = MatX::Identity(n, n);
  } else {
    if (mode.K0.rows() != n || mode.K0.cols() != n) throw UsageError("propagate_jacobi: K0 must be n x n");
    E = mode.frame;
    A0 = MatX::Identity(n, n);
    Ad0 = mode.K0;
  }
  if (E.rows() != d || E.cols() != n) throw UsageError("propagate_jacobi: frame must be d x n");
  const MatX gram = E.transpose() * g * E;
  const VecX along = E.transpose() * g * s0.v;
  if ((gram - MatX::Identity(n, n)).cwiseAbs().maxCoeff() > kUnitTolerance ||
      along.cwiseAbs().maxCoeff() > kUnitTolerance)
    throw ContractError("propagate_jacobi: frame is not orthonormal and orthogonal to the velocity");

  Augmentation aug;
  aug.y0.resize(d * n + 2 * n * n);
  aug.y0 << E.reshaped(), A0.reshaped(), Ad0.reshaped();
  aug.rhs = [&M, d, n](const VecX& x, const VecX& v, const VecX& y) {
    const auto Em = y.head(d * n).reshaped(d, n);
    const auto A = y.segment(d * n, n * n).reshaped(n, n);
    const auto Ad = y.tail(n * n).reshaped(n, n);
    const Connection<double> G = fast_connection(M, x);
    MatX dE(d, n);
    for (int l = 0; l < d; ++l) dE.row(l) = -(v.transpose() * G.gamma[l]) * Em;
    const MatX R = tidal_matrix(M, x, v, Em);
    VecX dy(y.size());
    dy << dE.reshaped(), Ad.reshaped(), (-R * A).reshaped();
    return dy;
  };
  return integrate_geodesic(M, s0, cfg, &aug);
}

}  // namespace

JacobiBundle::JacobiBundle(GeodesicResult run, JacobiMode mode)
    : run_(std::move(run)), mode_(std::move(mode)), d_(run_.dim()), n_(run_.dim() - 1) {}

JacobiBundle::Unpacked JacobiBundle::unpack(double t) const {
  if (t < t_begin() || t > t_end()) throw UsageError("JacobiBundle: parameter outside the propagated range");
  const VecX y = run_.dense(t);
  const int d = d_, n = n_;
  Unpacked u;
  u.x = y.head(d);
  u.v = y.segment(d, d);
  const VecX e = y.tail(d * n + 2 * n * n);
  u.E = e.head(d * n).reshaped(d, n);
  // One Gram-Schmidt pass removes the slow drift of the integrated frame
  // away from orthonormality; A and A' stay as integrated.
  MatX g = run_.chart.metric(u.x);
  g = 0.5 * (g + g.transpose());
  const VecX vh = u.v / std::sqrt(-inner(g, u.v, u.v));
  for (int k = 0; k < n; ++k) {
    VecX w = u.E.col(k);
    w += inner(g, w, vh) * vh;
    for (int j = 0; j < k; ++j) w -= inner(g, w, u.E.col(j)) * u.E.col(j);
    u.E.col(k) = w / std::sqrt(inner(g, w, w));
  }
  u.A = e.segment(d * n, n * n).reshaped(n, n);
  u.Ad = e.tail(n * n).reshaped(n, n);
  return u;
}

VecX JacobiBundle::position(double t) const { return unpack(t).x; }
VecX JacobiBundle::velocity(double t) const { return unpack(t).v; }
MatX JacobiBundle::frame(double t) const { return unpack(t).E; }
MatX JacobiBundle::A(double t) const { return unpack(t).A; }
MatX JacobiBundle::A_dot(double t) const { return unpack(t).Ad; }

MatX JacobiBundle::tidal(double t) const {
  const auto u = unpack(t);
  return tidal_matrix(run_.chart, u.x, u.v, u.E);
}

MatX JacobiBundle::A_ddot(double t) const {
  const auto u = unpack(t);
  return -tidal_matrix(run_.chart, u.x, u.v, u.E) * u.A;
}

double JacobiBundle::det(double t) const { return unpack(t).A.determinant(); }

MatX JacobiBundle::shape_operator(double t) const {
  const auto u = unpack(t);
  return u.Ad * inverse(u.A);
}

double JacobiBundle::expansion(double t) const { return shape_operator(t).trace(); }

double JacobiBundle::expansion_log_det(double t) const {
  const auto u = unpack(t);
  Mat<Dual1> B(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) B(i, j) = Dual1(u.A(i, j), u.Ad(i, j));
  const Dual1 D = determinant(B);
  return D.eps / D.val;
}

MatX JacobiBundle::wronskian(double t) const {
  const auto u = unpack(t);
  return u.Ad.transpose() * u.A - u.A.transpose() * u.Ad;
}

JacobiBundle propagate_jacobi(const ChartedSpacetime& M, const GeodesicResult& geodesic, const JacobiMode& mode) {
  if (!(geodesic.chart == M)) throw UsageError("propagate_jacobi: geodesic belongs to another chart");
  if (geodesic.degraded) throw ContractError("propagate_jacobi: the geodesic is degraded");
  if (!geodesic.timelike()) throw ContractError("propagate_jacobi: the geodesic is not timelike");
  IntegratorConfig cfg = geodesic.config;
  cfg.lambda_max = geodesic.lambda_end - geodesic.lambda_begin();
  return JacobiBundle(run_bundle(M, geodesic.samples.front(), cfg, mode), mode);
}

JacobiBundle propagate_from_slice(const SliceSpec& slice, double t_max, IntegratorConfig cfg) {
  cfg.lambda_max = t_max;
  const GeodesicState s0{slice.point, slice.normal, 0.0, 0.0};
  const JacobiMode mode = JacobiMode::from_slice(slice);
  return JacobiBundle(run_bundle(slice.chart, s0, cfg, mode), mode);
}

JacobiBundle propagate_from_point(const ChartedSpacetime& M, const VecX& x, const VecX& v, double t_max,
                                  IntegratorConfig cfg) {
  cfg.lambda_max = t_max;
  const GeodesicState s0{x, v, 0.0, 0.0};
  return JacobiBundle(run_bundle(M, s0, cfg, JacobiMode::from_point()), JacobiMode::from_point());
}

ConjugateReport first_conjugate(const JacobiBundle& bundle, double t_max, int resolution) {
  if (resolution < 2) throw UsageError("first_conjugate: resolution must be at least 2");
  ConjugateReport rep;
  const double t0 = bundle.t_begin();
  const double t1 = std::min(t0 + t_max, bundle.t_end());
  const double h = (t1 - t0) / resolution;
  // det A vanishes at the base point in FromPoint mode, so the scan starts one cell in.
  const int first = bundle.mode().kind == JacobiMode::Kind::FromPoint ? 1 : 0;
  rep.det_trace.reserve(resolution + 1);
  for (int i = first; i <= resolution; ++i) {
    const double t = i == resolution ? t1 : t0 + i * h;
    rep.det_trace.emplace_back(t, bundle.det(t));
  }
  double peak = 0.0;
  for (const auto& [t, dv] : rep.det_trace) peak = std::max(peak, std::abs(dv));

  for (std::size_t i = 0; i + 1 < rep.det_trace.size(); ++i) {
    auto [ta, da] = rep.det_trace[i];
    auto [tb, db] = rep.det_trace[i + 1];
    if (da == 0.0) {
      rep.t_star = ta;
      return rep;
    }
    if ((da > 0) != (db > 0) || db == 0.0) {
      while (tb - ta > 1e-10) {
        const double tm = 0.5 * (ta + tb);
        const double dm = bundle.det(tm);
        if ((dm > 0) == (da > 0) && dm != 0.0) {
          ta = tm;
          da = dm;
        } else {
          tb = tm;
        }
      }
      rep.t_star = 0.5 * (ta + tb);
      rep.refinement = tb - ta;
      return rep;
    }
  }
  // No sign change: flag an interior near-touch of zero.
  for (std::size_t i = 1; i + 1 < rep.det_trace.size(); ++i) {
    const double a = std::abs(rep.det_trace[i - 1].second), b = std::abs(rep.det_trace[i].second),
                 c = std::abs(rep.det_trace[i + 1].second);
    if (b <= a && b <= c && b < 1e-6 * peak) rep.grazing = true;
  }
  return rep;
}

namespace {

void require_unit_timelike(const ChartedSpacetime& M, const VecX& x, const VecX& v) {
  const double q = inner(eval_metric(M, x), v, v);
  if (std::abs(q + 1.0) > kUnitTolerance) throw UsageError("exp_map: direction must be unit timelike");
}

Event exp_from(const ChartedSpacetime& M, const VecX& x, const VecX& v, double t, IntegratorConfig cfg) {
  if (!(t > 0)) throw UsageError("exp_map: t must be positive");
  cfg.lambda_max = t;
  GeodesicResult run = integrate_geodesic(M, GeodesicState{x, v, 0.0, 0.0}, cfg);
  if (run.termination != Termination::ReachedParameterBound) {
    const std::string what = std::string("exp_map: geodesic ended (") + to_string(run.termination) + ") at " +
                             std::to_string(run.lambda_end) + " before t = " + std::to_string(t);
    throw IncompletenessError(what, std::move(run));
  }
  return Event(M, run.final_state().x);
}

}  // namespace

Event exp_map(const Event& p, const VecX& v, double t, IntegratorConfig cfg) {
  require_unit_timelike(p.chart, p.x, v);
  return exp_from(p.chart, p.x, v, t, cfg);
}

Event exp_map(const SliceSpec& slice, double t, IntegratorConfig cfg) {
  return exp_from(slice.chart, slice.point, slice.normal, t, cfg);
}

Eigen::Vector3d Ads2GeodesicOracle::embed(double alpha, const VecX& x) {
  const double c = std::cos(x(1));
  return {alpha * std::cos(x(0)) / c, alpha * std::sin(x(0)) / c, alpha * std::tan(x(1))};
}

Eigen::Vector3d Ads2GeodesicOracle::embed_velocity(double alpha, const VecX& x, const VecX& v) {
  const double ct = std::cos(x(0)), st = std::sin(x(0)), cx = std::cos(x(1)), sx = std::sin(x(1));
  const Eigen::Vector3d dt(-alpha * st / cx, alpha * ct / cx, 0.0);
  const Eigen::Vector3d dx(alpha * ct * sx / (cx * cx), alpha * st * sx / (cx * cx), alpha / (cx * cx));
  return v(0) * dt + v(1) * dx;
}

namespace {
double ambient_inner(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return -a(0) * b(0) - a(1) * b(1) + a(2) * b(2);
}
}  // namespace

Ads2GeodesicOracle::Ads2GeodesicOracle(double alpha, const VecX& p, const VecX& v)
    : alpha_(alpha), t0_(p(0)), P_(embed(alpha, p)), V_(embed_velocity(alpha, p, v)) {
  if (v.norm() == 0.0) throw UsageError("ads2_geodesic_oracle: velocity must be nonzero");
  const double q = ambient_inner(V_, V_);
  if (std::abs(q) <= 1e-12 * V_.squaredNorm()) {
    kind_ = CausalCharacter::Kind::Null;
  } else if (q < 0) {
    kind_ = CausalCharacter::Kind::Timelike;
    omega_ = std::sqrt(-q) / alpha;
  } else {
    kind_ = CausalCharacter::Kind::Spacelike;
    omega_ = std::sqrt(q) / alpha;
  }
}

Eigen::Vector3d Ads2GeodesicOracle::ambient(double lambda) const {
  switch (kind_) {
    case CausalCharacter::Kind::Timelike:
      return P_ * std::cos(omega_ * lambda) + V_ * (std::sin(omega_ * lambda) / omega_);
    case CausalCharacter::Kind::Spacelike:
      return P_ * std::cosh(omega_ * lambda) + V_ * (std::sinh(omega_ * lambda) / omega_);
    case CausalCharacter::Kind::Null:
      break;
  }
  return P_ + lambda * V_;
}

VecX Ads2GeodesicOracle::operator()(double lambda) const {
  // The (u, v) projection winds around the origin; unwrap its angle in
  // steps small enough that each increment stays below pi.
  const int steps =
      kind_ == CausalCharacter::Kind::Timelike ? 1 + static_cast<int>(std::ceil(std::abs(omega_ * lambda) / 0.5)) : 1;
  double t = t0_;
  for (int i = 1; i <= steps; ++i) {
    const Eigen::Vector3d q = ambient(lambda * i / steps);
    double delta = std::atan2(q(1), q(0)) - t;
    delta = std::remainder(delta, 2 * std::numbers::pi);
    t += delta;
  }
  const Eigen::Vector3d q = ambient(lambda);
  VecX x(2);
  x << t, std::atan(q(2) / alpha_);
  return x;
}

Ads2GeodesicOracle ads2_geodesic_oracle(const Tangent& v) {
  const MatX g = eval_metric(v.at.chart, v.at.x);
  if (v.at.chart.dim() != 2) throw UsageError("ads2_geodesic_oracle: needs the two-dimensional chart");
  const double alpha = std::sqrt(g(1, 1)) * std::cos(v.at.x(1));
  return Ads2GeodesicOracle(alpha, v.at.x, v.v);
}

}  // namespace lorentz
