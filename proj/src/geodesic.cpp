#include "lorentz/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lorentz {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ReachedParameterBound: return "reached-parameter-bound";
    case Termination::LeftChartDomain: return "left-chart-domain";
    case Termination::VelocityBlowUp: return "velocity-blow-up";
    case Termination::StepUnderflow: return "step-underflow";
  }
  return "?";
}

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0) || !(abs_tol > 0) || !(lambda_max > 0) || !(blowup_threshold > 0) || !(min_step > 0) ||
      max_step < 0 || domain_margin < 0 || !(drift_bound > 0))
    throw ConfigError("IntegratorConfig: tolerances, bounds and thresholds must be positive");
}

Connection<double> fast_connection(const ChartedSpacetime& M, const VecX& x) {
  if (M.has_closed_form_christoffel()) return M.closed_form_christoffel(x);
  return christoffel_from_metric<double>(M, x);
}

VecX geodesic_acceleration(const ChartedSpacetime& M, const VecX& x, const VecX& v) {
  const auto G = fast_connection(M, x);
  const int d = M.dim();
  VecX a(d);
  for (int l = 0; l < d; ++l) a(l) = -v.dot(G.gamma[l] * v);
  return a;
}

namespace {

GeodesicState unpack(const VecX& y, int d, double lambda) {
  return {y.head(d), y.segment(d, d), lambda, y(2 * d)};
}

}  // namespace

GeodesicState GeodesicResult::at(double lambda) const {
  if (lambda < lambda_begin() || lambda > lambda_end)
    throw UsageError("GeodesicResult::at: parameter outside the integrated range");
  return unpack(dense(lambda), dim(), lambda);
}

GeodesicResult integrate_geodesic(const ChartedSpacetime& M, const GeodesicState& s0, const IntegratorConfig& cfg,
                                  const Augmentation* augmentation) {
  cfg.validate();
  const int d = M.dim();
  if (s0.x.size() != d || s0.v.size() != d) throw UsageError("integrate_geodesic: state has wrong dimension");
  M.require_in_domain(s0.x);

  GeodesicResult res;
  res.chart = M;
  res.config = cfg;
  const MatX g0 = M.metric(s0.x);
  res.initial_norm = inner(g0, s0.v, s0.v);
  res.initial_character = classify(g0, s0.v, M.time_orientation(s0.x));
  const bool timelike = res.timelike();
  const bool is_null = res.initial_character.kind == CausalCharacter::Kind::Null;

  const Eigen::Index n_extra = augmentation ? augmentation->y0.size() : 0;
  OdeRhs rhs = [&M, d, timelike, augmentation, n_extra](double, const VecX& y) {
    const VecX x = y.head(d);
    if (!M.contains(x)) throw std::domain_error("geodesic left the chart");
    const VecX v = y.segment(d, d);
    VecX dy(2 * d + 1 + n_extra);
    dy.head(d) = v;
    dy.segment(d, d) = geodesic_acceleration(M, x, v);
    dy(2 * d) = timelike ? std::sqrt(std::abs(inner(M.metric(x), v, v))) : 0.0;
    if (augmentation) dy.tail(n_extra) = augmentation->rhs(x, v, y.tail(n_extra));
    return dy;
  };

  double max_drift = 0.0;
  bool blew_up = false;
  const double q0 = res.initial_norm;
  OdeObserver observe = [&](double, const VecX& y) {
    const VecX x = y.head(d), v = y.segment(d, d);
    const MatX g = M.metric(x);
    const double q = inner(g, v, v);
    const double denom = is_null ? std::max(auxiliary_scale(g, v), 1e-300) : std::abs(q0);
    max_drift = std::max(max_drift, std::abs(q - q0) / denom);
    if (v.cwiseAbs().maxCoeff() > cfg.blowup_threshold) {
      blew_up = true;
      return false;
    }
    return true;
  };
  const double margin = cfg.domain_margin;
  OdeAdmissible admissible = [&M, d, margin](const VecX& y) { return M.contains(y.head(d), margin); };

  VecX y0(2 * d + 1 + n_extra);
  y0.head(2 * d + 1) << s0.x, s0.v, s0.tau;
  if (augmentation) y0.tail(n_extra) = augmentation->y0;
  OdeOptions opt;
  opt.rtol = cfg.rel_tol;
  opt.atol = cfg.abs_tol;
  opt.max_step = cfg.max_step;
  opt.min_step = cfg.min_step;
  OdeOutcome out = integrate_dopri5(rhs, s0.lambda, y0, s0.lambda + cfg.lambda_max, opt, observe, admissible);

  res.samples.reserve(out.t_samples.size());
  for (std::size_t i = 0; i < out.t_samples.size(); ++i) res.samples.push_back(unpack(out.y_samples[i], d, out.t_samples[i]));
  res.dense = std::move(out.trajectory);
  res.lambda_end = out.t;
  res.conserved_drift = max_drift;

  switch (out.status) {
    case OdeStatus::Reached:
      res.termination = Termination::ReachedParameterBound;
      break;
    case OdeStatus::Stopped:
      res.termination = blew_up ? Termination::VelocityBlowUp : Termination::ReachedParameterBound;
      break;
    case OdeStatus::StepUnderflow:
    case OdeStatus::MaxSteps: {
      res.termination = Termination::StepUnderflow;
      // Probe a short Euler step: collapse right next to a boundary is a boundary hit.
      // Rejected trial states can be wild near a singularity, so they only serve as fallback.
      const GeodesicState& last = res.samples.back();
      const double s = 1e-6 * std::max(1.0, std::abs(last.lambda));
      std::optional<BoundaryHit> hit = M.violation(last.x + s * last.v, margin);
      if (!hit && out.last_rejected_state) hit = M.violation(out.last_rejected_state->head(d), margin);
      if (hit) {
        res.termination = Termination::LeftChartDomain;
        res.boundary = hit;
      }
      if (out.status == OdeStatus::MaxSteps) res.degraded = true;
      break;
    }
  }

  if (res.termination == Termination::VelocityBlowUp && res.samples.size() >= 3) {
    // |v| ~ C (lambda* - lambda)^(-p) gives |v|/|v'| linear in lambda with slope -1/p.
    auto ratio = [&](const GeodesicState& s) {
      const VecX a = geodesic_acceleration(M, s.x, s.v);
      return s.v.cwiseAbs().maxCoeff() / a.cwiseAbs().maxCoeff();
    };
    const auto& s1 = res.samples[res.samples.size() - 2];
    const auto& s2 = res.samples.back();
    const double r1 = ratio(s1), r2 = ratio(s2);
    if (r1 > r2) res.blowup_parameter = s2.lambda + r2 * (s2.lambda - s1.lambda) / (r1 - r2);
  }

  switch (res.termination) {
    case Termination::ReachedParameterBound: res.incomplete = false; break;
    case Termination::LeftChartDomain: res.incomplete = res.boundary && res.boundary->non_extendible(); break;
    case Termination::VelocityBlowUp:
    case Termination::StepUnderflow: res.incomplete = true; break;
  }
  if (res.conserved_drift > cfg.drift_bound) res.degraded = true;
  return res;
}

double circular_orbit_angular_velocity(int n, double r_s, double r) {
  return std::sqrt((n - 2) * std::pow(r_s, n - 2) / (2.0 * std::pow(r, n)));
}

GeodesicState circular_orbit_init(int n, double r_s, double r) {
  if (n < 3) throw UsageError("circular_orbit_init: circular orbits need n >= 3");
  if (!(r_s > 0) || !(r > r_s)) throw UsageError("circular_orbit_init: r must lie in the exterior region");
  const double omega = circular_orbit_angular_velocity(n, r_s, r);
  const double f = 1.0 - std::pow(r_s / r, n - 2);
  const double rate2 = f - r * r * omega * omega;  // (d tau / d t)^2
  if (!(rate2 > 0)) {
    std::ostringstream os;
    os << "circular_orbit_init: no timelike circular orbit at r = " << r << " (f - r^2 (dphi/dt)^2 = " << rate2
       << ")";
    throw PhysicsError(os.str());
  }
  const int d = n + 1;
  GeodesicState s;
  s.x = VecX::Zero(d);
  s.x(1) = r;
  for (int i = 2; i < d - 1; ++i) s.x(i) = std::numbers::pi / 2;
  const double t_dot = 1.0 / std::sqrt(rate2);
  s.v = VecX::Zero(d);
  s.v(0) = t_dot;
  s.v(d - 1) = omega * t_dot;
  return s;
}

double proper_time_between(const GeodesicResult& result, double lambda1, double lambda2) {
  if (!(lambda1 < lambda2)) throw UsageError("proper_time_between: need lambda1 < lambda2");
  if (lambda1 < result.lambda_begin() || lambda2 > result.lambda_end)
    throw UsageError("proper_time_between: parameters outside the integrated range");
  if (!result.timelike()) throw ContractError("proper_time_between: the curve is not timelike");
  const int d = result.dim();
  return result.dense(lambda2)(2 * d) - result.dense(lambda1)(2 * d);
}

}  // namespace lorentz
