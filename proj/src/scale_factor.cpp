#include "lorentz/scale_factor.hpp"

#include <cmath>
#include <sstream>

namespace lorentz {

std::shared_ptr<const ScaleFactor> constant_scale_factor(double a) {
  return std::make_shared<FunctionScaleFactor>([a](double) { return a; }, [](double) { return 0.0; },
                                               [](double) { return 0.0; });
}

namespace {

constexpr double kSwitchFraction = 1e-6;

}  // namespace

ScaleFactorSolution solve_scale_factor(const ScaleFactorProblem& p) {
  if (p.n < 2) throw ConfigError("solve_scale_factor: n must be at least 2");
  if (p.k < -1 || p.k > 1) throw ConfigError("solve_scale_factor: k must be -1, 0 or 1");
  if (!(p.a0 > 0)) throw ConfigError("solve_scale_factor: a0 must be positive");
  if (!(p.t_min <= p.t0 && p.t0 <= p.t_max) || !(p.t_min < p.t_max))
    throw ConfigError("solve_scale_factor: t0 must lie in [t_min, t_max]");
  const double kinetic = 2.0 * p.alpha / std::pow(p.a0, p.n - 2) - p.k;
  if (kinetic < -1e-14) {
    std::ostringstream os;
    os << "solve_scale_factor: inconsistent initial data, 2 alpha / a0^(n-2) - k = " << kinetic << " < 0";
    throw ConfigError(os.str());
  }
  const double a_dot0 = p.a_dot_sign * std::sqrt(std::max(kinetic, 0.0));

  ScaleFactorSolution sol;
  sol.n_ = p.n;
  sol.k_ = p.k;
  sol.alpha_ = p.alpha;
  sol.t0_ = p.t0;
  sol.t_min_ = p.t_min;
  sol.t_max_ = p.t_max;

  OdeOptions opt;
  opt.rtol = p.rtol;
  opt.atol = p.atol;
  opt.min_step = 1e-16;

  auto solve_branch = [&](double dir, double s_end, ScaleFactorSolution::Branch& br) {
    br.s_end = 0.0;
    if (s_end <= 0.0) return;
    const int n = p.n;
    const double alpha = p.alpha;
    // y = (a, da/dt) as functions of s = dir * (t - t0).
    OdeRhs rhs = [dir, n, alpha](double, const VecX& y) {
      if (!(y(0) > 0)) throw std::domain_error("scale factor reached zero");
      VecX dy(2);
      dy(0) = dir * y(1);
      dy(1) = dir * (2.0 - n) * alpha * std::pow(y(0), 1.0 - n);
      return dy;
    };
    const double a_switch = kSwitchFraction * p.a0;
    bool hit_zero = false;
    OdeObserver obs = [&](double, const VecX& y) {
      if (y(0) < a_switch) {
        hit_zero = true;
        return false;
      }
      return true;
    };
    VecX y0(2);
    y0 << p.a0, a_dot0;
    OdeOutcome out = integrate_dopri5(rhs, 0.0, y0, s_end, opt, obs, [](const VecX& y) { return y(0) > 0; });
    br.traj = std::move(out.trajectory);
    br.s_end = out.t;
    if (hit_zero || out.status == OdeStatus::StepUnderflow) {
      const double a_sw = out.y(0);
      const double a_dot_sw = std::abs(out.y(1));
      br.span = (2.0 / n) * a_sw / a_dot_sw;
      br.a_switch = a_sw;
      br.t_sing = p.t0 + dir * (out.t + br.span);
    } else if (out.status != OdeStatus::Reached) {
      throw ContractError("solve_scale_factor: integration failed before reaching the requested range");
    }
  };

  solve_branch(+1.0, p.t_max - p.t0, sol.forward_);
  solve_branch(-1.0, p.t0 - p.t_min, sol.backward_);
  if (sol.forward_.t_sing) sol.t_crunch_ = sol.forward_.t_sing;
  if (sol.backward_.t_sing) sol.t_bang_ = sol.backward_.t_sing;
  return sol;
}

ScaleFactorSolution::Local ScaleFactorSolution::state(double t) const {
  const bool fwd = t >= t0_;
  const Branch& br = fwd ? forward_ : backward_;
  const double dir = fwd ? 1.0 : -1.0;
  const double s = dir * (t - t0_);
  if (s <= br.s_end || br.traj.empty()) {
    if (br.traj.empty()) {
      // Degenerate branch of zero length.
      const Branch& other = fwd ? backward_ : forward_;
      if (other.traj.empty()) throw DomainError("ScaleFactorSolution: empty solution", 0);
      const VecX y = other.traj(0.0);
      return {y(0), y(1)};
    }
    const VecX y = br.traj(s);
    return {y(0), y(1)};
  }
  if (br.t_sing) {
    const double rem = dir * (*br.t_sing - t);
    if (rem > 0) {
      const double a = br.a_switch * std::pow(rem / br.span, 2.0 / n_);
      // a decreases towards the singular time in the direction of travel.
      const double a_dot = -dir * (2.0 / n_) * a / rem;
      return {a, a_dot};
    }
  }
  std::ostringstream os;
  os << "ScaleFactorSolution: t = " << t << " outside the solved range";
  throw DomainError(os.str(), 0);
}

double ScaleFactorSolution::value(double t) const { return state(t).a; }
double ScaleFactorSolution::first(double t) const { return state(t).a_dot; }
double ScaleFactorSolution::second(double t) const {
  return (2.0 - n_) * alpha_ * std::pow(state(t).a, 1.0 - n_);
}

CoordinateRange ScaleFactorSolution::range() const {
  CoordinateRange r;
  r.lo = t_bang_ ? *t_bang_ : t_min_;
  r.lo_kind = t_bang_ ? BoundaryKind::CurvatureSingularity : BoundaryKind::ChartEdge;
  r.hi = t_crunch_ ? *t_crunch_ : t_max_;
  r.hi_kind = t_crunch_ ? BoundaryKind::CurvatureSingularity : BoundaryKind::ChartEdge;
  return r;
}

double ScaleFactorSolution::energy_residual(double t) const {
  const auto s = state(t);
  return 0.5 * s.a_dot * s.a_dot - alpha_ / std::pow(s.a, n_ - 2) + 0.5 * k_;
}

double ScaleFactorSolution::density(double t) const {
  return n_ * (n_ - 1) * alpha_ / std::pow(value(t), n_);
}

}  // namespace lorentz
