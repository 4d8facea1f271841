#include "lorentz/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lorentz/errors.hpp"

namespace lorentz {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const VecX& err, const VecX& y0, const VecX& y1, const OdeOptions& opt) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = opt.atol + opt.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    const double r = err(i) / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(err.size()));
}

}  // namespace

VecX DenseSegment::value(double t) const {
  const double th = h == 0.0 ? 0.0 : (t - t0) / h;
  const double th1 = 1.0 - th;
  return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
}

VecX DenseSegment::derivative(double t) const {
  const double th = h == 0.0 ? 0.0 : (t - t0) / h;
  const double th1 = 1.0 - th;
  return (r2 + (1.0 - 2.0 * th) * r3 + th * (2.0 - 3.0 * th) * r4 + 2.0 * th * th1 * (1.0 - 2.0 * th) * r5) / h;
}

const DenseSegment& DenseTrajectory::locate(double t) const {
  if (segments_.empty()) throw UsageError("DenseTrajectory: empty");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const DenseSegment& s) { return v < s.t0; });
  if (it == segments_.begin()) return segments_.front();
  return *std::prev(it);
}

OdeOutcome integrate_dopri5(const OdeRhs& f, double t0, const VecX& y0, double t_end, const OdeOptions& opt,
                            const OdeObserver& observe, const OdeAdmissible& admissible) {
  if (!(opt.rtol > 0) || !(opt.atol > 0) || !(opt.min_step > 0) || opt.max_step < 0)
    throw ConfigError("integrate_dopri5: tolerances and step bounds must be positive");
  if (!(t_end > t0)) throw ConfigError("integrate_dopri5: t_end must exceed t0");

  OdeOutcome out;
  out.t = t0;
  out.y = y0;
  out.t_samples.push_back(t0);
  out.y_samples.push_back(y0);

  const double span = t_end - t0;
  const double hmax = opt.max_step > 0 ? opt.max_step : span;

  double t = t0;
  VecX y = y0;
  VecX k1 = f(t, y);

  double h = opt.initial_step;
  if (!(h > 0)) {
    // Hairer's first guess, without the second evaluation.
    const double sc = opt.atol + opt.rtol * y.cwiseAbs().maxCoeff();
    const double dnf = k1.cwiseAbs().maxCoeff() / sc;
    const double dny = y.cwiseAbs().maxCoeff() / sc;
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min({h, hmax, span});
  }

  const double beta = 0.04, expo1 = 0.2 - beta * 0.75, safety = 0.9;
  double err_old = 1e-4;
  int region_rejections = 0;

  while (t < t_end) {
    if (out.accepted + out.rejected >= opt.max_steps) {
      out.status = OdeStatus::MaxSteps;
      break;
    }
    const double h_floor = std::max(opt.min_step, 16.0 * std::numeric_limits<double>::epsilon() * std::abs(t));
    if (h < h_floor) {
      out.status = OdeStatus::StepUnderflow;
      out.blocked_by_region = region_rejections > 0;
      break;
    }
    bool last = false;
    if (t + h >= t_end || t + 1.01 * h >= t_end) {
      h = t_end - t;
      last = true;
    }

    VecX k2, k3, k4, k5, k6, k7, y1;
    bool region_fail = false;
    try {
      k2 = f(t + c2 * h, y + h * (a21 * k1));
      k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
      k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      if (admissible && !admissible(y1)) {
        region_fail = true;
        out.last_rejected_state = y1;
      } else {
        k7 = f(t + h, y1);
      }
    } catch (const std::domain_error&) {
      region_fail = true;
    }
    bool finite = !region_fail && y1.allFinite() && k7.allFinite();
    if (region_fail || !finite) {
      ++out.rejected;
      if (region_fail) ++region_rejections;
      h *= 0.25;
      continue;
    }

    const VecX err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, y1, opt);
    if (!std::isfinite(en)) {
      ++out.rejected;
      h *= 0.25;
      continue;
    }

    if (en <= 1.0) {
      DenseSegment seg;
      seg.t0 = t;
      seg.h = h;
      seg.r1 = y;
      seg.r2 = y1 - y;
      seg.r3 = h * k1 - seg.r2;
      seg.r4 = seg.r2 - h * k7 - seg.r3;
      seg.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      out.trajectory.append(std::move(seg));

      t = last ? t_end : t + h;
      y = y1;
      k1 = k7;
      ++out.accepted;
      region_rejections = 0;
      out.t_samples.push_back(t);
      out.y_samples.push_back(y);

      double fac = std::pow(std::max(en, 1e-10), expo1) / std::pow(err_old, beta) / safety;
      fac = std::clamp(fac, 0.2, 10.0);
      err_old = std::max(en, 1e-4);
      h = std::min(h / fac, hmax);

      if (observe && !observe(t, y)) {
        out.status = OdeStatus::Stopped;
        break;
      }
    } else {
      ++out.rejected;
      const double fac = std::clamp(std::pow(en, expo1) / safety, 1.0, 5.0);
      h /= fac;
    }
  }
  out.t = t;
  out.y = y;
  if (t >= t_end && out.status == OdeStatus::Reached) out.status = OdeStatus::Reached;
  return out;
}

}  // namespace lorentz
