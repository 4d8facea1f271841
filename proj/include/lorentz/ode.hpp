#pragma once

// Embedded Runge-Kutta 5(4) (Dormand-Prince) with PI step control and the
// standard fourth-order continuous extension.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lorentz/linalg.hpp"

namespace lorentz {

/// One accepted step's continuous extension.
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  VecX r1, r2, r3, r4, r5;

  double t1() const { return t0 + h; }
  VecX value(double t) const;
  VecX derivative(double t) const;
};

/// Piecewise dense output over [t_begin, t_end].
class DenseTrajectory {
 public:
  void append(DenseSegment s) { segments_.push_back(std::move(s)); }
  bool empty() const { return segments_.empty(); }
  double t_begin() const { return segments_.front().t0; }
  double t_end() const { return segments_.back().t1(); }
  const std::vector<DenseSegment>& segments() const { return segments_; }

  /// Values are clamped to the covered interval.
  VecX operator()(double t) const { return locate(t).value(t); }
  VecX derivative(double t) const { return locate(t).derivative(t); }
  double component(double t, int i) const { return (*this)(t)(i); }

 private:
  const DenseSegment& locate(double t) const;
  std::vector<DenseSegment> segments_;
};

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = 0.0;  // 0 means unbounded
  double min_step = 1e-14;
  double initial_step = 0.0;  // 0 means automatic
  long max_steps = 2'000'000;
};

enum class OdeStatus { Reached, Stopped, StepUnderflow, MaxSteps };

struct OdeOutcome {
  OdeStatus status = OdeStatus::Reached;
  double t = 0.0;
  VecX y;
  DenseTrajectory trajectory;
  std::vector<double> t_samples;
  std::vector<VecX> y_samples;
  /// True when the step size collapsed because trial states kept falling
  /// outside the admissible region, rather than from error control.
  bool blocked_by_region = false;
  std::optional<VecX> last_rejected_state;
  long accepted = 0;
  long rejected = 0;
};

/// Right-hand side. May throw std::domain_error for inadmissible states;
/// the step is then rejected and retried with a smaller size.
using OdeRhs = std::function<VecX(double, const VecX&)>;
/// Called after every accepted step; return false to stop.
using OdeObserver = std::function<bool(double, const VecX&)>;
/// Admissibility of an accepted state.
using OdeAdmissible = std::function<bool(const VecX&)>;

/// Integrates y' = f(t, y) from t0 towards t_end (t_end > t0).
OdeOutcome integrate_dopri5(const OdeRhs& f, double t0, const VecX& y0, double t_end, const OdeOptions& opt,
                            const OdeObserver& observe = {}, const OdeAdmissible& admissible = {});

}  // namespace lorentz
