#pragma once

// Scale factors a(t) for FLRW charts and the solver for the Friedmann
// energy equation  a'^2/2 - alpha / a^(n-2) = -k/2.

#include <functional>
#include <memory>
#include <optional>

#include "lorentz/dual.hpp"
#include "lorentz/ode.hpp"
#include "lorentz/spacetime.hpp"

namespace lorentz {

/// A positive function a(t) with its first two derivatives on (t_min, t_max).
class ScaleFactor {
 public:
  virtual ~ScaleFactor() = default;
  virtual double value(double t) const = 0;
  virtual double first(double t) const = 0;
  virtual double second(double t) const = 0;
  virtual CoordinateRange range() const { return {}; }

  double derivative(int order, double t) const {
    switch (order) {
      case 0: return value(t);
      case 1: return first(t);
      case 2: return second(t);
      default: throw UnsupportedError("ScaleFactor: only derivatives up to second order are available");
    }
  }
};

/// Evaluates the order-th derivative of a at a (possibly nested) dual time.
inline double scale_factor_jet(const ScaleFactor& a, int order, double t) { return a.derivative(order, t); }
template <class T>
Dual<T> scale_factor_jet(const ScaleFactor& a, int order, const Dual<T>& t) {
  return Dual<T>(scale_factor_jet(a, order, t.val), scale_factor_jet(a, order + 1, t.val) * t.eps);
}

/// a(t) given by closures, e.g. closed forms used as oracles.
class FunctionScaleFactor final : public ScaleFactor {
 public:
  FunctionScaleFactor(std::function<double(double)> a, std::function<double(double)> da,
                      std::function<double(double)> dda, CoordinateRange range = {})
      : a_(std::move(a)), da_(std::move(da)), dda_(std::move(dda)), range_(range) {}
  double value(double t) const override { return a_(t); }
  double first(double t) const override { return da_(t); }
  double second(double t) const override { return dda_(t); }
  CoordinateRange range() const override { return range_; }

 private:
  std::function<double(double)> a_, da_, dda_;
  CoordinateRange range_;
};

std::shared_ptr<const ScaleFactor> constant_scale_factor(double a = 1.0);

struct ScaleFactorProblem {
  int n = 3;
  int k = 0;
  double alpha = 1.0;
  double a0 = 1.0;
  int a_dot_sign = 1;  // sign of a'(t0); 0 is allowed only at a turning point
  double t0 = 0.0;
  double t_min = -10.0;
  double t_max = 10.0;
  double rtol = 1e-12;
  double atol = 1e-14;
};

/// Numerical a(t). Finite-time zeros of a (Big Bang or Big Crunch) are
/// located and bounded as curvature singularities of the range.
class ScaleFactorSolution final : public ScaleFactor {
 public:
  double value(double t) const override;
  double first(double t) const override;
  double second(double t) const override;
  CoordinateRange range() const override;

  int n() const { return n_; }
  int k() const { return k_; }
  double alpha() const { return alpha_; }
  std::optional<double> t_bang() const { return t_bang_; }
  std::optional<double> t_crunch() const { return t_crunch_; }
  /// a'^2/2 - alpha/a^(n-2) + k/2 at t.
  double energy_residual(double t) const;
  /// Dust density n(n-1) alpha / a^n.
  double density(double t) const;

 private:
  friend ScaleFactorSolution solve_scale_factor(const ScaleFactorProblem&);

  struct Branch {
    // Numerical piece, parameterised by s = sign * (t - t0) >= 0.
    DenseTrajectory traj;
    double s_end = 0.0;
    // Analytic leading-order piece near a zero of a: a = a_sw (|t - t_sing| / span)^(2/n).
    std::optional<double> t_sing;
    double a_switch = 0.0;
    double span = 0.0;
  };
  struct Local {
    double a, a_dot;
  };
  Local state(double t) const;

  int n_ = 3, k_ = 0;
  double alpha_ = 1.0, t0_ = 0.0, t_min_ = 0.0, t_max_ = 0.0;
  Branch forward_, backward_;
  std::optional<double> t_bang_, t_crunch_;
};

/// Throws ConfigError when 2 alpha / a0^(n-2) - k < 0 (no real a'(t0)).
ScaleFactorSolution solve_scale_factor(const ScaleFactorProblem& problem);

}  // namespace lorentz
