#pragma once

// Proper time of arbitrary curves, endpoint-fixed random variations and the
// maximality experiments built on them.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "lorentz/geodesic.hpp"

namespace lorentz {

/// A parametrised curve s -> x(s) on [s_begin, s_end].
class Curve {
 public:
  virtual ~Curve() = default;
  virtual double s_begin() const = 0;
  virtual double s_end() const = 0;
  virtual VecX position(double s) const = 0;
  virtual VecX velocity(double s) const = 0;
  /// Parameters where the curve is only C^1; quadrature splits there.
  virtual std::vector<double> breakpoints() const { return {s_begin(), s_end()}; }
};

class FunctionCurve final : public Curve {
 public:
  FunctionCurve(double s0, double s1, std::function<VecX(double)> x, std::function<VecX(double)> v)
      : s0_(s0), s1_(s1), x_(std::move(x)), v_(std::move(v)) {}
  double s_begin() const override { return s0_; }
  double s_end() const override { return s1_; }
  VecX position(double s) const override { return x_(s); }
  VecX velocity(double s) const override { return v_(s); }

 private:
  double s0_, s1_;
  std::function<VecX(double)> x_, v_;
};

/// Piecewise cubic Hermite interpolation through nodes with tangents.
class SampledCurve final : public Curve {
 public:
  SampledCurve(std::vector<double> grid, std::vector<VecX> points, std::vector<VecX> tangents);
  /// Tangents from a curve evaluated on the grid.
  static SampledCurve sample(const Curve& c, const std::vector<double>& grid);

  double s_begin() const override { return grid_.front(); }
  double s_end() const override { return grid_.back(); }
  VecX position(double s) const override;
  VecX velocity(double s) const override;
  std::vector<double> breakpoints() const override { return grid_; }

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<VecX>& points() const { return points_; }
  /// Causal character of each segment: the worst of five interior checks.
  std::vector<CausalCharacter::Kind> causal_check(const ChartedSpacetime& M) const;

 private:
  std::size_t segment(double s) const;
  std::vector<double> grid_;
  std::vector<VecX> points_, tangents_;
};

/// Integral of |<c', c'>|^(1/2) by adaptive Gauss-Kronrod quadrature between
/// breakpoints. Throws ContractError at the first non-timelike node.
double curve_proper_time(const ChartedSpacetime& M, const Curve& c, double rel_tol = 1e-11);

struct ShootingResult {
  VecX v;  // exp_p(v) = q
  double residual = 0.0;
  int iterations = 0;
  GeodesicResult geodesic;
};

/// Newton iteration on the initial velocity so that the geodesic from p
/// reaches q at parameter 1. Throws ContractError when it does not converge.
ShootingResult shoot_geodesic(const ChartedSpacetime& M, const VecX& p, const VecX& q,
                              std::optional<VecX> guess = std::nullopt, double tol = 1e-10);

struct VariationFamily {
  double amplitude = 0.3;
  int modes = 8;  // sine modes sin(k pi s), k = 1..modes, vanishing at both ends
  std::uint64_t seed = 1;
  bool adapt_amplitude = true;  // halve until the pilot rejection rate is at most 1/2
};

struct TwinResult {
  double tau_geodesic = 0.0;
  double tau_max_perturbed = 0.0;
  double margin = 0.0;  // tau_geodesic - tau_max_perturbed
  int trials = 0;
  long rejected = 0;
  double amplitude = 0.0;  // amplitude actually used
  double shooting_residual = 0.0;
  std::vector<double> taus;
};

/// N endpoint-fixed timelike variations of the geodesic from p to q.
/// Each trial draws from its own stream seeded by (seed, trial index), so
/// results do not depend on `jobs`.
TwinResult twin_trial(const ChartedSpacetime& M, const VecX& p, const VecX& q, const VariationFamily& family,
                      int N, int jobs = 1);

/// W_p(q) = eta(y, y) for the normal coordinates y of q in an orthonormal frame at p.
double w_function(const ChartedSpacetime& M, const VecX& p, const VecX& q);

struct LongCurve {
  SampledCurve curve;
  double tau = 0.0;          // measured on the sampled curve
  double lower_bound = 0.0;  // alpha eps / cos x0
  double t_first = 0.0, t_second = 0.0;  // ends of the vertical stretch
};

/// Timelike curve in AdS2 from (0, 0) to (pi + eps, 0) that follows slope
/// +-slope out to x = x0 and waits there, corners rounded over width delta.
LongCurve ads_long_causal_curve(double eps, double x0, double alpha = 1.0, double slope = 0.999,
                                double delta = 1e-3);

}  // namespace lorentz
