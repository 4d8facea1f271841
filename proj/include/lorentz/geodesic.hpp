#pragma once

// Adaptive integration of the geodesic equation x'' + Gamma(x)(x', x') = 0
// with conservation monitoring and incompleteness classification.

#include <functional>
#include <optional>
#include <vector>

#include "lorentz/curvature.hpp"
#include "lorentz/ode.hpp"
#include "lorentz/spacetime.hpp"

namespace lorentz {

struct GeodesicState {
  VecX x;
  VecX v;
  double lambda = 0.0;
  double tau = 0.0;  // accumulated proper time, timelike runs only
};

enum class Termination { ReachedParameterBound, LeftChartDomain, VelocityBlowUp, StepUnderflow };
const char* to_string(Termination t);

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 0.0;  // 0: unbounded
  double lambda_max = 1.0;
  double blowup_threshold = 1e12;
  double min_step = 1e-14;
  double domain_margin = 1e-10;
  /// Relative drift of <v,v> beyond which the result is marked degraded.
  double drift_bound = 1e-6;

  void validate() const;
};

/// Extra components integrated alongside (x, v) with the same step control,
/// e.g. a transported frame and Jacobi fields.
struct Augmentation {
  VecX y0;
  std::function<VecX(const VecX& x, const VecX& v, const VecX& extra)> rhs;
};

struct GeodesicResult {
  ChartedSpacetime chart;
  IntegratorConfig config;
  std::vector<GeodesicState> samples;
  /// Dense output of the packed state (x, v, tau, augmentation).
  DenseTrajectory dense;
  Termination termination = Termination::ReachedParameterBound;
  std::optional<BoundaryHit> boundary;  // set for LeftChartDomain
  CausalCharacter initial_character;
  double initial_norm = 0.0;  // <v,v> at lambda = 0
  double conserved_drift = 0.0;
  bool degraded = false;
  bool incomplete = false;
  double lambda_end = 0.0;
  /// Extrapolated parameter of the velocity singularity, VelocityBlowUp only.
  std::optional<double> blowup_parameter;

  int dim() const { return chart.dim(); }
  bool timelike() const { return initial_character.kind == CausalCharacter::Kind::Timelike; }
  double lambda_begin() const { return samples.front().lambda; }
  /// Dense-output state at lambda.
  GeodesicState at(double lambda) const;
  const GeodesicState& final_state() const { return samples.back(); }
  /// Augmentation components at lambda (empty without augmentation).
  VecX extra(double lambda) const {
    const VecX y = dense(lambda);
    return y.tail(y.size() - 2 * dim() - 1);
  }
};

/// -Gamma^l_{mn} v^m v^n, using the closed form when the chart has one.
VecX geodesic_acceleration(const ChartedSpacetime& M, const VecX& x, const VecX& v);
/// Connection used by the integrators: closed form or dual-number route, no conditioning check.
Connection<double> fast_connection(const ChartedSpacetime& M, const VecX& x);

GeodesicResult integrate_geodesic(const ChartedSpacetime& M, const GeodesicState& s0, const IntegratorConfig& cfg,
                                  const Augmentation* augmentation = nullptr);

/// Circular timelike geodesic at radius r on the equator of the exterior
/// Schwarzschild chart, unit normalised, starting at t = phi = 0.
/// Throws PhysicsError where no timelike circular orbit exists.
GeodesicState circular_orbit_init(int n, double r_s, double r);
/// (d phi / d t) for circular orbits: ((n-2) r_s^(n-2) / (2 r^n))^(1/2).
double circular_orbit_angular_velocity(int n, double r_s, double r);

/// Proper time along the run between two parameter values.
double proper_time_between(const GeodesicResult& result, double lambda1, double lambda2);

}  // namespace lorentz
