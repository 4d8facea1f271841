#pragma once

// Expansion of normal congruences, the Raychaudhuri identity, the Riccati
// comparison bound and end-to-end singularity scenarios.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lorentz/catalog.hpp"
#include "lorentz/jacobi.hpp"
#include "lorentz/scale_factor.hpp"
#include "lorentz/slice.hpp"

namespace lorentz {

struct CongruenceTrace {
  int n = 0;
  std::vector<double> t;
  std::vector<double> theta;          // tr(A' A^-1)
  std::vector<double> theta_log_det;  // (ln det A)'
  std::vector<double> theta_dot;      // tr(A'' A^-1) - tr K^2, from the propagated fields
  std::vector<double> trace_K2;
  std::vector<double> ric_xx;         // Ric(c', c') from the curvature engine
  std::vector<double> tidal_scale;    // max |R_ki|, the rounding scale of Ric(c', c')
  std::vector<MatX> K;
  /// First zero of det A.
  std::optional<double> conjugate;
  /// conjugate, or the end of the geodesic when it stops first.
  std::optional<double> t_star;
  double t_end = 0.0;
  bool truncated = false;  // |theta| exceeded the blow-up cap
};

struct ExpansionOptions {
  int grid = 400;
  double theta_cap = 1e8;
  IntegratorConfig integrator;
};

/// Propagates the slice's normal congruence and samples theta on a uniform
/// grid of [0, t_end) that leaves out the last cell before t_star.
CongruenceTrace evolve_expansion(const SliceSpec& slice, double t_max, const ExpansionOptions& opt = {});

/// max |theta' + tr K^2 + Ric(c', c')| over the trace.
double raychaudhuri_residual(const CongruenceTrace& trace);
/// Same residual divided pointwise by max(1, |theta'|, tr K^2, |Ric(c', c')|).
double raychaudhuri_relative_residual(const CongruenceTrace& trace);

struct RiccatiCheck {
  bool applicable = true;   // Ric(c', c') >= -1e-8 max(1, tidal scale) along the trace
  bool holds = true;        // 1/theta >= 1/theta0 + t/n - tol everywhere
  double max_violation = 0.0;
  double bound = 0.0;       // n / |theta0|
  std::optional<SecWitness> sec_witness;
};

/// theta0 < 0 is required (UsageError otherwise).
RiccatiCheck riccati_bound_check(const CongruenceTrace& trace, double theta0, double tol = 1e-9);

struct FocusingReport {
  std::string metric;
  TimeDirection direction = TimeDirection::Future;
  double theta0 = 0.0;      // expansion of the slice with respect to its future normal
  double theta0_run = 0.0;  // expansion seen along the direction of travel (negative)
  SecVerdict sec;           // sampled over the catalog region
  bool sec_along_trace = true;
  bool applicable = true;   // SEC holds both sampled and along the trace
  double bound = 0.0;       // n / |theta0|
  double t_star = 0.0;
  std::optional<double> conjugate;
  Termination termination = Termination::ReachedParameterBound;
  std::optional<BoundaryHit> boundary;
  bool incomplete = false;
  double proper_time = 0.0;  // along the normal geodesic until it stopped
  double max_curvature = 0.0;  // max |Riem| sampled along the geodesic
  double raychaudhuri_residual = 0.0;
  double raychaudhuri_relative_residual = 0.0;
  bool riccati_holds = true;
  bool satisfied = false;  // t_star <= bound + tol

  std::vector<std::pair<std::string, std::string>> key_values() const;
};

struct ScenarioOptions {
  double t_max = 10.0;
  int sec_samples = 200;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  ExpansionOptions expansion;
};

/// SEC sampling, expansion, Riccati comparison and the normal geodesic of the
/// slice composed into one report. The slice must contract along its run.
FocusingReport singularity_scenario(const CatalogEntry& entry, const SliceSpec& slice, const ScenarioOptions& opt);

}  // namespace lorentz
