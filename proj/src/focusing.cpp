#include "lorentz/focusing.hpp"

#include <algorithm>
#include <cmath>

#include "lorentz/format.hpp"

namespace lorentz {

CongruenceTrace evolve_expansion(const SliceSpec& slice, double t_max, const ExpansionOptions& opt) {
  if (!(t_max > 0)) throw UsageError("evolve_expansion: t_max must be positive");
  if (opt.grid < 2) throw UsageError("evolve_expansion: grid must have at least two cells");
  const JacobiBundle bundle = propagate_from_slice(slice, t_max, opt.integrator);
  const ConjugateReport conj = first_conjugate(bundle, t_max);
  const ChartedSpacetime& M = slice.chart;

  CongruenceTrace tr;
  tr.n = slice.n();
  tr.t_end = bundle.t_end();
  tr.conjugate = conj.t_star;
  if (conj.t_star)
    tr.t_star = conj.t_star;
  else if (bundle.base().termination != Termination::ReachedParameterBound)
    tr.t_star = bundle.t_end();
  const double limit = tr.t_star.value_or(bundle.t_end());

  for (int i = 0; i < opt.grid; ++i) {
    const double t = limit * i / opt.grid;
    const MatX A = bundle.A(t);
    const MatX Ainv = inverse(A);
    const MatX K = bundle.A_dot(t) * Ainv;
    const double theta = K.trace();
    if (std::abs(theta) > opt.theta_cap) {
      tr.truncated = true;
      break;
    }
    const double trK2 = (K * K).trace();
    const VecX x = bundle.position(t), v = bundle.velocity(t);
    tr.t.push_back(t);
    tr.theta.push_back(theta);
    tr.theta_log_det.push_back(bundle.expansion_log_det(t));
    const MatX R = bundle.tidal(t);
    tr.theta_dot.push_back((-R * A * Ainv).trace() - trK2);
    tr.tidal_scale.push_back(R.cwiseAbs().maxCoeff());
    tr.trace_K2.push_back(trK2);
    tr.ric_xx.push_back(v.dot(ricci(M, x) * v));
    tr.K.push_back(K);
  }
  return tr;
}

double raychaudhuri_residual(const CongruenceTrace& trace) {
  double r = 0.0;
  for (std::size_t i = 0; i < trace.t.size(); ++i)
    r = std::max(r, std::abs(trace.theta_dot[i] + trace.trace_K2[i] + trace.ric_xx[i]));
  return r;
}

double raychaudhuri_relative_residual(const CongruenceTrace& trace) {
  double r = 0.0;
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const double scale =
        std::max({1.0, std::abs(trace.theta_dot[i]), trace.trace_K2[i], std::abs(trace.ric_xx[i])});
    r = std::max(r, std::abs(trace.theta_dot[i] + trace.trace_K2[i] + trace.ric_xx[i]) / scale);
  }
  return r;
}

RiccatiCheck riccati_bound_check(const CongruenceTrace& trace, double theta0, double tol) {
  if (!(theta0 < 0)) throw UsageError("riccati_bound_check: theta0 must be negative");
  RiccatiCheck rc;
  rc.bound = trace.n / std::abs(theta0);
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    if (trace.ric_xx[i] < -1e-8 * std::max(1.0, trace.tidal_scale[i])) {
      rc.applicable = false;
      break;
    }
  }
  if (!rc.applicable) {
    rc.holds = false;
    return rc;
  }
  for (std::size_t i = 0; i < trace.t.size(); ++i) {
    const double rhs = 1.0 / theta0 + trace.t[i] / trace.n;
    const double v = rhs - 1.0 / trace.theta[i];
    rc.max_violation = std::max(rc.max_violation, v);
    if (v > tol * std::max(1.0, std::abs(rhs))) rc.holds = false;
  }
  return rc;
}

std::vector<std::pair<std::string, std::string>> FocusingReport::key_values() const {
  std::vector<std::pair<std::string, std::string>> kv;
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  kv.emplace_back("metric", metric);
  kv.emplace_back("direction", direction == TimeDirection::Future ? "future" : "past");
  kv.emplace_back("theta0", format_double(theta0));
  kv.emplace_back("theta0_run", format_double(theta0_run));
  kv.emplace_back("sec_sampled", b(sec.holds));
  kv.emplace_back("sec_samples", std::to_string(sec.samples));
  kv.emplace_back("sec_along_trace", b(sec_along_trace));
  kv.emplace_back("applicable", b(applicable));
  kv.emplace_back("bound", format_double(bound));
  kv.emplace_back("t_star", format_double(t_star));
  kv.emplace_back("conjugate", conjugate ? format_double(*conjugate) : "none");
  kv.emplace_back("termination", to_string(termination));
  kv.emplace_back("boundary", boundary ? boundary->name + ":" + to_string(boundary->side) + ":" +
                                             to_string(boundary->kind)
                                       : "none");
  kv.emplace_back("incomplete", b(incomplete));
  kv.emplace_back("proper_time", format_double(proper_time));
  kv.emplace_back("max_curvature", format_double(max_curvature));
  kv.emplace_back("raychaudhuri_residual", format_double(raychaudhuri_residual));
  kv.emplace_back("raychaudhuri_relative_residual", format_double(raychaudhuri_relative_residual));
  kv.emplace_back("riccati_holds", b(riccati_holds));
  kv.emplace_back("satisfied", b(satisfied));
  return kv;
}

FocusingReport singularity_scenario(const CatalogEntry& entry, const SliceSpec& slice, const ScenarioOptions& opt) {
  if (!(slice.chart == entry.spacetime)) throw UsageError("singularity_scenario: slice is on another chart");
  const ChartedSpacetime& M = entry.spacetime;
  FocusingReport rep;
  rep.metric = entry.name;
  rep.direction = slice.direction;
  rep.theta0_run = slice.expansion();
  rep.theta0 = slice.direction == TimeDirection::Future ? rep.theta0_run : -rep.theta0_run;
  if (!(rep.theta0_run < 0))
    throw ContractError("singularity_scenario: the slice does not contract in the direction of travel");

  rep.sec = sec_sample(M, entry.sampler, opt.sec_samples, opt.seed);
  const CongruenceTrace trace = evolve_expansion(slice, opt.t_max, opt.expansion);
  const RiccatiCheck rc = riccati_bound_check(trace, rep.theta0_run);
  rep.sec_along_trace = rc.applicable;
  rep.applicable = rep.sec.holds && rc.applicable;
  rep.riccati_holds = rc.holds;
  rep.bound = rc.bound;
  rep.raychaudhuri_residual = raychaudhuri_residual(trace);
  rep.raychaudhuri_relative_residual = raychaudhuri_relative_residual(trace);
  rep.conjugate = trace.conjugate;

  IntegratorConfig cfg = opt.expansion.integrator;
  cfg.lambda_max = opt.t_max;
  const GeodesicResult geo = integrate_geodesic(M, GeodesicState{slice.point, slice.normal, 0.0, 0.0}, cfg);
  rep.termination = geo.termination;
  rep.boundary = geo.boundary;
  rep.incomplete = geo.incomplete;
  rep.proper_time = geo.final_state().tau;
  const std::size_t stride = std::max<std::size_t>(1, geo.samples.size() / 200);
  for (std::size_t i = 0; i < geo.samples.size(); i += stride)
    rep.max_curvature = std::max(rep.max_curvature, riemann(M, geo.samples[i].x).max_abs());

  double t_star = kInf;
  if (rep.conjugate) t_star = *rep.conjugate;
  if (geo.incomplete) t_star = std::min(t_star, rep.proper_time);
  rep.t_star = t_star;
  rep.satisfied = t_star <= rep.bound + opt.tol;
  return rep;
}

}  // namespace lorentz
