#include "lorentz/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "lorentz/catalog.hpp"
#include "lorentz/curve.hpp"
#include "lorentz/focusing.hpp"
#include "lorentz/format.hpp"
#include "lorentz/geodesic.hpp"
#include "lorentz/jacobi.hpp"
#include "lorentz/slice.hpp"

namespace lorentz {

const char* version() { return LORENTZ_VERSION; }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

constexpr double pi = std::numbers::pi;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string field(const std::string& section, const std::string& key) { return section + "." + key; }

bool parse_plain(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* b = s.data();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

// Numbers may carry a factor of pi: "1.5", "pi", "pi/2", "2*pi", "-3*pi/4".
std::optional<double> parse_number(const std::string& text) {
  std::string s = trim(text);
  double v = 0.0;
  if (parse_plain(s, v)) return v;
  const auto at = s.find("pi");
  if (at == std::string::npos) return std::nullopt;
  std::string head = trim(s.substr(0, at)), tail = trim(s.substr(at + 2));
  double factor = 1.0, divisor = 1.0;
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty()) {
    if (head.back() != '*') return std::nullopt;
    if (!parse_plain(trim(head.substr(0, head.size() - 1)), factor)) return std::nullopt;
  }
  if (!tail.empty()) {
    if (tail.front() != '/') return std::nullopt;
    if (!parse_plain(trim(tail.substr(1)), divisor) || divisor == 0.0) return std::nullopt;
  }
  return factor * pi / divisor;
}

/// Typed access to the parsed file; every field read is recorded so that
/// leftovers can be reported as unknown.
class Fields {
 public:
  explicit Fields(const ScenarioText& t) : t_(t) {}

  bool has(const std::string& sec, const std::string& key) const { return t_.get(sec, key).has_value(); }

  std::optional<std::string> raw(const std::string& sec, const std::string& key) {
    used_.insert(field(sec, key));
    return t_.get(sec, key);
  }

  std::string text(const std::string& sec, const std::string& key, std::optional<std::string> fallback = {}) {
    auto v = raw(sec, key);
    if (v) return *v;
    if (fallback) return *fallback;
    throw ConfigError(field(sec, key) + ": required field is missing");
  }

  double number(const std::string& sec, const std::string& key, std::optional<double> fallback = {}) {
    auto v = raw(sec, key);
    if (!v) {
      if (fallback) return *fallback;
      throw ConfigError(field(sec, key) + ": required field is missing");
    }
    auto d = parse_number(*v);
    if (!d || !std::isfinite(*d)) throw ConfigError(field(sec, key) + ": expected a number, got '" + *v + "'");
    return *d;
  }

  double positive(const std::string& sec, const std::string& key, std::optional<double> fallback = {}) {
    const double d = number(sec, key, fallback);
    if (!(d > 0)) throw ConfigError(field(sec, key) + ": must be positive");
    return d;
  }

  int integer(const std::string& sec, const std::string& key, std::optional<int> fallback = {}) {
    const double d = number(sec, key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (d != std::round(d) || std::abs(d) > 1e9) throw ConfigError(field(sec, key) + ": expected an integer");
    return static_cast<int>(d);
  }

  int count(const std::string& sec, const std::string& key, int fallback) {
    const int n = integer(sec, key, fallback);
    if (n < 1) throw ConfigError(field(sec, key) + ": must be at least 1");
    return n;
  }

  bool boolean(const std::string& sec, const std::string& key, bool fallback) {
    auto v = raw(sec, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError(field(sec, key) + ": expected true or false, got '" + *v + "'");
  }

  VecX vector(const std::string& sec, const std::string& key, std::optional<int> size = {}) {
    const std::string v = text(sec, key);
    std::vector<double> xs;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto d = parse_number(item);
      if (!d) throw ConfigError(field(sec, key) + ": expected a comma separated list of numbers, got '" + v + "'");
      xs.push_back(*d);
    }
    if (size && static_cast<int>(xs.size()) != *size)
      throw ConfigError(field(sec, key) + ": expected " + std::to_string(*size) + " components, got " +
                        std::to_string(xs.size()));
    return Eigen::Map<VecX>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  }

  void check_unused() const {
    for (const auto& [sec, kvs] : t_.sections) {
      if (sec == "expect") continue;
      for (const auto& [k, _] : kvs)
        if (!used_.count(field(sec, k))) throw ConfigError(field(sec, k) + ": unknown field");
    }
  }

 private:
  const ScenarioText& t_;
  std::set<std::string> used_;
};

using Summary = std::vector<std::pair<std::string, std::string>>;

std::string b2s(bool b) { return b ? "true" : "false"; }

class Csv {
 public:
  explicit Csv(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) body_ += ',';
      body_ += format_double(values[i]);
    }
    body_ += '\n';
  }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::string& body() const { return body_; }

 private:
  std::vector<std::string> columns_;
  std::string body_;
};

struct Context {
  std::string name;
  RunKind kind;
  CatalogEntry entry;
  IntegratorConfig cfg;
  std::uint64_t seed = 1;
  int jobs = 1;
};

RunKind parse_kind(const std::string& s) {
  static const std::pair<const char*, RunKind> kinds[] = {
      {"geodesic", RunKind::Geodesic},       {"curvature", RunKind::Curvature},
      {"conjugate", RunKind::Conjugate},     {"expansion", RunKind::Expansion},
      {"singularity", RunKind::Singularity}, {"twin", RunKind::Twin},
      {"ads-long-curve", RunKind::AdsLongCurve}, {"scale-factor", RunKind::ScaleFactor}};
  for (const auto& [name, k] : kinds)
    if (s == name) return k;
  throw ConfigError("run.kind: unknown run kind '" + s + "'");
}

void require_metric(const Context& c, std::initializer_list<const char*> names, const std::string& what) {
  for (const char* n : names)
    if (c.entry.name == n) return;
  std::string list;
  for (const char* n : names) list += (list.empty() ? "" : " or ") + std::string(n);
  throw ConfigError(what + ": requires metric " + list + ", got '" + c.entry.name + "'");
}

void require_in_domain(const Context& c, const VecX& x, const std::string& what) {
  if (x.size() != c.entry.spacetime.dim())
    throw ConfigError(what + ": expected " + std::to_string(c.entry.spacetime.dim()) + " coordinates");
  if (auto hit = c.entry.spacetime.violation(x))
    throw ConfigError(what + ": point lies outside the chart domain (" + hit->name + ")");
}

void add_coordinate_ranges(Summary& s, const ChartedSpacetime& M, const std::vector<VecX>& xs) {
  for (int i = 0; i < M.dim(); ++i) {
    double lo = kInf, hi = -kInf;
    for (const VecX& x : xs) {
      lo = std::min(lo, x(i));
      hi = std::max(hi, x(i));
    }
    s.emplace_back("min_" + M.coord_names()[i], format_double(lo));
    s.emplace_back("max_" + M.coord_names()[i], format_double(hi));
  }
}

std::vector<std::string> coordinate_columns(const ChartedSpacetime& M, const std::string& prefix = "") {
  std::vector<std::string> cols;
  for (const auto& n : M.coord_names()) cols.push_back(prefix + n);
  return cols;
}

int param_int(const Parameters& p, const char* key, int fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : static_cast<int>(it->second);
}
double param_double(const Parameters& p, const char* key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

TimeDirection parse_direction(Fields& f, const std::string& sec, TimeDirection fallback) {
  const std::string d = f.text(sec, "direction", fallback == TimeDirection::Future ? "future" : "past");
  if (d == "future") return TimeDirection::Future;
  if (d == "past") return TimeDirection::Past;
  throw ConfigError(field(sec, "direction") + ": expected future or past, got '" + d + "'");
}

SliceSpec build_slice(Fields& f, const Context& c) {
  const ChartedSpacetime& M = c.entry.spacetime;
  const std::string kind = f.text("slice", "kind");
  const VecX x = f.vector("slice", "x", M.dim());
  require_in_domain(c, x, "slice.x");
  if (kind == "flrw") {
    require_metric(c, {"flrw"}, "slice.kind");
    return flrw_time_slice(M, *c.entry.scale_factor, x, parse_direction(f, "slice", TimeDirection::Future));
  }
  if (kind == "milne") {
    require_metric(c, {"milne"}, "slice.kind");
    return milne_slice(M, x, parse_direction(f, "slice", TimeDirection::Future));
  }
  if (kind == "schwarzschild-interior") {
    require_metric(c, {"schwarzschild-interior"}, "slice.kind");
    return schwarzschild_interior_slice(M, param_double(c.entry.parameters, "r_s", 1.0), x,
                                        parse_direction(f, "slice", TimeDirection::Future));
  }
  if (kind == "minkowski") {
    require_metric(c, {"minkowski"}, "slice.kind");
    const int n = M.spatial_dim();
    const VecX k = f.vector("slice", "k0");
    MatX K0;
    if (k.size() == n) {
      K0 = k.asDiagonal();
    } else if (k.size() == n * n) {
      K0 = k.reshaped(n, n);
      if (!K0.isApprox(K0.transpose(), 1e-14)) throw ConfigError("slice.k0: shape operator must be symmetric");
    } else {
      throw ConfigError("slice.k0: expected " + std::to_string(n) + " diagonal or " + std::to_string(n * n) +
                        " entries");
    }
    return minkowski_slice(M, x, K0);
  }
  if (kind == "coordinate-time") {
    auto T = make_scalar_field([](const auto& y) { return y(0); });
    return slice_from_time_function(M, *T, x, parse_direction(f, "slice", TimeDirection::Future));
  }
  throw ConfigError("slice.kind: unknown slice kind '" + kind + "'");
}

// ---- run kinds ----

Csv run_geodesic(Fields& f, Context& c, Summary& s) {
  const ChartedSpacetime& M = c.entry.spacetime;
  GeodesicState s0;
  std::optional<double> orbit_radius;
  if (f.has("initial", "circular_orbit")) {
    require_metric(c, {"schwarzschild-exterior"}, "initial.circular_orbit");
    orbit_radius = f.positive("initial", "circular_orbit");
    const int n = param_int(c.entry.parameters, "n", 3);
    const double rs = param_double(c.entry.parameters, "r_s", 1.0);
    s0 = circular_orbit_init(n, rs, *orbit_radius);
    const double omega = circular_orbit_angular_velocity(n, rs, *orbit_radius);
    const double orbits = f.positive("run", "orbits", 1.0);
    if (f.has("run", "lambda_max")) throw ConfigError("run.lambda_max: give either run.orbits or run.lambda_max");
    c.cfg.lambda_max = orbits * 2 * pi / omega / s0.v(0);
  } else {
    s0.x = f.vector("initial", "x", M.dim());
    s0.v = f.vector("initial", "v", M.dim());
    require_in_domain(c, s0.x, "initial.x");
    if (f.boolean("initial", "normalize", false)) {
      const double q = inner(eval_metric(M, s0.x), s0.v, s0.v);
      if (q == 0.0) throw ConfigError("initial.normalize: cannot normalise a null vector");
      s0.v /= std::sqrt(std::abs(q));
    }
    c.cfg.lambda_max = f.positive("run", "lambda_max");
  }
  const int rows = f.count("run", "samples", 200);

  const GeodesicResult r = integrate_geodesic(M, s0, c.cfg);
  std::vector<std::string> cols{"lambda", "tau"};
  for (const auto& n : M.coord_names()) cols.push_back(n);
  for (const auto& n : M.coord_names()) cols.push_back("d" + n);
  cols.push_back("norm");
  Csv csv(cols);
  std::vector<VecX> xs;
  for (const auto& st : r.samples) xs.push_back(st.x);
  for (int i = 0; i <= rows; ++i) {
    const double lambda = r.lambda_begin() + (r.lambda_end - r.lambda_begin()) * i / rows;
    const GeodesicState st = i == rows ? r.final_state() : r.at(lambda);
    std::vector<double> row{st.lambda, st.tau};
    for (Eigen::Index k = 0; k < st.x.size(); ++k) row.push_back(st.x(k));
    for (Eigen::Index k = 0; k < st.v.size(); ++k) row.push_back(st.v(k));
    row.push_back(inner(M.metric(st.x), st.v, st.v));
    csv.row(row);
    xs.push_back(st.x);
  }

  s.emplace_back("character", to_string(r.initial_character.kind));
  s.emplace_back("initial_norm", format_double(r.initial_norm));
  s.emplace_back("termination", to_string(r.termination));
  s.emplace_back("boundary", r.boundary ? r.boundary->name + ":" + to_string(r.boundary->side) + ":" +
                                              to_string(r.boundary->kind)
                                        : "none");
  s.emplace_back("incomplete", b2s(r.incomplete));
  s.emplace_back("degraded", b2s(r.degraded));
  s.emplace_back("conserved_drift", format_double(r.conserved_drift));
  s.emplace_back("lambda_end", format_double(r.lambda_end));
  s.emplace_back("tau_end", format_double(r.final_state().tau));
  s.emplace_back("blowup_parameter", r.blowup_parameter ? format_double(*r.blowup_parameter) : "none");
  s.emplace_back("steps", std::to_string(r.samples.size() - 1));
  if (orbit_radius) {
    double dev = 0.0;
    for (const VecX& x : xs) dev = std::max(dev, std::abs(x(1) - *orbit_radius));
    s.emplace_back("orbit_radius_deviation", format_double(dev));
  }
  add_coordinate_ranges(s, M, xs);
  if (r.degraded) throw ContractError("geodesic run degraded: conserved_drift " + format_double(r.conserved_drift));
  return csv;
}

Csv run_curvature(Fields& f, Context& c, Summary& s) {
  const ChartedSpacetime& M = c.entry.spacetime;
  const int samples = f.count("run", "samples", 100);
  std::mt19937_64 rng(c.seed);
  auto cols = coordinate_columns(M);
  cols.insert(cols.end(), {"ricci_max", "einstein_residual", "scalar"});
  Csv csv(cols);
  double ric = 0.0, res = 0.0, scal = 0.0;
  for (int i = 0; i < samples; ++i) {
    const VecX x = c.entry.sampler(rng);
    const RiemannTensor R = riemann(M, x);
    const MatX Ric = ricci_from_riemann(R);
    const double e = einstein_residual(M, x, c.entry.matter);
    const double S = scalar_curvature(M, x);
    std::vector<double> row(x.data(), x.data() + x.size());
    row.insert(row.end(), {Ric.cwiseAbs().maxCoeff(), e, S});
    csv.row(row);
    ric = std::max(ric, Ric.cwiseAbs().maxCoeff());
    res = std::max(res, e);
    scal = std::max(scal, std::abs(S));
  }
  s.emplace_back("samples", std::to_string(samples));
  s.emplace_back("matter", std::visit(
                               [](const auto& m) -> std::string {
                                 using T = std::decay_t<decltype(m)>;
                                 if constexpr (std::is_same_v<T, Vacuum>) return "vacuum";
                                 else if constexpr (std::is_same_v<T, CosmologicalConstant>)
                                   return "cosmological-constant " + format_double(m.lambda);
                                 else return "dust";
                               },
                               c.entry.matter));
  s.emplace_back("max_ricci", format_double(ric));
  s.emplace_back("max_einstein_residual", format_double(res));
  s.emplace_back("max_abs_scalar", format_double(scal));
  return csv;
}

VecX unit_timelike(const Context& c, const VecX& x, VecX v, const std::string& what) {
  const MatX g = eval_metric(c.entry.spacetime, x);
  const double q = inner(g, v, v);
  if (!(q < 0)) throw ConfigError(what + ": must be timelike");
  return v / std::sqrt(-q);
}

Csv run_conjugate(Fields& f, Context& c, Summary& s) {
  const ChartedSpacetime& M = c.entry.spacetime;
  const double t_max = f.positive("run", "t_max");
  const int resolution = f.count("run", "resolution", 2048);
  const std::string mode = f.text("run", "mode", "point");
  std::optional<JacobiBundle> bundle;
  if (mode == "point") {
    const VecX x = f.vector("initial", "x", M.dim());
    require_in_domain(c, x, "initial.x");
    const VecX v = unit_timelike(c, x, f.vector("initial", "v", M.dim()), "initial.v");
    bundle.emplace(propagate_from_point(M, x, v, t_max, c.cfg));
  } else if (mode == "slice") {
    bundle.emplace(propagate_from_slice(build_slice(f, c), t_max, c.cfg));
  } else {
    throw ConfigError("run.mode: expected point or slice, got '" + mode + "'");
  }
  const ConjugateReport rep = first_conjugate(*bundle, t_max, resolution);

  Csv csv({"t", "det"});
  for (const auto& [t, d] : rep.det_trace) csv.row({t, d});
  s.emplace_back("mode", mode);
  s.emplace_back("t_star", rep.t_star ? format_double(*rep.t_star) : "none");
  s.emplace_back("refinement", format_double(rep.refinement));
  s.emplace_back("grazing", b2s(rep.grazing));
  s.emplace_back("t_end", format_double(bundle->t_end()));
  s.emplace_back("termination", to_string(bundle->base().termination));
  if (rep.t_star) {
    const VecX q = bundle->position(*rep.t_star);
    for (int i = 0; i < M.dim(); ++i) s.emplace_back("conjugate_" + M.coord_names()[i], format_double(q(i)));
  }
  if (c.entry.name == "ads2" && mode == "point") {
    const GeodesicResult& g = bundle->base();
    const Ads2GeodesicOracle oracle(param_double(c.entry.parameters, "alpha", 1.0), g.samples.front().x,
                                    g.samples.front().v);
    double err = 0.0;
    for (const auto& st : g.samples) err = std::max(err, (oracle(st.lambda) - st.x).cwiseAbs().maxCoeff());
    s.emplace_back("oracle_max_error", format_double(err));
  }
  return csv;
}

Csv trace_csv(const CongruenceTrace& tr) {
  Csv csv({"t", "theta", "theta_log_det", "theta_dot", "trace_K2", "ric_xx", "raychaudhuri"});
  for (std::size_t i = 0; i < tr.t.size(); ++i)
    csv.row({tr.t[i], tr.theta[i], tr.theta_log_det[i], tr.theta_dot[i], tr.trace_K2[i], tr.ric_xx[i],
             tr.theta_dot[i] + tr.trace_K2[i] + tr.ric_xx[i]});
  return csv;
}

Csv run_expansion(Fields& f, Context& c, Summary& s) {
  const SliceSpec slice = build_slice(f, c);
  ExpansionOptions opt;
  opt.grid = f.count("run", "grid", 400);
  opt.integrator = c.cfg;
  const double t_max = f.positive("run", "t_max");
  const CongruenceTrace tr = evolve_expansion(slice, t_max, opt);
  s.emplace_back("theta0", format_double(slice.expansion()));
  s.emplace_back("t_star", tr.t_star ? format_double(*tr.t_star) : "none");
  s.emplace_back("conjugate", tr.conjugate ? format_double(*tr.conjugate) : "none");
  s.emplace_back("t_end", format_double(tr.t_end));
  s.emplace_back("truncated", b2s(tr.truncated));
  s.emplace_back("raychaudhuri_residual", format_double(raychaudhuri_residual(tr)));
  s.emplace_back("raychaudhuri_relative_residual", format_double(raychaudhuri_relative_residual(tr)));
  if (slice.expansion() < 0) {
    const RiccatiCheck rc = riccati_bound_check(tr, slice.expansion());
    s.emplace_back("bound", format_double(rc.bound));
    s.emplace_back("sec_along_trace", b2s(rc.applicable));
    s.emplace_back("riccati_holds", b2s(rc.holds));
    if (tr.t_star) s.emplace_back("bound_gap", format_double(rc.bound - *tr.t_star));
  }
  return trace_csv(tr);
}

Csv run_singularity(Fields& f, Context& c, Summary& s) {
  const SliceSpec slice = build_slice(f, c);
  ScenarioOptions opt;
  opt.t_max = f.positive("run", "t_max", 10.0);
  opt.sec_samples = f.count("run", "sec_samples", 200);
  opt.tol = f.positive("run", "tol", 1e-6);
  opt.seed = c.seed;
  opt.expansion.grid = f.count("run", "grid", 400);
  opt.expansion.integrator = c.cfg;
  const FocusingReport rep = singularity_scenario(c.entry, slice, opt);
  for (auto& kv : rep.key_values())
    if (kv.first != "metric") s.push_back(kv);
  return trace_csv(evolve_expansion(slice, opt.t_max, opt.expansion));
}

Csv run_twin(Fields& f, Context& c, Summary& s) {
  const ChartedSpacetime& M = c.entry.spacetime;
  const VecX p = f.vector("initial", "p", M.dim());
  const VecX q = f.vector("initial", "q", M.dim());
  require_in_domain(c, p, "initial.p");
  require_in_domain(c, q, "initial.q");
  VariationFamily fam;
  fam.amplitude = f.number("run", "amplitude", fam.amplitude);
  if (fam.amplitude < 0) throw ConfigError("run.amplitude: must not be negative");
  fam.modes = f.count("run", "modes", fam.modes);
  fam.adapt_amplitude = f.boolean("run", "adapt_amplitude", true);
  fam.seed = c.seed;
  const int trials = f.count("run", "trials", 100);
  const TwinResult r = twin_trial(M, p, q, fam, trials, c.jobs);
  Csv csv({"trial", "tau", "margin"});
  for (std::size_t i = 0; i < r.taus.size(); ++i)
    csv.row({static_cast<double>(i), r.taus[i], r.tau_geodesic - r.taus[i]});
  s.emplace_back("tau_geodesic", format_double(r.tau_geodesic));
  s.emplace_back("tau_max_perturbed", format_double(r.tau_max_perturbed));
  s.emplace_back("margin", format_double(r.margin));
  s.emplace_back("trials", std::to_string(r.trials));
  s.emplace_back("rejected", std::to_string(r.rejected));
  s.emplace_back("amplitude", format_double(r.amplitude));
  s.emplace_back("shooting_residual", format_double(r.shooting_residual));
  s.emplace_back("w", format_double(w_function(M, p, q)));
  return csv;
}

Csv run_ads_long_curve(Fields& f, Context& c, Summary& s) {
  require_metric(c, {"ads2"}, "run.kind");
  const double alpha = param_double(c.entry.parameters, "alpha", 1.0);
  const double eps = f.positive("run", "eps");
  const double x0 = f.positive("run", "x0");
  if (!(x0 < pi / 2)) throw ConfigError("run.x0: must lie in (0, pi/2)");
  const double slope = f.positive("run", "slope", 0.999);
  if (!(slope < 1)) throw ConfigError("run.slope: must be below 1 for a timelike curve");
  const double delta = f.positive("run", "delta", 1e-3);
  const LongCurve lc = ads_long_causal_curve(eps, x0, alpha, slope, delta);

  // The static observer x = 0 is the direct geodesic between the endpoints.
  IntegratorConfig cfg = c.cfg;
  cfg.lambda_max = pi + eps;
  const VecX x_start = VecX::Zero(2);
  VecX v_start(2);
  v_start << 1.0 / alpha, 0.0;
  const GeodesicResult direct = integrate_geodesic(c.entry.spacetime, {x_start, v_start, 0.0, 0.0}, cfg);
  const double tau_direct = direct.final_state().tau;

  Csv csv({"s", "t", "x"});
  for (std::size_t i = 0; i < lc.curve.grid().size(); ++i)
    csv.row({lc.curve.grid()[i], lc.curve.points()[i](0), lc.curve.points()[i](1)});
  s.emplace_back("tau", format_double(lc.tau));
  s.emplace_back("lower_bound", format_double(lc.lower_bound));
  s.emplace_back("tau_direct_geodesic", format_double(tau_direct));
  s.emplace_back("exceeds_bound", b2s(lc.tau > lc.lower_bound));
  s.emplace_back("exceeds_direct", b2s(lc.tau > tau_direct));
  s.emplace_back("t_first", format_double(lc.t_first));
  s.emplace_back("t_second", format_double(lc.t_second));
  return csv;
}

Csv run_scale_factor(Fields& f, Context& c, Summary& s) {
  require_metric(c, {"flrw"}, "run.kind");
  const ScaleFactorSolution& a = *c.entry.scale_factor;
  const CoordinateRange range = a.range();
  const double t_begin = f.number("run", "t_begin");
  const double t_end = f.number("run", "t_end");
  if (!(t_begin < t_end)) throw ConfigError("run.t_end: must exceed run.t_begin");
  if (!(t_begin > range.lo && t_end < range.hi))
    throw ConfigError("run.t_begin: interval leaves the solution range (" + format_double(range.lo) + ", " +
                      format_double(range.hi) + ")");
  const int samples = f.count("run", "samples", 200);
  const ChartedSpacetime& M = c.entry.spacetime;
  const int n = a.n();

  // Flat dust has a = (n^2 alpha (t - t_bang)^2 / 2)^(1/n).
  const bool closed = a.k() == 0 && a.t_bang().has_value();
  Csv csv({"t", "a", "a_dot", "a_ddot", "energy_residual", "density", "einstein_residual", "closed_form"});
  double energy = 0.0, einstein = 0.0, closed_err = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = t_begin + (t_end - t_begin) * i / samples;
    VecX x = VecX::Zero(M.dim());
    x(0) = t;
    if (a.k() == 1 || (a.k() == -1 && n >= 2)) {
      // Hyperspherical charts: put the point on the equator of the angles.
      for (int j = 1; j < M.dim(); ++j) x(j) = pi / 2;
      if (a.k() == -1) x(1) = 1.0;
      x(M.dim() - 1) = 0.5;
    }
    const double e = a.energy_residual(t);
    const double ein = einstein_residual(M, x, c.entry.matter);
    const double cf =
        closed ? std::pow(n * n * a.alpha() / 2.0 * (t - *a.t_bang()) * (t - *a.t_bang()), 1.0 / n) : 0.0;
    csv.row({t, a.value(t), a.first(t), a.second(t), e, a.density(t), ein, cf});
    energy = std::max(energy, std::abs(e));
    einstein = std::max(einstein, ein);
    if (closed) closed_err = std::max(closed_err, std::abs(a.value(t) - cf));
  }
  s.emplace_back("t_bang", a.t_bang() ? format_double(*a.t_bang()) : "none");
  s.emplace_back("t_crunch", a.t_crunch() ? format_double(*a.t_crunch()) : "none");
  s.emplace_back("max_energy_residual", format_double(energy));
  s.emplace_back("max_einstein_residual", format_double(einstein));
  s.emplace_back("max_closed_form_error", closed ? format_double(closed_err) : "none");
  double a_max = 0.0;
  for (int i = 0; i <= samples; ++i) a_max = std::max(a_max, a.value(t_begin + (t_end - t_begin) * i / samples));
  s.emplace_back("max_a", format_double(a_max));
  return csv;
}

// ---- expectations ----

std::vector<Expectation> parse_expectations(const ScenarioText& t) {
  std::vector<Expectation> out;
  auto it = t.sections.find("expect");
  if (it == t.sections.end()) return out;
  for (const auto& [key, raw] : it->second) {
    Expectation e;
    e.key = key;
    std::string v = trim(raw);
    for (const char* op : {"==", "<=", ">=", "<", ">"}) {
      if (v.rfind(op, 0) == 0) {
        e.op = op;
        v = trim(v.substr(std::string(op).size()));
        break;
      }
    }
    if (e.op.empty()) throw ConfigError("expect." + key + ": missing comparison operator");
    const auto pm = v.find("+-");
    if (pm != std::string::npos) {
      if (e.op != "==") throw ConfigError("expect." + key + ": a tolerance needs '=='");
      auto tol = parse_number(v.substr(pm + 2));
      if (!tol || *tol < 0) throw ConfigError("expect." + key + ": bad tolerance");
      e.tolerance = *tol;
      v = trim(v.substr(0, pm));
      if (!parse_number(v)) throw ConfigError("expect." + key + ": tolerance given for a non-numeric value");
    }
    if (e.op != "==" && !parse_number(v)) throw ConfigError("expect." + key + ": '" + e.op + "' needs a number");
    e.value = v;
    out.push_back(e);
  }
  return out;
}

std::optional<std::string> check(const Expectation& e, const Summary& s) {
  auto it = std::find_if(s.begin(), s.end(), [&](const auto& kv) { return kv.first == e.key; });
  if (it == s.end()) throw ConfigError("expect." + e.key + ": the run reports no such value");
  const std::string& got = it->second;
  const std::string desc = e.key + " = " + got + ", expected " + e.op + " " + e.value +
                           (e.tolerance ? " +- " + format_double(*e.tolerance) : "");
  const auto want = parse_number(e.value);
  if (e.op == "==" && !want) return got == e.value ? std::nullopt : std::optional(desc);
  const auto have = parse_number(got);
  if (!have) return desc;
  bool ok = false;
  if (e.op == "==") ok = std::abs(*have - *want) <= e.tolerance.value_or(0.0);
  else if (e.op == "<=") ok = *have <= *want;
  else if (e.op == ">=") ok = *have >= *want;
  else if (e.op == "<") ok = *have < *want;
  else if (e.op == ">") ok = *have > *want;
  return ok ? std::nullopt : std::optional(desc);
}

std::uint64_t environment_seed() {
  const char* env = std::getenv("LORENTZ_LAB_SEED");
  if (!env || !*env) return 1;
  std::uint64_t v = 0;
  const std::string s(env);
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ConfigError("LORENTZ_LAB_SEED: expected an unsigned integer, got '" + s + "'");
  return v;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

ScenarioText ScenarioText::parse(const std::string& text, const std::string& origin) {
  ScenarioText t;
  t.source = text;
  t.origin = origin;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto where = [&] { return origin + ":" + std::to_string(lineno) + ": "; };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ConfigError(where() + "empty section name");
      if (t.sections.count(section)) throw ConfigError(where() + "section [" + section + "] appears twice");
      t.sections[section];
      continue;
    }
    if (section.empty()) throw ConfigError(where() + "entry before the first [section]");
    std::string key, value;
    if (section == "expect") {
      const auto op = s.find_first_of("=<>");
      if (op == std::string::npos) throw ConfigError(where() + "expected 'key <op> value'");
      key = trim(s.substr(0, op));
      value = trim(s.substr(op));
      if (value.size() > 1 && value[0] == '=' && value[1] != '=') value = "==" + value.substr(1);
    } else {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(where() + "expected 'key = value'");
      key = trim(s.substr(0, eq));
      value = trim(s.substr(eq + 1));
    }
    if (key.empty()) throw ConfigError(where() + "missing key");
    auto& kvs = t.sections[section];
    if (section != "expect" &&
        std::any_of(kvs.begin(), kvs.end(), [&](const auto& kv) { return kv.first == key; }))
      throw ConfigError(where() + field(section, key) + " is given twice");
    kvs.emplace_back(key, value);
  }
  return t;
}

std::optional<std::string> ScenarioText::get(const std::string& section, const std::string& key) const {
  auto it = sections.find(section);
  if (it == sections.end()) return std::nullopt;
  for (const auto& [k, v] : it->second)
    if (k == key) return v;
  return std::nullopt;
}

const char* to_string(RunKind k) {
  switch (k) {
    case RunKind::Geodesic: return "geodesic";
    case RunKind::Curvature: return "curvature";
    case RunKind::Conjugate: return "conjugate";
    case RunKind::Expansion: return "expansion";
    case RunKind::Singularity: return "singularity";
    case RunKind::Twin: return "twin";
    case RunKind::AdsLongCurve: return "ads-long-curve";
    case RunKind::ScaleFactor: return "scale-factor";
  }
  return "?";
}

std::string ScenarioOutcome::report() const {
  std::string out;
  for (const auto& [k, v] : summary) out += k + " = " + v + "\n";
  for (const auto& f : failures) out += "failed: " + f + "\n";
  if (!error.empty()) out += "error: " + error + "\n";
  out += "exit = " + std::to_string(exit_code) + "\n";
  return out;
}

ScenarioOutcome run_scenario_text(const std::string& text, const std::string& origin, const RunOptions& opt) {
  ScenarioOutcome out;
  out.name = origin;
  std::optional<Context> ctx;
  Summary body;
  std::optional<Csv> csv;
  try {
    const ScenarioText t = ScenarioText::parse(text, origin);
    Fields f(t);
    const std::vector<Expectation> expect = parse_expectations(t);

    const std::string name = f.text("scenario", "name", origin);
    out.name = name;
    f.raw("scenario", "about");
    out.csv_name = f.text("output", "csv", name + ".csv");
    if (out.csv_name.find('/') != std::string::npos) throw ConfigError("output.csv: must be a plain file name");

    const RunKind kind = parse_kind(f.text("run", "kind"));
    const std::string metric = f.text("metric", "name");
    Parameters params;
    if (auto it = t.sections.find("metric"); it != t.sections.end())
      for (const auto& [k, _] : it->second)
        if (k != "name") params[k] = f.number("metric", k);
    CatalogEntry entry;
    try {
      entry = make_catalog_entry(metric, params);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("metric.name: ") + e.what());
    }

    IntegratorConfig cfg;
    cfg.rel_tol = f.positive("tolerances", "rel_tol", cfg.rel_tol) * opt.tol_scale;
    cfg.abs_tol = f.positive("tolerances", "abs_tol", cfg.abs_tol) * opt.tol_scale;
    cfg.max_step = f.number("tolerances", "max_step", cfg.max_step);
    cfg.min_step = f.positive("tolerances", "min_step", cfg.min_step);
    cfg.domain_margin = f.number("tolerances", "domain_margin", cfg.domain_margin);
    cfg.drift_bound = f.positive("tolerances", "drift_bound", cfg.drift_bound);
    cfg.blowup_threshold = f.positive("tolerances", "blowup_threshold", cfg.blowup_threshold);
    if (cfg.max_step < 0) throw ConfigError("tolerances.max_step: must not be negative");
    if (cfg.domain_margin < 0) throw ConfigError("tolerances.domain_margin: must not be negative");

    std::uint64_t seed = environment_seed();
    if (f.has("run", "seed")) {
      const double s = f.number("run", "seed");
      if (s < 0 || s != std::floor(s)) throw ConfigError("run.seed: expected an unsigned integer");
      seed = static_cast<std::uint64_t>(s);
    }
    if (opt.seed) seed = *opt.seed;

    ctx.emplace(Context{name, kind, std::move(entry), cfg, seed, std::max(1, opt.jobs)});
    out.summary.emplace_back("scenario", name);
    out.summary.emplace_back("metric", metric);
    out.summary.emplace_back("run", to_string(kind));
    out.summary.emplace_back("seed", std::to_string(seed));
    out.summary.emplace_back("hash", hex64(fnv1a(text)));

    try {
      switch (kind) {
        case RunKind::Geodesic: csv = run_geodesic(f, *ctx, body); break;
        case RunKind::Curvature: csv = run_curvature(f, *ctx, body); break;
        case RunKind::Conjugate: csv = run_conjugate(f, *ctx, body); break;
        case RunKind::Expansion: csv = run_expansion(f, *ctx, body); break;
        case RunKind::Singularity: csv = run_singularity(f, *ctx, body); break;
        case RunKind::Twin: csv = run_twin(f, *ctx, body); break;
        case RunKind::AdsLongCurve: csv = run_ads_long_curve(f, *ctx, body); break;
        case RunKind::ScaleFactor: csv = run_scale_factor(f, *ctx, body); break;
      }
    } catch (const UsageError& e) {
      throw ConfigError(e.what());
    } catch (const PhysicsError& e) {
      throw ConfigError(e.what());
    } catch (const UnsupportedError& e) {
      throw ConfigError(e.what());
    }
    f.check_unused();
    out.summary.insert(out.summary.end(), body.begin(), body.end());
    for (const Expectation& e : expect)
      if (auto msg = check(e, out.summary)) out.failures.push_back(*msg);
    out.exit_code = out.failures.empty() ? exit_code::ok : exit_code::bound_failed;
  } catch (const ConfigError& e) {
    out.exit_code = exit_code::config_error;
    out.error = e.what();
    csv.reset();
  } catch (const std::exception& e) {
    out.exit_code = exit_code::numerical_failure;
    out.error = e.what();
    out.summary.insert(out.summary.end(), body.begin(), body.end());
  }

  if (csv) {
    std::string h;
    h += std::string("# lorentz_lab ") + version() + "\n";
    h += "# scenario " + out.name + " fnv1a " + hex64(fnv1a(text)) + "\n";
    h += std::string("# run ") + to_string(ctx->kind) + " metric " + ctx->entry.name +
         " seed " + std::to_string(ctx->seed) + "\n";
    h += "# units: geometric, c = 1; coordinates and parameters in the units of the chart\n";
    std::string cols;
    for (const auto& c : csv->columns()) cols += (cols.empty() ? "" : ",") + c;
    h += "# columns: " + cols + "\n";
    out.csv = h + cols + "\n" + csv->body();
  }
  return out;
}

const std::vector<Recipe>& builtin_recipes() {
  static const std::vector<Recipe> recipes = [] {
    std::vector<Recipe> v;
    for (const auto& [stem, text] : detail::embedded_recipes()) {
      const ScenarioText t = ScenarioText::parse(text, stem);
      v.push_back({stem, t.get("scenario", "about").value_or(""), text});
    }
    return v;
  }();
  return recipes;
}

const Recipe* find_recipe(const std::string& name) {
  for (const Recipe& r : builtin_recipes())
    if (r.name == name) return &r;
  return nullptr;
}

}  // namespace lorentz
