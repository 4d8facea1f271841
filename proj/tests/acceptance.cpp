// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lorentz/catalog.hpp"
#include "lorentz/curvature.hpp"
#include "lorentz/curve.hpp"
#include "lorentz/focusing.hpp"
#include "lorentz/jacobi.hpp"
#include "lorentz/scenario.hpp"

#ifdef LORENTZ_HAVE_BOOST
#include <boost/math/quadrature/tanh_sinh.hpp>
#endif

using namespace lorentz;
using std::numbers::pi;

namespace {

VecX vec(std::initializer_list<double> xs) {
  VecX v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double c : xs) v(i++) = c;
  return v;
}

VecX unit(const ChartedSpacetime& M, const VecX& x, VecX v) { return v / std::sqrt(-inner(M.metric(x), v, v)); }

struct Verdict {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<void(Verdict&)> body;
};

// ---- 1
void check_vacuum(Verdict& v) {
  double worst = 0;
  for (const char* name : {"schwarzschild-exterior", "schwarzschild-interior"}) {
    const CatalogEntry e = make_catalog_entry(name, {{"n", 3}, {"r_s", 1}});
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 100; ++i) worst = std::max(worst, ricci(e.spacetime, e.sampler(rng)).cwiseAbs().maxCoeff());
  }
  v.detail << "max|Ric| = " << worst << " over 200 events";
  v.require(worst < 1e-6, "max|Ric| < 1e-6");
}

// ---- 2
void check_cosmological(Verdict& v) {
  const int n = 3;
  const double alpha = 1;
  double worst = 0;
  for (auto [name, sign] : {std::pair{"de-sitter", 1.0}, std::pair{"anti-de-sitter", -1.0}}) {
    const CatalogEntry e = make_catalog_entry(name, {{"n", n}, {"alpha", alpha}});
    const CosmologicalConstant lam{sign * n * (n - 1) / (2 * alpha * alpha)};
    std::mt19937_64 rng(7);
    for (int i = 0; i < 100; ++i) worst = std::max(worst, einstein_residual(e.spacetime, e.sampler(rng), lam));
  }
  v.detail << "max Einstein residual = " << worst;
  v.require(worst < 1e-6, "residual < 1e-6");
}

// ---- 3
void check_flrw_dust(Verdict& v) {
  const CatalogEntry e = make_catalog_entry("flrw", {{"n", 3}, {"k", 0}, {"alpha", 1}});
  const ScaleFactorSolution& a = *e.scale_factor;
  double einstein = 0, energy = 0, closed = 0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-2, 2);
  for (int i = 1; i <= 200; ++i) {
    const double t = 0.05 * i;  // (0, 10]
    energy = std::max(energy, std::abs(a.energy_residual(t)));
    closed = std::max(closed, std::abs(a.value(t) - std::cbrt(4.5 * t * t)));
    if (i % 2 == 0) einstein = std::max(einstein, einstein_residual(e.spacetime, vec({t, U(rng), U(rng), U(rng)}), e.matter));
  }
  v.detail << "Einstein " << einstein << ", energy " << energy << ", closed form " << closed;
  v.require(einstein < 1e-5, "Einstein residual < 1e-5");
  v.require(energy < 1e-8, "energy residual < 1e-8");
  v.require(closed < 1e-6, "closed form < 1e-6");
}

// ---- 4
void check_circular(Verdict& v) {
  const ChartedSpacetime M = schwarzschild(3, 1, SchwarzschildRegion::Exterior);
  const GeodesicState s = circular_orbit_init(3, 1, 6);
  IntegratorConfig cfg;
  cfg.lambda_max = 2 * pi / s.v(3);
  const GeodesicResult r = integrate_geodesic(M, s, cfg);
  double dev = 0;
  for (const auto& st : r.samples) dev = std::max(dev, std::abs(st.x(1) - 6));
  for (int i = 0; i <= 1000; ++i) dev = std::max(dev, std::abs(r.at(cfg.lambda_max * i / 1000).x(1) - 6));
  v.detail << "max|r-6| = " << dev << ", phi_end = " << r.final_state().x(3);
  v.require(dev < 1e-6, "max|r-6| < 1e-6");
  v.require(std::abs(r.final_state().x(3) - 2 * pi) < 1e-8, "one full orbit");
}

// ---- 5
void check_drift(Verdict& v) {
  int count = 0;
  double worst = 0;
  for (const Recipe& rec : builtin_recipes()) {
    const ScenarioText t = ScenarioText::parse(rec.text, rec.name);
    if (t.get("run", "kind") != "geodesic") continue;
    ++count;
    const ScenarioOutcome o = run_scenario_text(rec.text, rec.name, {});
    double d = INFINITY;
    for (const auto& [k, val] : o.summary)
      if (k == "conserved_drift") d = std::stod(val);
    worst = std::max(worst, d);
    v.detail << rec.name << "=" << d << " ";
    v.require(o.exit_code == 0 && d < 1e-8, rec.name);
  }
  v.detail << "(" << count << " recipes, worst " << worst << ")";
  v.require(count >= 3, "at least three geodesic recipes");
}

// ---- 6
void check_clifton_pohl_blowup(Verdict& v) {
  IntegratorConfig cfg;
  cfg.lambda_max = 3;
  const GeodesicResult r = integrate_geodesic(clifton_pohl(), {vec({0, 1}), vec({0, 1}), 0, 0}, cfg);
  const double lam = r.blowup_parameter.value_or(INFINITY);
  v.detail << "termination " << to_string(r.termination) << ", blow-up at " << lam;
  v.require(r.incomplete, "incomplete");
  v.require(r.initial_character.kind == CausalCharacter::Kind::Null, "null");
  v.require(std::abs(lam - 1) < 1e-6, "|lambda - 1| < 1e-6");
}

// ---- 7
void check_ads2_refocus(Verdict& v) {
  const CatalogEntry e = make_catalog_entry("ads2");
  const VecX p = VecX::Zero(2);
  double worst_t = 0, worst_oracle = 0;
  for (double w : {0.0, 0.4, -0.4, 0.8, -0.9}) {
    const VecX dir = unit(e.spacetime, p, vec({1, w}));
    const JacobiBundle b = propagate_from_point(e.spacetime, p, dir, 4);
    const ConjugateReport rep = first_conjugate(b, 4);
    worst_t = std::max(worst_t, rep.t_star ? std::abs(*rep.t_star - pi) : INFINITY);
    const Ads2GeodesicOracle oracle = ads2_geodesic_oracle(Tangent(Event(e.spacetime, p), dir));
    for (const auto& s : b.base().samples)
      worst_oracle = std::max(worst_oracle, (oracle(s.lambda) - s.x).cwiseAbs().maxCoeff());
  }
  v.detail << "max|t*-pi| = " << worst_t << ", oracle error " << worst_oracle << " (5 directions)";
  v.require(worst_t < 1e-4, "t* = pi within 1e-4");
  v.require(worst_oracle < 1e-7, "oracle < 1e-7");
}

// ---- 8
void check_focusing(Verdict& v) {
  ScenarioOptions opt;
  opt.t_max = 3;
  auto run = [&](const char* label, const CatalogEntry& e, const SliceSpec& s) {
    const FocusingReport r = singularity_scenario(e, s, opt);
    v.detail << label << ": t*=" << r.t_star << " bound=" << r.bound << " res=" << r.raychaudhuri_residual << "; ";
    v.require(r.t_star <= r.bound + 1e-6, std::string(label) + " bound");
    v.require(r.raychaudhuri_residual < 1e-6, std::string(label) + " Raychaudhuri");
  };
  const CatalogEntry contracting = make_catalog_entry("flrw", {{"sign", -1}});
  run("FLRW contracting", contracting,
      flrw_time_slice(contracting.spacetime, *contracting.scale_factor, vec({1, 0, 0, 0}), TimeDirection::Future));
  const CatalogEntry interior = make_catalog_entry("schwarzschild-interior");
  run("interior r0=0.1", interior, schwarzschild_interior_slice(interior.spacetime, 1.0, vec({0, 0.1, pi / 2, 0})));

  const ChartedSpacetime M = minkowski(3);
  const double theta0 = -3;
  const CongruenceTrace tr = evolve_expansion(minkowski_slice(M, VecX::Zero(4), theta0 / 3 * MatX::Identity(3, 3)), 2);
  const double bound = 3 / std::abs(theta0);
  const double ts = tr.t_star.value_or(INFINITY);
  const double res = raychaudhuri_residual(tr);
  v.detail << "marginal: t*=" << ts << " bound=" << bound << " res=" << res;
  v.require(std::abs(ts - bound) < 1e-9, "marginal equality");
  v.require(res < 1e-6, "marginal Raychaudhuri");
}

// ---- 9
void check_singularities(Verdict& v) {
  ScenarioOptions opt;
  opt.t_max = 3;

  const CatalogEntry f = make_catalog_entry("flrw");
  const FocusingReport big =
      singularity_scenario(f, flrw_time_slice(f.spacetime, *f.scale_factor, vec({1, 0, 0, 0}), TimeDirection::Past), opt);
  v.detail << "FLRW tau=" << big.proper_time << " bound=" << big.bound << " SEC=" << big.sec.holds << "; ";
  v.require(big.incomplete && std::abs(big.proper_time - 1) < 1e-6 && big.proper_time <= big.bound, "FLRW Big Bang");
  v.require(big.sec.holds, "FLRW SEC");

  // interior fall from just inside the horizon
  const CatalogEntry in = make_catalog_entry("schwarzschild-interior");
  const FocusingReport col =
      singularity_scenario(in, schwarzschild_interior_slice(in.spacetime, 1.0, vec({0, 0.1, pi / 2, 0})), opt);
  v.require(col.sec.holds && col.incomplete, "interior SEC and incompleteness");

  const double r0 = 1 - 1e-11;
  const VecX x = vec({0, r0, pi / 2, 0});
  IntegratorConfig cfg;
  cfg.lambda_max = 3;
  cfg.rel_tol = 1e-12;
  cfg.domain_margin = 1e-13;
  cfg.drift_bound = 1e-4;  // <v,v> cannot be represented better than ulp(r)/(1-r) this close to r_s
  const GeodesicResult fall = integrate_geodesic(in.spacetime, {x, unit(in.spacetime, x, vec({0, -1, 0, 0})), 0, 0}, cfg);
#ifdef LORENTZ_HAVE_BOOST
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = ts.integrate([](double u) { return std::sqrt(u / (1 - u)); }, 0.0, r0);
#else
  const double oracle = std::asin(std::sqrt(r0)) - std::sqrt(r0 * (1 - r0));
#endif
  const double tau = fall.final_state().tau;
  v.detail << "interior tau=" << tau << " (pi/2 - tau = " << pi / 2 - tau << ", oracle diff " << std::abs(tau - oracle)
           << ", drift " << fall.conserved_drift << "); ";
  v.require(fall.incomplete && fall.boundary && fall.boundary->kind == BoundaryKind::CurvatureSingularity,
            "interior ends at r = 0");
  v.require(std::abs(tau - pi / 2) < 1e-5, "interior tau = pi/2");
  v.require(std::abs(tau - oracle) < 1e-5, "interior quadrature oracle");

  const CatalogEntry m = make_catalog_entry("milne");
  const FocusingReport mil = singularity_scenario(m, milne_slice(m.spacetime, vec({1, 0, 0, 0}), TimeDirection::Past), opt);
  v.detail << "Milne tau=" << mil.proper_time << " max|Riem|=" << mil.max_curvature << " SEC=" << mil.sec.holds << "; ";
  v.require(mil.incomplete && mil.max_curvature == 0.0 && std::abs(mil.proper_time - 1) < 1e-8, "Milne");
  v.require(mil.sec.holds, "Milne SEC");

  // de Sitter is the one that fails the energy condition
  const CatalogEntry ds = make_catalog_entry("de-sitter");
  const SecVerdict dsv = sec_sample(ds.spacetime, ds.sampler, 200, 1);
  v.detail << "de Sitter SEC=" << dsv.holds;
  v.require(!dsv.holds, "de Sitter SEC fails");
}

// ---- 10
void check_twins(Verdict& v) {
  VariationFamily fam;
  auto suite = [&](const char* label, const ChartedSpacetime& M, const VecX& p, const VecX& q, int N) {
    const TwinResult r = twin_trial(M, p, q, fam, N, 1);
    double worst = INFINITY;
    for (double t : r.taus) worst = std::min(worst, r.tau_geodesic - t);
    VariationFamily zero = fam;
    zero.amplitude = 0;
    const TwinResult z = twin_trial(M, p, q, zero, 3, 1);
    v.detail << label << ": " << r.trials << " trials, min margin " << worst << ", zero-amplitude " << z.margin << "; ";
    v.require(r.trials == N && worst >= 0, std::string(label) + " margin");
    v.require(std::abs(z.margin) < 1e-9, std::string(label) + " zero amplitude");
  };
  suite("Minkowski", minkowski(3), VecX::Zero(4), vec({2, 0.3, 0, 0}), 1000);
  suite("Schwarzschild", schwarzschild(3, 1, SchwarzschildRegion::Exterior), vec({0, 6, pi / 2, 0}),
        vec({4, 6, pi / 2, 0}), 500);
}

// ---- 11
void check_long_curves(Verdict& v) {
  const double eps = 0.2;
  const ChartedSpacetime M = ads2();
  for (double x0 : {1.0, 1.3, 1.5}) {
    const LongCurve lc = ads_long_causal_curve(eps, x0);
    const double tau = curve_proper_time(M, lc.curve);
    v.detail << "x0=" << x0 << " tau=" << tau << " > " << eps / std::cos(x0) << "; ";
    v.require(tau > eps / std::cos(x0), "tau > eps/cos x0");
    if (x0 == 1.5) {
      IntegratorConfig cfg;
      cfg.lambda_max = pi + eps;
      const GeodesicResult g = integrate_geodesic(M, {VecX::Zero(2), vec({1, 0}), 0, 0}, cfg);
      v.detail << "direct geodesic tau=" << g.final_state().tau;
      v.require(tau > g.final_state().tau, "exceeds the direct geodesic");
    }
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "Schwarzschild vacuum", 5, check_vacuum},
      {2, "de Sitter / AdS cosmological constant", 5, check_cosmological},
      {3, "flat FLRW dust", 10, check_flrw_dust},
      {4, "circular orbit r = 6", 5, check_circular},
      {5, "causal character drift on geodesic recipes", 60, check_drift},
      {6, "Clifton-Pohl blow-up", 5, check_clifton_pohl_blowup},
      {7, "AdS2 refocusing", 10, check_ads2_refocus},
      {8, "focusing bound", 30, check_focusing},
      {9, "singularity scenarios", 60, check_singularities},
      {10, "twin paradox suite", 60, check_twins},
      {11, "AdS2 long causal curves", 10, check_long_curves},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " exception: " << e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.budget_s) {
      v.pass = false;
      v.detail << " over budget";
    }
    if (!v.pass) ++failed;
    std::printf("[%s] %2d %-45s %7.3f s / %3.0f s  %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, dt, c.budget_s,
                v.detail.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
