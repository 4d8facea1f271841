#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lorentz/catalog.hpp"
#include "lorentz/curve.hpp"

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

// composite Simpson, fine enough to be an independent reference for smooth integrands
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * f(a + i * h);
  return s * h / 3;
}
}  // namespace

TEST_CASE("proper time of a uniformly accelerated observer") {
  const ChartedSpacetime M = minkowski(1);
  const FunctionCurve hyperbola(
      0, 2, [](double s) { return vec({std::sinh(s), std::cosh(s)}); },
      [](double s) { return vec({std::cosh(s), std::sinh(s)}); });
  CHECK(curve_proper_time(M, hyperbola) == doctest::Approx(2.0).epsilon(1e-11));
}

TEST_CASE("proper time of a wiggling worldline against an external quadrature") {
  const ChartedSpacetime M = minkowski(1);
  const double a = 0.3, w = 2.0;
  const FunctionCurve c(
      0, 3, [&](double s) { return vec({s, a * std::sin(w * s)}); },
      [&](double s) { return vec({1, a * w * std::cos(w * s)}); });
  auto f = [&](double s) {
    const double u = a * w * std::cos(w * s);
    return std::sqrt(1 - u * u);
  };
#ifdef LORENTZ_HAVE_BOOST
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = ts.integrate(f, 0.0, 3.0);
#else
  const double oracle = simpson(f, 0.0, 3.0);
#endif
  CHECK(curve_proper_time(M, c) == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(simpson(f, 0.0, 3.0) == doctest::Approx(oracle).epsilon(1e-10));

  // a Hermite resampling converges to the same length
  std::vector<double> grid;
  for (int i = 0; i <= 600; ++i) grid.push_back(3.0 * i / 600);
  const SampledCurve sc = SampledCurve::sample(c, grid);
  CHECK(curve_proper_time(M, sc) == doctest::Approx(oracle).epsilon(1e-8));
  for (auto k : sc.causal_check(M)) CHECK(k == CausalCharacter::Kind::Timelike);
}

TEST_CASE("non-timelike curves are rejected") {
  const ChartedSpacetime M = minkowski(1);
  const FunctionCurve null(
      0, 1, [](double s) { return vec({s, s}); }, [](double) { return vec({1, 1}); });
  CHECK_THROWS_AS(curve_proper_time(M, null), ContractError);
  const FunctionCurve space(
      0, 1, [](double s) { return vec({0.5 * s, s}); }, [](double) { return vec({0.5, 1}); });
  CHECK_THROWS_AS(curve_proper_time(M, space), ContractError);
}

TEST_CASE("shooting between events") {
  const ChartedSpacetime M = minkowski(3);
  const ShootingResult flat = shoot_geodesic(M, VecX::Zero(4), vec({2, 0.3, -0.1, 0}));
  CHECK((flat.v - vec({2, 0.3, -0.1, 0})).cwiseAbs().maxCoeff() < 1e-10);

  const ChartedSpacetime S = schwarzschild(3, 1, SchwarzschildRegion::Exterior);
  const VecX p = vec({0, 6, pi / 2, 0}), q = vec({4, 6, pi / 2, 0});
  const ShootingResult r = shoot_geodesic(S, p, q);
  CHECK(r.residual < 1e-10);
  IntegratorConfig cfg;
  cfg.lambda_max = 1;
  const GeodesicResult g = integrate_geodesic(S, {p, r.v, 0, 0}, cfg);
  CHECK((g.final_state().x - q).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("W is negative for chronologically related events") {
  const ChartedSpacetime M = minkowski(3);
  const VecX p = VecX::Zero(4);
  CHECK(w_function(M, p, vec({2, 0.3, 0, 0})) == doctest::Approx(-4 + 0.09).epsilon(1e-10));
  CHECK(w_function(M, p, vec({0.2, 1, 0, 0})) > 0);

  const ChartedSpacetime S = schwarzschild(3, 1, SchwarzschildRegion::Exterior);
  const VecX a = vec({0, 6, pi / 2, 0});
  const double W = w_function(S, a, vec({4, 6, pi / 2, 0}));
  CHECK(W < 0);
  // -W is the squared proper time of the connecting geodesic
  const ShootingResult r = shoot_geodesic(S, a, vec({4, 6, pi / 2, 0}));
  CHECK(std::sqrt(-W) == doctest::Approx(r.geodesic.final_state().tau).epsilon(1e-9));
}

TEST_CASE("twin experiment in Minkowski space") {
  const ChartedSpacetime M = minkowski(3);
  const VecX p = VecX::Zero(4), q = vec({2, 0.3, 0, 0});
  VariationFamily fam;
  fam.seed = 7;
  const TwinResult a = twin_trial(M, p, q, fam, 100, 1);
  CHECK(a.tau_geodesic == doctest::Approx(std::sqrt(4 - 0.09)).epsilon(1e-12));
  CHECK(a.margin >= 0);
  CHECK(a.trials == 100);
  CHECK(a.taus.size() == 100);
  for (double t : a.taus) CHECK(t <= a.tau_geodesic + 1e-9);

  const TwinResult b = twin_trial(M, p, q, fam, 100, 2);
  CHECK(a.taus == b.taus);
  CHECK(a.rejected == b.rejected);

  fam.seed = 8;
  const TwinResult c = twin_trial(M, p, q, fam, 100, 1);
  CHECK(c.taus != a.taus);

  fam.amplitude = 0;
  const TwinResult z = twin_trial(M, p, q, fam, 5, 1);
  CHECK(std::abs(z.margin) < 1e-9);
}

TEST_CASE("twin experiment near a Schwarzschild orbit") {
  const ChartedSpacetime S = schwarzschild(3, 1, SchwarzschildRegion::Exterior);
  VariationFamily fam;
  const TwinResult r = twin_trial(S, vec({0, 6, pi / 2, 0}), vec({4, 6, pi / 2, 0}), fam, 40, 2);
  CHECK(r.margin >= 0);
  CHECK(r.shooting_residual < 1e-9);
  fam.amplitude = 0;
  const TwinResult z = twin_trial(S, vec({0, 6, pi / 2, 0}), vec({4, 6, pi / 2, 0}), fam, 3, 1);
  CHECK(std::abs(z.margin) < 1e-9);
  CHECK_THROWS_AS(twin_trial(S, vec({0, 6, pi / 2, 0}), vec({4, 6, pi / 2, 0}), fam, -1), UsageError);
}

TEST_CASE("AdS2 admits long causal curves beyond the conjugate point") {
  const double eps = 0.2;
  const ChartedSpacetime M = anti_de_sitter(1, 1.0);
  double previous = 0;
  for (double x0 : {1.0, 1.3, 1.5}) {
    CAPTURE(x0);
    const LongCurve lc = ads_long_causal_curve(eps, x0);
    CHECK(lc.lower_bound == doctest::Approx(eps / std::cos(x0)));
    CHECK(lc.tau > lc.lower_bound);
    CHECK(lc.tau > previous);
    previous = lc.tau;
    CHECK(lc.curve.position(lc.curve.s_begin()).norm() < 1e-12);
    const VecX end = lc.curve.position(lc.curve.s_end());
    CHECK(end(0) == doctest::Approx(pi + eps).epsilon(1e-12));
    CHECK(std::abs(end(1)) < 1e-12);
    for (auto k : lc.curve.causal_check(M)) CHECK(k == CausalCharacter::Kind::Timelike);
    CHECK(curve_proper_time(M, lc.curve) == doctest::Approx(lc.tau).epsilon(1e-9));
  }
  CHECK_THROWS_AS(ads_long_causal_curve(0.2, 1.6), UsageError);
  CHECK_THROWS_AS(ads_long_causal_curve(-0.1, 1.0), UsageError);
}
