#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lorentz/catalog.hpp"
#include "lorentz/jacobi.hpp"

using namespace lorentz;
using std::numbers::pi;

namespace {
VecX vec(std::initializer_list<double> xs) {
  VecX v(static_cast<Eigen::Index>(xs.size()));
  int i = 0;
  for (double c : xs) v(i++) = c;
  return v;
}

VecX unit(const ChartedSpacetime& M, const VecX& x, VecX v) {
  return v / std::sqrt(-inner(M.metric(x), v, v));
}
}  // namespace

TEST_CASE("Minkowski from a point: A(t) = t I, no conjugate point") {
  const ChartedSpacetime M = minkowski(3);
  const JacobiBundle b = propagate_from_point(M, VecX::Zero(4), unit(M, VecX::Zero(4), vec({1, 0.4, 0.1, 0})), 5);
  for (double t : {0.5, 2.0, 4.5}) {
    CHECK((b.A(t) - t * MatX::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((b.A_dot(t) - MatX::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_FALSE(first_conjugate(b, 5).t_star);
}

TEST_CASE("Minkowski slices: K0 = 0 never focuses, K0 = -I focuses at 1") {
  const ChartedSpacetime M = minkowski(3);
  const JacobiBundle flat = propagate_from_slice(minkowski_slice(M, VecX::Zero(4), MatX::Zero(3, 3)), 5);
  CHECK_FALSE(first_conjugate(flat, 5).t_star);
  CHECK(flat.det(3.0) == doctest::Approx(1.0).epsilon(1e-12));

  const JacobiBundle b = propagate_from_slice(minkowski_slice(M, VecX::Zero(4), -MatX::Identity(3, 3)), 2);
  const ConjugateReport rep = first_conjugate(b, 2);
  REQUIRE(rep.t_star);
  CHECK(std::abs(*rep.t_star - 1.0) < 1e-9);
  CHECK(rep.refinement <= 1e-10);
  CHECK((b.A(0.25) - 0.75 * MatX::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  // det A > 0 before t_star
  for (const auto& [t, d] : rep.det_trace)
    if (t < *rep.t_star) CHECK(d > 0);
}

TEST_CASE("AdS2 refocuses at t = pi in every timelike direction") {
  const CatalogEntry e = make_catalog_entry("ads2");
  const VecX p = VecX::Zero(2);
  for (double w : {0.0, 0.3, -0.6, 0.9, -0.95}) {
    CAPTURE(w);
    const VecX v = unit(e.spacetime, p, vec({1, w}));
    const JacobiBundle b = propagate_from_point(e.spacetime, p, v, 4);
    const ConjugateReport rep = first_conjugate(b, 4);
    REQUIRE(rep.t_star);
    CHECK(std::abs(*rep.t_star - pi) < 1e-4);
    // A(t) = sin t for curvature -1
    CHECK(b.A(1.0)(0, 0) == doctest::Approx(std::sin(1.0)).epsilon(1e-8));
    const Event q = exp_map(Event(e.spacetime, p), v, pi);
    CHECK(std::abs(q.x(0) - pi) < 1e-4);
    CHECK(std::abs(q.x(1)) < 1e-4);

    const Ads2GeodesicOracle oracle = ads2_geodesic_oracle(Tangent(Event(e.spacetime, p), v));
    double err = 0;
    for (const auto& s : b.base().samples) err = std::max(err, (oracle(s.lambda) - s.x).cwiseAbs().maxCoeff());
    CHECK(err < 1e-7);
  }
}

TEST_CASE("AdS2 oracle reproduces spacelike and null geodesics") {
  const CatalogEntry e = make_catalog_entry("ads2", {{"alpha", 1.3}});
  const VecX p = vec({0.2, -0.4});
  for (const VecX& v : {vec({0.3, 1.0}), vec({1.0, 1.0}), vec({1.0, -0.2})}) {
    IntegratorConfig cfg;
    cfg.lambda_max = 0.8;
    const GeodesicResult r = integrate_geodesic(e.spacetime, {p, v, 0, 0}, cfg);
    const Ads2GeodesicOracle oracle = ads2_geodesic_oracle(Tangent(Event(e.spacetime, p), v));
    double err = 0;
    for (const auto& s : r.samples) err = std::max(err, (oracle(s.lambda) - s.x).cwiseAbs().maxCoeff());
    CHECK(err < 1e-7);
  }
}

TEST_CASE("de Sitter from a point follows sinh, no conjugate point") {
  const CatalogEntry e = make_catalog_entry("de-sitter");
  const VecX x = vec({0.1, 1.0, 1.2, 0.3});
  const VecX v = unit(e.spacetime, x, vec({1, 0.3, -0.2, 0.1}));
  const JacobiBundle b = propagate_from_point(e.spacetime, x, v, 3);
  for (double t : {0.5, 1.5, 2.5}) CHECK(b.det(t) == doctest::Approx(std::pow(std::sinh(t), 3)).epsilon(1e-8));
  CHECK_FALSE(first_conjugate(b, 3).t_star);
}

TEST_CASE("Wronskian stays symmetric and expansion routes agree") {
  const CatalogEntry e = make_catalog_entry("schwarzschild-exterior");
  const VecX x = vec({0, 7, pi / 2, 0.2});
  const VecX v = unit(e.spacetime, x, vec({1, 0.1, 0.01, 0.02}));
  const JacobiBundle b = propagate_from_point(e.spacetime, x, v, 20);
  for (double t : {1.0, 5.0, 10.0, 19.0}) {
    CHECK(b.wronskian(t).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(b.expansion(t) == doctest::Approx(b.expansion_log_det(t)).epsilon(1e-8));
    // frame stays orthonormal and orthogonal to the velocity
    const MatX g = e.spacetime.metric(b.position(t));
    const MatX E = b.frame(t);
    CHECK((E.transpose() * g * E - MatX::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((E.transpose() * g * b.velocity(t)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("incompleteness and contract errors") {
  const CatalogEntry in = make_catalog_entry("schwarzschild-interior");
  const SliceSpec s = schwarzschild_interior_slice(in.spacetime, 1.0, vec({0, 0.9, pi / 2, 0}));
  try {
    exp_map(s, 2.0);
    FAIL("expected IncompletenessError");
  } catch (const IncompletenessError& err) {
    CHECK(err.result().incomplete);
    CHECK(err.result().lambda_end < 2.0);
  }

  const ChartedSpacetime M = minkowski(3);
  IntegratorConfig cfg;
  cfg.lambda_max = 1;
  const GeodesicResult null = integrate_geodesic(M, {VecX::Zero(4), vec({1, 1, 0, 0}), 0, 0}, cfg);
  CHECK_THROWS_AS(propagate_jacobi(M, null, JacobiMode::from_point()), ContractError);

  GeodesicResult degraded = integrate_geodesic(M, {VecX::Zero(4), vec({1, 0, 0, 0}), 0, 0}, cfg);
  degraded.degraded = true;
  CHECK_THROWS_AS(propagate_jacobi(M, degraded, JacobiMode::from_point()), ContractError);
  CHECK_THROWS_AS(exp_map(Event(M, VecX::Zero(4)), vec({2, 0, 0, 0}), 1.0), UsageError);
}
