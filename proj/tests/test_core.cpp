#include <doctest.h>

#include <cmath>
#include <random>

#include "lorentz/catalog.hpp"
#include "lorentz/dual.hpp"
#include "lorentz/linalg.hpp"
#include "lorentz/spacetime.hpp"

using namespace lorentz;

TEST_CASE("dual numbers carry exact first and second derivatives") {
  auto f = [](auto x) {
    using std::exp;
    using std::sin;
    return sin(x) * exp(x) / (1.0 + x * x);
  };
  const double x0 = 0.7;
  const Dual1 d = f(Dual1(x0, 1.0));
  // f' by hand
  const double s = std::sin(x0), c = std::cos(x0), e = std::exp(x0), q = 1 + x0 * x0;
  const double fp = ((c + s) * e * q - s * e * 2 * x0) / (q * q);
  CHECK(d.val == doctest::Approx(s * e / q).epsilon(1e-15));
  CHECK(d.eps == doctest::Approx(fp).epsilon(1e-14));

  // second derivative against a central difference of the exact first derivative
  const Dual2 dd = f(Dual2(Dual1(x0, 1.0), Dual1(1.0, 0.0)));
  const double h = 1e-5;
  const double fpp_fd = (f(Dual1(x0 + h, 1.0)).eps - f(Dual1(x0 - h, 1.0)).eps) / (2 * h);
  CHECK(dd.eps.eps == doctest::Approx(fpp_fd).epsilon(1e-8));
  CHECK(dd.val.eps == doctest::Approx(fp).epsilon(1e-14));
}

TEST_CASE("small LU agrees with Eigen on inverse and determinant") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int n : {1, 2, 4, 6}) {
    MatX a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = N(rng);
    a += n * MatX::Identity(n, n);
    CHECK(std::abs(determinant(a) - a.determinant()) < 1e-12 * std::abs(a.determinant()));
    CHECK((inverse(a) * a - MatX::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("causal classification in Minkowski space") {
  const ChartedSpacetime M = minkowski(3);
  const Event p(M, VecX::Zero(4));
  auto cls = [&](std::initializer_list<double> v) {
    VecX w(4);
    int i = 0;
    for (double c : v) w(i++) = c;
    return classify(Tangent(p, w));
  };
  CHECK(cls({1, 0.3, 0, 0}).kind == CausalCharacter::Kind::Timelike);
  CHECK(cls({1, 0.3, 0, 0}).orientation == CausalCharacter::Orientation::Future);
  CHECK(cls({-1, 0.3, 0, 0}).orientation == CausalCharacter::Orientation::Past);
  CHECK(cls({1, 1, 0, 0}).kind == CausalCharacter::Kind::Null);
  CHECK(cls({0.2, 1, 0, 0}).kind == CausalCharacter::Kind::Spacelike);
  CHECK(cls({0, 0, 0, 0}).kind == CausalCharacter::Kind::Null);  // <0,0> = 0

  VecX v(4);
  v << 2, 0, 0, 0;
  CHECK(norm_length(Tangent(p, v)) == doctest::Approx(2.0));
}

TEST_CASE("orthonormal frames realise the Minkowski form") {
  for (const std::string name : {"schwarzschild-exterior", "de-sitter", "flrw", "milne", "ads2", "clifton-pohl"}) {
    CAPTURE(name);
    const CatalogEntry e = make_catalog_entry(name);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 10; ++k) {
      const VecX x = e.sampler(rng);
      const MatX g = eval_metric(e.spacetime, x);
      CHECK(has_lorentzian_signature(g));
      const MatX E = orthonormal_frame(e.spacetime, x);
      MatX eta = MatX::Identity(g.rows(), g.rows());
      eta(0, 0) = -1;
      CHECK((E.transpose() * g * E - eta).cwiseAbs().maxCoeff() < 1e-10);
      const VecX T = e.spacetime.time_orientation(x);
      CHECK(inner(g, E.col(0), T) < 0);
    }
  }
}

TEST_CASE("domain violations name the coordinate") {
  const ChartedSpacetime M = schwarzschild(3, 1.0, SchwarzschildRegion::Exterior);
  VecX x(4);
  x << 0, 0.5, 1.0, 0;
  try {
    Event e(M, x);
    FAIL("expected DomainError");
  } catch (const DomainError& err) {
    CHECK(err.coordinate() == 1);
  }
  VecX y(4);
  y << 0, 3, 1.0, 0;
  CHECK_NOTHROW(Event(M, y));
  CHECK_THROWS_AS(Tangent(Event(M, y), VecX::Zero(3)), UsageError);
}

TEST_CASE("time orientation of the Schwarzschild interior points to r = 0") {
  const ChartedSpacetime M = schwarzschild(3, 1.0, SchwarzschildRegion::Interior);
  VecX x(4);
  x << 0, 0.5, 1.2, 0;
  VecX v(4);
  v << 0, -1, 0, 0;
  const CausalCharacter c = classify(Tangent(Event(M, x), v));
  CHECK(c.kind == CausalCharacter::Kind::Timelike);
  CHECK(c.orientation == CausalCharacter::Orientation::Future);
}
