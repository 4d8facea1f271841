#include <doctest.h>

#include <cmath>
#include <random>

#include "lorentz/catalog.hpp"
#include "lorentz/curvature.hpp"

using namespace lorentz;

namespace {

// Independent route: Christoffel symbols from fourth-order central differences of the metric.
Connection<double> christoffel_fd(const ChartedSpacetime& M, const VecX& x) {
  const int d = M.dim();
  std::vector<MatX> dg(d);
  for (int m = 0; m < d; ++m) {
    const double h = 1e-3 * std::max(0.01, std::min(1.0, std::abs(x(m))));
    auto g_at = [&](double s) {
      VecX y = x;
      y(m) += s;
      return MatX(M.metric(y));
    };
    dg[m] = (8 * (g_at(h) - g_at(-h)) - (g_at(2 * h) - g_at(-2 * h))) / (12 * h);
  }
  const MatX gi = M.metric(x).inverse();
  Connection<double> G(d);
  for (int l = 0; l < d; ++l)
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        double s = 0;
        for (int k = 0; k < d; ++k) s += gi(l, k) * (dg[a](k, b) + dg[b](k, a) - dg[k](a, b));
        G(l, a, b) = 0.5 * s;
      }
  return G;
}

// max |a - b| / max(1, max |a|)
double max_diff(const Connection<double>& a, const Connection<double>& b) {
  double m = 0, scale = 1;
  for (int l = 0; l < a.dim(); ++l) {
    m = std::max(m, (a.gamma[l] - b.gamma[l]).cwiseAbs().maxCoeff());
    scale = std::max(scale, a.gamma[l].cwiseAbs().maxCoeff());
  }
  return m / scale;
}

}  // namespace

TEST_CASE("dual Christoffel symbols match finite differences and closed forms") {
  for (const std::string name : {"schwarzschild-exterior", "schwarzschild-interior", "de-sitter", "anti-de-sitter",
                                 "flrw", "clifton-pohl", "milne", "ads2"}) {
    CAPTURE(name);
    const CatalogEntry e = make_catalog_entry(name);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 5; ++k) {
      const VecX x = e.sampler(rng);
      const Connection<double> G = christoffel_differentiated(e.spacetime, x);
      CHECK(max_diff(G, christoffel_fd(e.spacetime, x)) < 1e-7);
      if (e.spacetime.has_closed_form_christoffel())
        CHECK(max_diff(G, e.spacetime.closed_form_christoffel(x)) < 1e-12);
    }
  }
}

TEST_CASE("Riemann symmetries") {
  const CatalogEntry e = make_catalog_entry("flrw", {{"k", 1}});
  std::mt19937_64 rng(9);
  const VecX x = e.sampler(rng);
  const RiemannTensor R = riemann(e.spacetime, x);
  const MatX g = e.spacetime.metric(x);
  const int d = R.dim();
  double anti = 0, bianchi = 0, pair = 0;
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          anti = std::max(anti, std::abs(R(r, s, m, n) + R(r, s, n, m)));
          bianchi = std::max(bianchi, std::abs(R(r, s, m, n) + R(r, m, n, s) + R(r, n, s, m)));
          // lowered: R_{rsmn} = R_{mnrs}
          double a = 0, b = 0;
          for (int k = 0; k < d; ++k) {
            a += g(r, k) * R(k, s, m, n);
            b += g(m, k) * R(k, n, r, s);
          }
          pair = std::max(pair, std::abs(a - b));
        }
  CHECK(anti < 1e-12);
  CHECK(bianchi < 1e-10);
  CHECK(pair < 1e-10);
}

TEST_CASE("de Sitter has constant curvature 1/alpha^2") {
  const double alpha = 1.7;
  const CatalogEntry e = make_catalog_entry("de-sitter", {{"alpha", alpha}});
  std::mt19937_64 rng(2);
  for (int k = 0; k < 5; ++k) {
    const VecX x = e.sampler(rng);
    const RiemannTensor R = riemann(e.spacetime, x);
    const MatX g = e.spacetime.metric(x);
    const int d = R.dim();
    double err = 0;
    // R^r_{smn} = (delta^r_m g_sn - delta^r_n g_sm) / alpha^2
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s)
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n) {
            const double want = ((r == m) * g(s, n) - (r == n) * g(s, m)) / (alpha * alpha);
            err = std::max(err, std::abs(R(r, s, m, n) - want));
          }
    CHECK(err < 1e-10);
    CHECK(scalar_curvature(e.spacetime, x) == doctest::Approx(12 / (alpha * alpha)).epsilon(1e-10));
  }
}

TEST_CASE("vacuum, Lambda and dust residuals") {
  std::mt19937_64 rng(4);
  for (int n : {3, 4, 5}) {
    CAPTURE(n);
    for (const std::string region : {"schwarzschild-exterior", "schwarzschild-interior"}) {
      const CatalogEntry e = make_catalog_entry(region, {{"n", n}, {"r_s", 1.3}});
      for (int k = 0; k < 10; ++k) CHECK(ricci(e.spacetime, e.sampler(rng)).cwiseAbs().maxCoeff() < 1e-9);
    }
    for (const std::string name : {"de-sitter", "anti-de-sitter"}) {
      const CatalogEntry e = make_catalog_entry(name, {{"n", n}, {"alpha", 0.8}});
      const double lambda = std::get<CosmologicalConstant>(e.matter).lambda;
      CHECK(std::abs(lambda) == doctest::Approx(n * (n - 1) / (2 * 0.64)));
      for (int k = 0; k < 10; ++k) {
        const VecX x = e.sampler(rng);
        CHECK(einstein_residual(e.spacetime, x, e.matter) < 1e-9);
        CHECK(ricci_form_residual(e.spacetime, x, e.matter) < 1e-9);
      }
    }
  }
  for (int k : {-1, 0, 1}) {
    CAPTURE(k);
    const CatalogEntry e = make_catalog_entry("flrw", {{"k", k}, {"a0", 1.0}});
    for (int i = 0; i < 10; ++i) CHECK(einstein_residual(e.spacetime, e.sampler(rng), e.matter) < 1e-8);
  }
}

TEST_CASE("Milne and Minkowski are flat") {
  std::mt19937_64 rng(8);
  for (const std::string name : {"milne", "minkowski"}) {
    const CatalogEntry e = make_catalog_entry(name);
    for (int i = 0; i < 10; ++i) CHECK(riemann(e.spacetime, e.sampler(rng)).max_abs() < 1e-12);
  }
}

TEST_CASE("strong energy condition verdicts") {
  CHECK(sec_sample(make_catalog_entry("schwarzschild-exterior").spacetime,
                   make_catalog_entry("schwarzschild-exterior").sampler, 100, 1)
            .holds);
  const CatalogEntry ds = make_catalog_entry("de-sitter");
  const SecVerdict v = sec_sample(ds.spacetime, ds.sampler, 100, 1);
  CHECK_FALSE(v.holds);
  REQUIRE(v.witness);
  CHECK(v.witness->ric_vv < 0);
  const CatalogEntry ads = make_catalog_entry("anti-de-sitter");
  CHECK(sec_sample(ads.spacetime, ads.sampler, 100, 1).holds);
  const CatalogEntry dust = make_catalog_entry("flrw");
  CHECK(sec_sample(dust.spacetime, dust.sampler, 100, 1).holds);
}

TEST_CASE("degenerate metrics are rejected") {
  ChartSpec spec;
  spec.name = "degenerate";
  spec.dim = 2;
  spec.coord_names = {"t", "x"};
  spec.metric = make_metric_field([](const auto& x) {
    using S = typename std::decay_t<decltype(x)>::Scalar;
    Mat<S> g(2, 2);
    g << S(-1), S(0), S(0), x(1) * x(1);
    return g;
  });
  spec.domain = Domain(std::vector<CoordinateRange>(2));
  spec.time_orientation = [](const VecX&) { return VecX::Unit(2, 0); };
  const ChartedSpacetime M(spec);
  CHECK_THROWS_AS(riemann(M, VecX::Zero(2)), DegeneracyError);
}
