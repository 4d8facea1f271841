#include "lorentz/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lorentz {

namespace {

using std::numbers::pi;

template <class X>
using scalar_t = typename std::decay_t<X>::Scalar;

/// Writes radius2 * h_{S^m} on the diagonal block starting at `off`.
template <class S>
void fill_sphere(Mat<S>& g, const Vec<S>& x, int off, int m, const S& radius2) {
  using std::sin;
  S w = radius2;
  for (int i = 0; i < m; ++i) {
    g(off + i, off + i) = w;
    if (i + 1 < m) {
      const S s = sin(x(off + i));
      w = w * s * s;
    }
  }
}

/// Coordinate names and ranges for S^m: theta_1..theta_{m-1} in (0, pi), phi free.
void append_sphere(std::vector<std::string>& names, std::vector<CoordinateRange>& ranges, int m) {
  for (int i = 0; i + 1 < m; ++i) {
    names.push_back(m == 2 ? "theta" : "theta" + std::to_string(i + 1));
    ranges.push_back({0.0, pi, BoundaryKind::ChartEdge, BoundaryKind::ChartEdge});
  }
  if (m >= 1) {
    names.push_back("phi");
    ranges.push_back({});
  }
}

/// Angular metric factors h_a = prod_{j<a} sin^2 theta_j for S^m.
std::vector<double> sphere_factors(const VecX& x, int off, int m) {
  std::vector<double> h(m, 1.0);
  for (int i = 1; i < m; ++i) {
    const double s = std::sin(x(off + i - 1));
    h[i] = h[i - 1] * s * s;
  }
  return h;
}

/// Christoffels internal to the unit-sphere block: Gamma^a_bb and Gamma^b_ab.
void add_sphere_christoffel(Connection<double>& G, const VecX& x, int off, int m) {
  const auto h = sphere_factors(x, off, m);
  for (int i = 0; i + 1 < m; ++i) {
    const double cot = std::cos(x(off + i)) / std::sin(x(off + i));
    for (int j = i + 1; j < m; ++j) {
      const int a = off + i, b = off + j;
      G(a, b, b) = -cot * h[j] / h[i];
      G(b, a, b) = G(b, b, a) = cot;
    }
  }
}

VecX unit(int d, int i, double s = 1.0) { return s * VecX::Unit(d, i); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

ChartedSpacetime minkowski(int n) {
  require(n >= 1, "minkowski: n must be at least 1");
  const int d = n + 1;
  ChartSpec spec;
  spec.name = "minkowski";
  spec.dim = d;
  spec.coord_names.push_back("t");
  for (int i = 1; i <= n; ++i) spec.coord_names.push_back("x" + std::to_string(i));
  spec.metric = make_metric_field([d](const auto& x) {
    using S = scalar_t<decltype(x)>;
    Mat<S> g = Mat<S>::Constant(d, d, S(0));
    g(0, 0) = S(-1);
    for (int i = 1; i < d; ++i) g(i, i) = S(1);
    return g;
  });
  spec.domain = Domain(std::vector<CoordinateRange>(d));
  spec.christoffel_closed_form = [d](const VecX&) { return Connection<double>(d); };
  spec.time_orientation = [d](const VecX&) { return unit(d, 0); };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime schwarzschild(int n, double r_s, SchwarzschildRegion region) {
  require(n >= 3, "schwarzschild: n must be at least 3 (the metric degenerates for n = 2)");
  require(r_s > 0, "schwarzschild: r_s must be positive");
  const int d = n + 1, m = n - 1, p = n - 2;
  const bool interior = region == SchwarzschildRegion::Interior;
  ChartSpec spec;
  spec.name = interior ? "schwarzschild-interior" : "schwarzschild-exterior";
  spec.dim = d;
  spec.coord_names = {"t", "r"};
  std::vector<CoordinateRange> ranges{{}, {}};
  if (interior)
    ranges[1] = {0.0, r_s, BoundaryKind::CurvatureSingularity, BoundaryKind::ChartEdge};
  else
    ranges[1] = {r_s, kInf, BoundaryKind::ChartEdge, BoundaryKind::None};
  append_sphere(spec.coord_names, ranges, m);
  spec.domain = Domain(std::move(ranges));

  // f = 1 - (r_s/r)^p = (r - r_s) * sum_j r^j r_s^(p-1-j) / r^p, exact near the horizon.
  spec.metric = make_metric_field([d, m, p, r_s](const auto& x) {
    using S = scalar_t<decltype(x)>;
    const S r = x(1);
    S sum(0);
    for (int j = 0; j < p; ++j) sum = sum + ipow(r, j) * std::pow(r_s, p - 1 - j);
    const S f = (r - S(r_s)) * sum / ipow(r, p);
    Mat<S> g = Mat<S>::Constant(d, d, S(0));
    g(0, 0) = -f;
    g(1, 1) = S(1) / f;
    fill_sphere<S>(g, x, 2, m, r * r);
    return g;
  });
  spec.christoffel_closed_form = [d, m, p, r_s](const VecX& x) {
    const double r = x(1);
    double sum = 0.0;
    for (int j = 0; j < p; ++j) sum += std::pow(r, j) * std::pow(r_s, p - 1 - j);
    const double f = (r - r_s) * sum / std::pow(r, p);
    const double fp = p * std::pow(r_s, p) / std::pow(r, p + 1);
    Connection<double> G(d);
    G(0, 0, 1) = G(0, 1, 0) = fp / (2 * f);
    G(1, 0, 0) = f * fp / 2;
    G(1, 1, 1) = -fp / (2 * f);
    const auto h = sphere_factors(x, 2, m);
    for (int i = 0; i < m; ++i) {
      const int a = 2 + i;
      G(1, a, a) = -f * r * h[i];
      G(a, 1, a) = G(a, a, 1) = 1.0 / r;
    }
    add_sphere_christoffel(G, x, 2, m);
    return G;
  };
  if (interior)
    spec.time_orientation = [d](const VecX&) { return unit(d, 1, -1.0); };
  else
    spec.time_orientation = [d](const VecX&) { return unit(d, 0); };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime de_sitter(int n, double alpha) {
  require(n >= 1, "de_sitter: n must be at least 1");
  require(alpha > 0, "de_sitter: alpha must be positive");
  const int d = n + 1;
  ChartSpec spec;
  spec.name = "de-sitter";
  spec.dim = d;
  spec.coord_names = {"t"};
  std::vector<CoordinateRange> ranges{{}};
  // S^n: chi_1..chi_{n-1}, phi.
  for (int i = 0; i + 1 < n; ++i) {
    spec.coord_names.push_back("chi" + std::to_string(i + 1));
    ranges.push_back({0.0, pi, BoundaryKind::ChartEdge, BoundaryKind::ChartEdge});
  }
  spec.coord_names.push_back("phi");
  ranges.push_back({});
  spec.domain = Domain(std::move(ranges));
  const double a2 = alpha * alpha;
  spec.metric = make_metric_field([d, n, a2](const auto& x) {
    using S = scalar_t<decltype(x)>;
    using std::cosh;
    Mat<S> g = Mat<S>::Constant(d, d, S(0));
    g(0, 0) = S(-a2);
    const S c = cosh(x(0));
    fill_sphere<S>(g, x, 1, n, S(a2) * c * c);
    return g;
  });
  spec.time_orientation = [d](const VecX&) { return unit(d, 0); };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime ads2(double alpha) {
  require(alpha > 0, "ads2: alpha must be positive");
  ChartSpec spec;
  spec.name = "ads2";
  spec.dim = 2;
  spec.coord_names = {"t", "x"};
  spec.domain = Domain({{}, {-pi / 2, pi / 2, BoundaryKind::ManifoldEdge, BoundaryKind::ManifoldEdge}});
  const double a2 = alpha * alpha;
  spec.metric = make_metric_field([a2](const auto& x) {
    using S = scalar_t<decltype(x)>;
    using std::cos;
    const S c = cos(x(1));
    const S w = S(a2) / (c * c);
    Mat<S> g(2, 2);
    g << -w, S(0), S(0), w;
    return g;
  });
  spec.christoffel_closed_form = [](const VecX& x) {
    const double tn = std::tan(x(1));
    Connection<double> G(2);
    G(0, 0, 1) = G(0, 1, 0) = tn;
    G(1, 0, 0) = tn;
    G(1, 1, 1) = tn;
    return G;
  };
  spec.time_orientation = [](const VecX&) { return unit(2, 0); };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime anti_de_sitter(int n, double alpha) {
  require(n >= 1, "anti_de_sitter: n must be at least 1");
  require(alpha > 0, "anti_de_sitter: alpha must be positive");
  if (n == 1) return ads2(alpha);
  const int d = n + 1, m = n - 1;
  ChartSpec spec;
  spec.name = "anti-de-sitter";
  spec.dim = d;
  spec.coord_names = {"t", "x"};
  std::vector<CoordinateRange> ranges{{}, {0.0, pi / 2, BoundaryKind::ChartEdge, BoundaryKind::ManifoldEdge}};
  append_sphere(spec.coord_names, ranges, m);
  spec.domain = Domain(std::move(ranges));
  const double a2 = alpha * alpha;
  spec.metric = make_metric_field([d, m, a2](const auto& x) {
    using S = scalar_t<decltype(x)>;
    using std::cos;
    using std::sin;
    const S c = cos(x(1));
    const S w = S(a2) / (c * c);
    Mat<S> g = Mat<S>::Constant(d, d, S(0));
    g(0, 0) = -w;
    g(1, 1) = w;
    const S s = sin(x(1));
    fill_sphere<S>(g, x, 2, m, w * s * s);
    return g;
  });
  spec.time_orientation = [d](const VecX&) { return unit(d, 0); };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime flrw(int n, int k, std::shared_ptr<const ScaleFactor> a) {
  require(n >= 1, "flrw: n must be at least 1");
  require(k >= -1 && k <= 1, "flrw: k must be -1, 0 or 1");
  require(static_cast<bool>(a), "flrw: scale factor required");
  if (n == 1) k = 0;  // every one-dimensional section is flat
  const int d = n + 1;
  ChartSpec spec;
  spec.name = "flrw";
  spec.dim = d;
  spec.coord_names = {"t"};
  CoordinateRange tr = a->range();
  std::vector<CoordinateRange> ranges{tr};
  if (k == 0) {
    for (int i = 1; i <= n; ++i) {
      spec.coord_names.push_back("x" + std::to_string(i));
      ranges.push_back({});
    }
  } else if (k == 1) {
    for (int i = 0; i + 1 < n; ++i) {
      spec.coord_names.push_back("chi" + std::to_string(i + 1));
      ranges.push_back({0.0, pi, BoundaryKind::ChartEdge, BoundaryKind::ChartEdge});
    }
    spec.coord_names.push_back("phi");
    ranges.push_back({});
  } else {
    spec.coord_names.push_back("chi");
    ranges.push_back({0.0, kInf, BoundaryKind::ChartEdge, BoundaryKind::None});
    append_sphere(spec.coord_names, ranges, n - 1);
  }
  spec.domain = Domain(std::move(ranges));
  spec.metric = make_metric_field([d, n, k, a](const auto& x) {
    using S = scalar_t<decltype(x)>;
    using std::sinh;
    const S av = scale_factor_jet(*a, 0, x(0));
    const S a2 = av * av;
    Mat<S> g = Mat<S>::Constant(d, d, S(0));
    g(0, 0) = S(-1);
    if (k == 0) {
      for (int i = 1; i < d; ++i) g(i, i) = a2;
    } else if (k == 1) {
      fill_sphere<S>(g, x, 1, n, a2);
    } else {
      g(1, 1) = a2;
      const S sh = sinh(x(1));
      fill_sphere<S>(g, x, 2, n - 1, a2 * sh * sh);
    }
    return g;
  });
  if (k == 0) {
    spec.christoffel_closed_form = [d, a](const VecX& x) {
      const double av = a->value(x(0)), ad = a->first(x(0));
      Connection<double> G(d);
      for (int i = 1; i < d; ++i) {
        G(0, i, i) = av * ad;
        G(i, 0, i) = G(i, i, 0) = ad / av;
      }
      return G;
    };
  }
  spec.time_orientation = [d](const VecX&) { return unit(d, 0); };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime clifton_pohl() {
  ChartSpec spec;
  spec.name = "clifton-pohl";
  spec.dim = 2;
  spec.coord_names = {"u", "v"};
  spec.domain = Domain({{}, {}}, {{"origin", [](const VecX& x) { return std::hypot(x(0), x(1)); },
                                   BoundaryKind::ManifoldEdge}});
  spec.metric = make_metric_field([](const auto& x) {
    using S = scalar_t<decltype(x)>;
    const S w = S(1) / (x(0) * x(0) + x(1) * x(1));
    Mat<S> g(2, 2);
    g << S(0), w, w, S(0);
    return g;
  });
  spec.christoffel_closed_form = [](const VecX& x) {
    const double q = x(0) * x(0) + x(1) * x(1);
    Connection<double> G(2);
    G(0, 0, 0) = -2.0 * x(0) / q;
    G(1, 1, 1) = -2.0 * x(1) / q;
    return G;
  };
  // <T,T> = -2/(u^2+v^2) < 0 everywhere; (0,1) is future-pointing null.
  spec.time_orientation = [](const VecX&) {
    VecX T(2);
    T << -1.0, 1.0;
    return T;
  };
  return ChartedSpacetime(std::move(spec));
}

ChartedSpacetime milne(int n) {
  require(n >= 1, "milne: n must be at least 1");
  const int d = n + 1;
  ChartSpec spec;
  spec.name = "milne";
  spec.dim = d;
  spec.coord_names.push_back("x0");
  for (int i = 1; i <= n; ++i) spec.coord_names.push_back("x" + std::to_string(i));
  std::vector<CoordinateRange> ranges(d);
  ranges[0] = {0.0, kInf, BoundaryKind::ManifoldEdge, BoundaryKind::None};
  spec.domain = Domain(std::move(ranges), {{"tau", [](const VecX& x) {
                                              double q = x(0) * x(0) - x.tail(x.size() - 1).squaredNorm();
                                              return q > 0 ? std::sqrt(q) : -1.0;
                                            },
                                            BoundaryKind::ManifoldEdge}});
  spec.metric = make_metric_field([d](const auto& x) {
    using S = scalar_t<decltype(x)>;
    Mat<S> g = Mat<S>::Constant(d, d, S(0));
    g(0, 0) = S(-1);
    for (int i = 1; i < d; ++i) g(i, i) = S(1);
    return g;
  });
  spec.christoffel_closed_form = [d](const VecX&) { return Connection<double>(d); };
  spec.time_orientation = [d](const VecX&) { return unit(d, 0); };
  return ChartedSpacetime(std::move(spec));
}

Dust flrw_dust(int n, double alpha, std::shared_ptr<const ScaleFactor> a) {
  Dust dust;
  dust.density = [n, alpha, a](const VecX& x) { return n * (n - 1) * alpha / std::pow(a->value(x(0)), n); };
  dust.velocity = [](const VecX& x) { return VecX::Unit(x.size(), 0); };
  return dust;
}

// ---------------------------------------------------------------------------
// Named entries

namespace {

double param(const Parameters& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

int int_param(const Parameters& p, const std::string& key, int fallback) {
  const double v = param(p, key, fallback);
  if (v != std::floor(v)) throw ConfigError("parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

/// Uniform box sampler with rejection against the chart domain.
RegionSampler box_sampler(const ChartedSpacetime& M, std::vector<std::pair<double, double>> box) {
  return [M, box](std::mt19937_64& rng) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      VecX x(box.size());
      for (std::size_t i = 0; i < box.size(); ++i)
        x(static_cast<Eigen::Index>(i)) = std::uniform_real_distribution<double>(box[i].first, box[i].second)(rng);
      if (M.contains(x, 1e-6)) return x;
    }
    throw ContractError("sampler: could not draw an in-domain point");
  };
}

/// Angular sampling box for S^m away from the coordinate poles.
void sphere_box(std::vector<std::pair<double, double>>& box, int m) {
  for (int i = 0; i + 1 < m; ++i) box.push_back({0.3, pi - 0.3});
  if (m >= 1) box.push_back({0.0, 2 * pi});
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"minkowski", "schwarzschild-exterior", "schwarzschild-interior", "de-sitter", "anti-de-sitter",
          "ads2",      "flrw",                   "clifton-pohl",           "milne"};
}

CatalogEntry make_catalog_entry(const std::string& name, const Parameters& params) {
  static const std::vector<std::string> known_keys = {"n", "r_s", "alpha", "k", "t0", "a0", "sign", "t_min", "t_max"};
  for (const auto& [key, _] : params)
    if (std::find(known_keys.begin(), known_keys.end(), key) == known_keys.end())
      throw ConfigError("metric parameter '" + key + "' is not recognised");

  CatalogEntry e;
  e.name = name;
  e.parameters = params;
  e.matter = Vacuum{};
  std::vector<std::pair<double, double>> box;

  if (name == "minkowski") {
    const int n = int_param(params, "n", 3);
    e.spacetime = minkowski(n);
    box.assign(n + 1, {-5.0, 5.0});
    e.provenance = "Minkowski space, the flat vacuum solution";
  } else if (name == "schwarzschild-exterior" || name == "schwarzschild-interior") {
    const int n = int_param(params, "n", 3);
    const double rs = param(params, "r_s", 1.0);
    const bool interior = name == "schwarzschild-interior";
    e.spacetime = schwarzschild(n, rs, interior ? SchwarzschildRegion::Interior : SchwarzschildRegion::Exterior);
    box.push_back({-5.0, 5.0});
    box.push_back(interior ? std::pair{0.05 * rs, 0.95 * rs} : std::pair{1.2 * rs, 20.0 * rs});
    sphere_box(box, n - 1);
    e.provenance = "Schwarzschild solution, O(n)-symmetric vacuum";
  } else if (name == "de-sitter") {
    const int n = int_param(params, "n", 3);
    const double alpha = param(params, "alpha", 1.0);
    e.spacetime = de_sitter(n, alpha);
    e.matter = CosmologicalConstant{n * (n - 1) / (2 * alpha * alpha)};
    box.push_back({-2.0, 2.0});
    sphere_box(box, n);
    e.provenance = "de Sitter space, positive cosmological constant";
  } else if (name == "anti-de-sitter" || name == "ads2") {
    const int n = name == "ads2" ? 1 : int_param(params, "n", 3);
    const double alpha = param(params, "alpha", 1.0);
    e.spacetime = anti_de_sitter(n, alpha);
    if (n >= 2) e.matter = CosmologicalConstant{-n * (n - 1) / (2 * alpha * alpha)};
    box.push_back({-3.0, 3.0});
    if (n == 1) {
      box.push_back({-1.3, 1.3});
    } else {
      box.push_back({0.1, 1.3});
      sphere_box(box, n - 1);
    }
    e.provenance = n == 1 ? "two-dimensional anti-de Sitter space, universal cover"
                          : "anti-de Sitter space, negative cosmological constant, universal cover";
  } else if (name == "flrw") {
    ScaleFactorProblem sp;
    sp.n = int_param(params, "n", 3);
    sp.k = int_param(params, "k", 0);
    sp.alpha = param(params, "alpha", 1.0);
    sp.t0 = param(params, "t0", 1.0);
    // Default a0 puts the flat-model Big Bang at t = 0.
    sp.a0 = param(params, "a0", std::pow(sp.n * sp.n * sp.alpha / 2.0 * sp.t0 * sp.t0, 1.0 / sp.n));
    sp.a_dot_sign = int_param(params, "sign", 1);
    sp.t_min = param(params, "t_min", sp.t0 - 10.0);
    sp.t_max = param(params, "t_max", sp.t0 + 10.0);
    auto sol = std::make_shared<const ScaleFactorSolution>(solve_scale_factor(sp));
    e.scale_factor = sol;
    e.spacetime = flrw(sp.n, sp.k, sol);
    e.matter = flrw_dust(sp.n, sp.alpha, sol);
    const CoordinateRange tr = sol->range();
    const double lo = std::max(tr.lo, sp.t_min);
    const double hi = std::min(tr.hi, sp.t_max);
    box.push_back({lo + 0.1 * (sp.t0 - lo), sp.t0 + 0.5 * (hi - sp.t0)});
    if (sp.k == 0 || sp.n == 1) {
      for (int i = 0; i < sp.n; ++i) box.push_back({-5.0, 5.0});
    } else if (sp.k == 1) {
      sphere_box(box, sp.n);
    } else {
      box.push_back({0.1, 2.0});
      sphere_box(box, sp.n - 1);
    }
    e.provenance = "FLRW dust model with solver-produced scale factor";
  } else if (name == "clifton-pohl") {
    e.spacetime = clifton_pohl();
    box = {{-3.0, 3.0}, {-3.0, 3.0}};
    e.provenance = "Clifton-Pohl metric on the covering plane";
  } else if (name == "milne") {
    const int n = int_param(params, "n", 3);
    e.spacetime = milne(n);
    box.push_back({0.5, 3.0});
    for (int i = 0; i < n; ++i) box.push_back({-3.0, 3.0});
    e.provenance = "Milne universe inside the future light cone of the origin";
  } else {
    throw ConfigError("unknown metric name '" + name + "'");
  }
  e.sampler = box_sampler(e.spacetime, std::move(box));
  return e;
}

}  // namespace lorentz
