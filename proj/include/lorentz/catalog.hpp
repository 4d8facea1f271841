#pragma once

// Constructors for the named spacetimes. Spherical factors use hyperspherical
// coordinates (theta_1, ..., theta_{m-1}, phi) on S^m with theta_i in (0, pi);
// geodesic scenarios live on the equator theta_i = pi/2.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lorentz/curvature.hpp"
#include "lorentz/scale_factor.hpp"
#include "lorentz/spacetime.hpp"

namespace lorentz {

enum class SchwarzschildRegion { Exterior, Interior };

ChartedSpacetime minkowski(int n);
ChartedSpacetime schwarzschild(int n, double r_s, SchwarzschildRegion region);
/// alpha^2 (-dt^2 + cosh^2 t h_{S^n}).
ChartedSpacetime de_sitter(int n, double alpha);
/// Conformal chart (alpha^2 / cos^2 x)(-dt^2 + dx^2 + sin^2 x h_{S^{n-1}}), x in (0, pi/2),
/// t in R (universal cover). This is the static member of the family. n = 1 gives ads2.
ChartedSpacetime anti_de_sitter(int n, double alpha);
/// (alpha^2 / cos^2 x)(-dt^2 + dx^2), x in (-pi/2, pi/2).
ChartedSpacetime ads2(double alpha = 1.0);
/// -dt^2 + a(t)^2 h_k. The time range is taken from the scale factor.
ChartedSpacetime flrw(int n, int k, std::shared_ptr<const ScaleFactor> a);
/// (du dv + dv du) / (u^2 + v^2) on R^2 minus the origin.
ChartedSpacetime clifton_pohl();
/// x^0 > 0, <x,x> < 0 inside Minkowski space, Minkowski coordinates.
ChartedSpacetime milne(int n);

/// tau(x) = sqrt((x^0)^2 - sum (x^i)^2), the Milne slice function.
template <class S>
S milne_time(const Vec<S>& x) {
  S q = x(0) * x(0);
  for (Eigen::Index i = 1; i < x.size(); ++i) q = q - x(i) * x(i);
  using std::sqrt;
  return sqrt(q);
}

/// Pressureless dust comoving with d/dt, rho = n(n-1) alpha / a^n.
Dust flrw_dust(int n, double alpha, std::shared_ptr<const ScaleFactor> a);

using Parameters = std::map<std::string, double>;

struct CatalogEntry {
  std::string name;
  Parameters parameters;
  ChartedSpacetime spacetime;
  MatterModel matter;
  RegionSampler sampler;
  std::string provenance;
  std::shared_ptr<const ScaleFactorSolution> scale_factor;  // FLRW only
};

/// Names accepted by make_catalog_entry.
std::vector<std::string> catalog_names();
/// Builds a named entry; throws ConfigError on unknown names or bad parameters.
CatalogEntry make_catalog_entry(const std::string& name, const Parameters& params = {});

}  // namespace lorentz
