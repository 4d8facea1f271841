#pragma once

// Christoffel symbols, Riemann/Ricci/scalar curvature and Einstein-equation
// residuals, all derived from the metric evaluator by forward-mode
// differentiation.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "lorentz/spacetime.hpp"

namespace lorentz {

/// R^r_{s m n} stored densely, index order (r, s, m, n).
class RiemannTensor {
 public:
  RiemannTensor() = default;
  explicit RiemannTensor(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim) * dim * dim * dim, 0.0) {}
  int dim() const { return dim_; }
  double& operator()(int r, int s, int m, int n) { return data_[index(r, s, m, n)]; }
  double operator()(int r, int s, int m, int n) const { return data_[index(r, s, m, n)]; }
  double max_abs() const;

 private:
  std::size_t index(int r, int s, int m, int n) const {
    return ((static_cast<std::size_t>(r) * dim_ + s) * dim_ + m) * dim_ + n;
  }
  int dim_ = 0;
  std::vector<double> data_;
};

struct CurvatureAtEvent {
  MatX metric;
  Connection<double> gamma;
  RiemannTensor riemann;
  MatX ricci;
  double scalar = 0.0;
};

/// First derivatives dg[m] = d_m g of the metric, exact to rounding.
template <class S>
std::vector<Mat<S>> metric_gradient(const ChartedSpacetime& M, const Vec<S>& x) {
  using D = Dual<S>;
  const int d = M.dim();
  std::vector<Mat<S>> dg(d, Mat<S>(d, d));
  Vec<D> xd(d);
  for (int i = 0; i < d; ++i) xd(i) = D(x(i));
  for (int m = 0; m < d; ++m) {
    xd(m).eps = S(1);
    const Mat<D> gd = M.metric(xd);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) dg[m](a, b) = S(0.5) * (gd(a, b).eps + gd(b, a).eps);
    xd(m).eps = S(0);
  }
  return dg;
}

/// Gamma^l_{mn} = 1/2 g^{lr} (d_m g_{rn} + d_n g_{rm} - d_r g_{mn}).
template <class S>
Connection<S> christoffel_from_metric(const ChartedSpacetime& M, const Vec<S>& x) {
  const int d = M.dim();
  Mat<S> g = M.metric(x);
  g = (S(0.5) * (g + g.transpose())).eval();
  const Mat<S> ginv = inverse(g);
  const auto dg = metric_gradient(M, x);
  Connection<S> G(d);
  // Lowered symbols Gamma_{r m n}.
  std::vector<Mat<S>> low(d, Mat<S>(d, d));
  for (int r = 0; r < d; ++r)
    for (int m = 0; m < d; ++m)
      for (int n = 0; n < d; ++n) low[r](m, n) = S(0.5) * (dg[m](r, n) + dg[n](r, m) - dg[r](m, n));
  for (int l = 0; l < d; ++l)
    for (int m = 0; m < d; ++m)
      for (int n = m; n < d; ++n) {
        S s(0);
        for (int r = 0; r < d; ++r) s = s + ginv(l, r) * low[r](m, n);
        G(l, m, n) = s;
        G(l, n, m) = s;
      }
  return G;
}

/// Christoffel symbols at x. Uses the chart's closed form when present;
/// otherwise the dual-number route. Throws DegeneracyError on a singular metric.
Connection<double> christoffel(const ChartedSpacetime& M, const VecX& x);
/// Always the dual-number route, for cross-checking closed forms.
Connection<double> christoffel_differentiated(const ChartedSpacetime& M, const VecX& x);

RiemannTensor riemann(const ChartedSpacetime& M, const VecX& x);
/// Same tensor without domain and conditioning checks, for integrator right-hand sides.
RiemannTensor riemann_unchecked(const ChartedSpacetime& M, const VecX& x);
MatX ricci(const ChartedSpacetime& M, const VecX& x);
double scalar_curvature(const ChartedSpacetime& M, const VecX& x);
CurvatureAtEvent curvature_at(const ChartedSpacetime& M, const VecX& x);

/// Ric_{sn} = R^m_{smn}.
MatX ricci_from_riemann(const RiemannTensor& R);

struct Vacuum {};
struct CosmologicalConstant {
  double lambda = 0.0;
};
struct Dust {
  std::function<double(const VecX&)> density;
  std::function<VecX(const VecX&)> velocity;  // unit timelike
};
using MatterModel = std::variant<Vacuum, CosmologicalConstant, Dust>;

/// Energy-momentum tensor T_{mn} of the matter model at x.
MatX energy_momentum(const ChartedSpacetime& M, const VecX& x, const MatterModel& matter);

/// || Ric - (S/2) g - T ||_inf.
double einstein_residual(const ChartedSpacetime& M, const VecX& x, const MatterModel& matter);
/// || Ric - T + tr(T)/(n-1) g ||_inf; requires n >= 2.
double ricci_form_residual(const ChartedSpacetime& M, const VecX& x, const MatterModel& matter);

using RegionSampler = std::function<VecX(std::mt19937_64&)>;

struct SecWitness {
  VecX x;
  VecX v;
  double ric_vv = 0.0;
};

struct SecVerdict {
  bool holds = true;
  std::optional<SecWitness> witness;
  int samples = 0;
};

/// Samples N events and random timelike vectors; reports the first
/// Ric(V,V) < -1e-8 * scale found.
SecVerdict sec_sample(const ChartedSpacetime& M, const RegionSampler& region, int count, std::uint64_t seed);

/// Draws a timelike vector near the unit future time orientation.
VecX random_timelike(const MatX& g, const VecX& unit_future, std::mt19937_64& rng, double spread = 1.0);

}  // namespace lorentz
