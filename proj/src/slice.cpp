#include "lorentz/slice.hpp"

#include <cmath>

#include "lorentz/catalog.hpp"
#include "lorentz/curvature.hpp"

namespace lorentz {

namespace {

double sign_of(TimeDirection dir) { return dir == TimeDirection::Future ? 1.0 : -1.0; }

MatX spatial_columns(const MatX& g, const VecX& unit_normal) {
  const MatX full = orthonormal_frame_from(g, unit_normal);
  return full.rightCols(full.cols() - 1);
}

SliceSpec isotropic_slice(const ChartedSpacetime& M, const VecX& point, const VecX& future_normal, double h,
                          TimeDirection dir) {
  const MatX g = eval_metric(M, point);
  SliceSpec s;
  s.chart = M;
  s.point = point;
  s.direction = dir;
  s.normal = sign_of(dir) * future_normal;
  s.frame = spatial_columns(g, s.normal);
  s.K0 = sign_of(dir) * h * MatX::Identity(M.spatial_dim(), M.spatial_dim());
  return s;
}

/// dT evaluated at a point with scalar S, using one more dual level.
template <class S>
Vec<S> gradient_one_form(const ScalarField& T, const Vec<S>& x) {
  using D = Dual<S>;
  const auto d = x.size();
  Vec<S> dT(d);
  Vec<D> xd(d);
  for (Eigen::Index i = 0; i < d; ++i) xd(i) = D(x(i));
  for (Eigen::Index m = 0; m < d; ++m) {
    xd(m).eps = S(1);
    dT(m) = T.eval(xd).eps;
    xd(m).eps = S(0);
  }
  return dT;
}

/// Unit normal field -grad T / |grad T| (future for future-increasing T).
template <class S>
Vec<S> unit_normal_field(const ChartedSpacetime& M, const ScalarField& T, const Vec<S>& x) {
  Mat<S> g = M.metric(x);
  g = (S(0.5) * (g + g.transpose())).eval();
  const Mat<S> ginv = inverse(g);
  const Vec<S> dT = gradient_one_form(T, x);
  const Vec<S> grad = ginv * dT;
  S q(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) q = q + grad(i) * dT(i);
  using std::sqrt;
  if (!(value_of(q) < 0)) throw DegeneracyError("slice_from_time_function: gradient is not timelike");
  const S len = sqrt(S(0) - q);
  Vec<S> N(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) N(i) = S(0) - grad(i) / len;
  return N;
}

}  // namespace

SliceSpec flrw_time_slice(const ChartedSpacetime& M, const ScaleFactor& a, const VecX& point, TimeDirection dir) {
  M.require_in_domain(point);
  const double t = point(0);
  return isotropic_slice(M, point, VecX::Unit(M.dim(), 0), a.first(t) / a.value(t), dir);
}

SliceSpec milne_slice(const ChartedSpacetime& M, const VecX& point, TimeDirection dir) {
  M.require_in_domain(point);
  const double tau = milne_time<double>(point);
  // Future unit normal of the hyperboloid is x / tau.
  return isotropic_slice(M, point, point / tau, 1.0 / tau, dir);
}

double schwarzschild_interior_expansion(int n, double r_s, double r) {
  const double p = n - 2;
  const double F = std::pow(r_s / r, p) - 1.0;
  return p * std::pow(r_s / r, p) / (2.0 * r * std::sqrt(F)) - (n - 1) * std::sqrt(F) / r;
}

SliceSpec schwarzschild_interior_slice(const ChartedSpacetime& M, double r_s, const VecX& point, TimeDirection dir) {
  M.require_in_domain(point);
  const int d = M.dim(), n = d - 1;
  const double r = point(1);
  const double p = n - 2;
  const double F = std::pow(r_s / r, p) - 1.0;
  const MatX g = eval_metric(M, point);

  SliceSpec s;
  s.chart = M;
  s.point = point;
  s.direction = dir;
  VecX N = VecX::Zero(d);
  N(1) = -std::sqrt(F);
  s.normal = sign_of(dir) * N;
  // Coordinate directions t, theta_1, ..., phi are mutually orthogonal on the slice.
  s.frame = MatX::Zero(d, n);
  s.frame(0, 0) = 1.0 / std::sqrt(g(0, 0));
  for (int a = 2; a < d; ++a) s.frame(a, a - 1) = 1.0 / std::sqrt(g(a, a));
  s.K0 = MatX::Zero(n, n);
  s.K0(0, 0) = p * std::pow(r_s / r, p) / (2.0 * r * std::sqrt(F));
  for (int i = 1; i < n; ++i) s.K0(i, i) = -std::sqrt(F) / r;
  s.K0 *= sign_of(dir);
  return s;
}

SliceSpec minkowski_slice(const ChartedSpacetime& M, const VecX& point, const MatX& K0) {
  const int d = M.dim(), n = d - 1;
  if (K0.rows() != n || K0.cols() != n) throw UsageError("minkowski_slice: K0 must be n x n");
  if (!K0.isApprox(K0.transpose(), 1e-12)) throw UsageError("minkowski_slice: K0 must be symmetric");
  M.require_in_domain(point);
  SliceSpec s;
  s.chart = M;
  s.point = point;
  s.normal = VecX::Unit(d, 0);
  s.frame = MatX::Zero(d, n);
  for (int i = 0; i < n; ++i) s.frame(i + 1, i) = 1.0;
  s.K0 = K0;
  return s;
}

SliceSpec slice_from_time_function(const ChartedSpacetime& M, const ScalarField& T, const VecX& point,
                                   TimeDirection dir) {
  M.require_in_domain(point);
  const int d = M.dim(), n = d - 1;
  const VecX N = unit_normal_field<double>(M, T, point);
  // DN[nu] = d_nu N, one dual evaluation per coordinate direction.
  MatX dN(d, d);
  Vec<Dual1> xd(d);
  for (int i = 0; i < d; ++i) xd(i) = Dual1(point(i));
  for (int nu = 0; nu < d; ++nu) {
    xd(nu).eps = 1.0;
    const Vec<Dual1> Nd = unit_normal_field<Dual1>(M, T, xd);
    for (int mu = 0; mu < d; ++mu) dN(mu, nu) = Nd(mu).eps;
    xd(nu).eps = 0.0;
  }
  const Connection<double> G = christoffel(M, point);
  MatX cov = dN;  // cov(mu, nu) = nabla_nu N^mu
  for (int mu = 0; mu < d; ++mu) cov.row(mu) += (G.gamma[mu] * N).transpose();

  const MatX g = eval_metric(M, point);
  SliceSpec s;
  s.chart = M;
  s.point = point;
  s.direction = dir;
  s.normal = sign_of(dir) * N;
  s.frame = spatial_columns(g, s.normal);
  const MatX K = s.frame.transpose() * g * cov * s.frame;
  s.K0 = sign_of(dir) * 0.5 * (K + K.transpose());
  if (s.K0.rows() != n) throw DegeneracyError("slice_from_time_function: frame has the wrong size");
  return s;
}

}  // namespace lorentz
