#include "lorentz/curvature.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace lorentz {

double RiemannTensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Conditioning is judged after symmetric row equilibration, so rescaling a
// coordinate (a^2 -> 0 near a Big Bang) does not count as degeneracy.
void require_nondegenerate(const MatX& g) {
  VecX s(g.rows());
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    const double m = g.row(i).cwiseAbs().maxCoeff();
    if (!(m > 0) || !std::isfinite(m)) throw DegeneracyError("metric is numerically singular at this point");
    s(i) = 1.0 / std::sqrt(m);
  }
  Eigen::JacobiSVD<MatX> svd(s.asDiagonal() * g * s.asDiagonal());
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0)))
    throw DegeneracyError("metric is numerically singular at this point");
}

}  // namespace

Connection<double> christoffel_differentiated(const ChartedSpacetime& M, const VecX& x) {
  M.require_in_domain(x);
  require_nondegenerate(M.metric(x));
  return christoffel_from_metric<double>(M, x);
}

Connection<double> christoffel(const ChartedSpacetime& M, const VecX& x) {
  if (M.has_closed_form_christoffel()) {
    M.require_in_domain(x);
    require_nondegenerate(M.metric(x));
    return M.closed_form_christoffel(x);
  }
  return christoffel_differentiated(M, x);
}

namespace {

// Gamma and its coordinate derivatives dgamma[m](l, a, b) = d_m Gamma^l_{ab}.
struct ConnectionJet {
  Connection<double> gamma;
  std::vector<Connection<double>> dgamma;
};

ConnectionJet connection_jet(const ChartedSpacetime& M, const VecX& x) {
  const int d = M.dim();
  ConnectionJet jet;
  jet.dgamma.reserve(d);
  Vec<Dual1> xd = lift<Dual1>(x);
  for (int m = 0; m < d; ++m) {
    xd(m).eps = 1.0;
    const Connection<Dual1> G = christoffel_from_metric<Dual1>(M, xd);
    xd(m).eps = 0.0;
    Connection<double> dG(d);
    if (m == 0) jet.gamma = Connection<double>(d);
    for (int l = 0; l < d; ++l)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
          dG(l, a, b) = G(l, a, b).eps;
          if (m == 0) jet.gamma(l, a, b) = G(l, a, b).val;
        }
    jet.dgamma.push_back(std::move(dG));
  }
  return jet;
}

RiemannTensor riemann_from_jet(const ConnectionJet& jet) {
  const int d = jet.gamma.dim();
  const auto& G = jet.gamma;
  RiemannTensor R(d);
  for (int r = 0; r < d; ++r)
    for (int s = 0; s < d; ++s)
      for (int m = 0; m < d; ++m)
        for (int n = m + 1; n < d; ++n) {
          double v = jet.dgamma[m](r, n, s) - jet.dgamma[n](r, m, s);
          for (int l = 0; l < d; ++l) v += G(r, m, l) * G(l, n, s) - G(r, n, l) * G(l, m, s);
          R(r, s, m, n) = v;
          R(r, s, n, m) = -v;
        }
  return R;
}

}  // namespace

RiemannTensor riemann_unchecked(const ChartedSpacetime& M, const VecX& x) {
  return riemann_from_jet(connection_jet(M, x));
}

RiemannTensor riemann(const ChartedSpacetime& M, const VecX& x) {
  M.require_in_domain(x);
  require_nondegenerate(M.metric(x));
  return riemann_from_jet(connection_jet(M, x));
}

MatX ricci_from_riemann(const RiemannTensor& R) {
  const int d = R.dim();
  MatX ric = MatX::Zero(d, d);
  for (int s = 0; s < d; ++s)
    for (int n = 0; n < d; ++n) {
      double v = 0.0;
      for (int m = 0; m < d; ++m) v += R(m, s, m, n);
      ric(s, n) = v;
    }
  return 0.5 * (ric + ric.transpose());
}

MatX ricci(const ChartedSpacetime& M, const VecX& x) { return ricci_from_riemann(riemann(M, x)); }

double scalar_curvature(const ChartedSpacetime& M, const VecX& x) {
  const MatX g = eval_metric(M, x);
  return (inverse<double>(g) * ricci(M, x)).trace();
}

CurvatureAtEvent curvature_at(const ChartedSpacetime& M, const VecX& x) {
  CurvatureAtEvent c;
  c.metric = eval_metric(M, x);
  require_nondegenerate(c.metric);
  auto jet = connection_jet(M, x);
  c.riemann = riemann_from_jet(jet);
  c.gamma = std::move(jet.gamma);
  c.ricci = ricci_from_riemann(c.riemann);
  c.scalar = (inverse<double>(c.metric) * c.ricci).trace();
  return c;
}

MatX energy_momentum(const ChartedSpacetime& M, const VecX& x, const MatterModel& matter) {
  const MatX g = eval_metric(M, x);
  const int d = M.dim();
  return std::visit(
      [&](const auto& m) -> MatX {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Vacuum>) {
          return MatX::Zero(d, d);
        } else if constexpr (std::is_same_v<T, CosmologicalConstant>) {
          return -m.lambda * g;
        } else {
          const VecX Uflat = g * m.velocity(x);
          return m.density(x) * Uflat * Uflat.transpose();
        }
      },
      matter);
}

double einstein_residual(const ChartedSpacetime& M, const VecX& x, const MatterModel& matter) {
  const auto c = curvature_at(M, x);
  const MatX T = energy_momentum(M, x, matter);
  return (c.ricci - 0.5 * c.scalar * c.metric - T).cwiseAbs().maxCoeff();
}

double ricci_form_residual(const ChartedSpacetime& M, const VecX& x, const MatterModel& matter) {
  const int n = M.spatial_dim();
  if (n < 2)
    throw UnsupportedError("ricci_form_residual: undefined in two dimensions, where Ric - (S/2)g vanishes identically");
  const auto c = curvature_at(M, x);
  const MatX T = energy_momentum(M, x, matter);
  const double trT = (inverse<double>(c.metric) * T).trace();
  return (c.ricci - T + (trT / (n - 1)) * c.metric).cwiseAbs().maxCoeff();
}

VecX random_timelike(const MatX& g, const VecX& unit_future, std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const int d = static_cast<int>(g.rows());
  for (int attempt = 0; attempt < 10000; ++attempt) {
    VecX v = unit_future;
    for (int i = 0; i < d; ++i) v(i) += spread * U(rng) * std::max(1.0, std::abs(unit_future(i)));
    if (inner(g, v, v) < 0 && inner(g, v, unit_future) < 0) return v;
  }
  return unit_future;
}

SecVerdict sec_sample(const ChartedSpacetime& M, const RegionSampler& region, int count, std::uint64_t seed) {
  if (count < 1) throw UsageError("sec_sample: need at least one sample");
  std::mt19937_64 rng(seed);
  SecVerdict verdict;
  for (int i = 0; i < count; ++i) {
    const VecX x = region(rng);
    const MatX g = eval_metric(M, x);
    VecX T = M.time_orientation(x);
    T /= std::sqrt(-inner(g, T, T));
    const VecX v = random_timelike(g, T, rng);
    const MatX ric = ricci(M, x);
    const double rvv = v.dot(ric * v);
    ++verdict.samples;
    if (rvv < -1e-8 * auxiliary_scale(g, v)) {
      verdict.holds = false;
      verdict.witness = SecWitness{x, v, rvv};
      return verdict;
    }
  }
  return verdict;
}

}  // namespace lorentz
