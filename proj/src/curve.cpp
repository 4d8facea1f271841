#include "lorentz/curve.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "lorentz/catalog.hpp"
#include "lorentz/quadrature.hpp"

namespace lorentz {

SampledCurve::SampledCurve(std::vector<double> grid, std::vector<VecX> points, std::vector<VecX> tangents)
    : grid_(std::move(grid)), points_(std::move(points)), tangents_(std::move(tangents)) {
  if (grid_.size() < 2) throw UsageError("SampledCurve: need at least two nodes");
  if (points_.size() != grid_.size() || tangents_.size() != grid_.size())
    throw UsageError("SampledCurve: grid, points and tangents differ in length");
  for (std::size_t i = 1; i < grid_.size(); ++i)
    if (!(grid_[i] > grid_[i - 1])) throw UsageError("SampledCurve: grid must be strictly increasing");
}

SampledCurve SampledCurve::sample(const Curve& c, const std::vector<double>& grid) {
  std::vector<VecX> x, v;
  x.reserve(grid.size());
  v.reserve(grid.size());
  for (double s : grid) {
    x.push_back(c.position(s));
    v.push_back(c.velocity(s));
  }
  return SampledCurve(grid, std::move(x), std::move(v));
}

std::size_t SampledCurve::segment(double s) const {
  if (s < grid_.front() || s > grid_.back()) throw UsageError("SampledCurve: parameter outside the grid");
  const auto it = std::upper_bound(grid_.begin(), grid_.end(), s);
  const auto i = static_cast<std::size_t>(std::distance(grid_.begin(), it));
  return std::min(i == 0 ? 0 : i - 1, grid_.size() - 2);
}

VecX SampledCurve::position(double s) const {
  const std::size_t i = segment(s);
  const double h = grid_[i + 1] - grid_[i], u = (s - grid_[i]) / h;
  const double h00 = (2 * u - 3) * u * u + 1, h10 = ((u - 2) * u + 1) * u, h01 = (3 - 2 * u) * u * u,
               h11 = (u - 1) * u * u;
  return h00 * points_[i] + h10 * h * tangents_[i] + h01 * points_[i + 1] + h11 * h * tangents_[i + 1];
}

VecX SampledCurve::velocity(double s) const {
  const std::size_t i = segment(s);
  const double h = grid_[i + 1] - grid_[i], u = (s - grid_[i]) / h;
  const double d00 = 6 * u * (u - 1), d10 = (3 * u - 4) * u + 1, d01 = 6 * u * (1 - u), d11 = (3 * u - 2) * u;
  return (d00 * points_[i] + d01 * points_[i + 1]) / h + d10 * tangents_[i] + d11 * tangents_[i + 1];
}

std::vector<CausalCharacter::Kind> SampledCurve::causal_check(const ChartedSpacetime& M) const {
  std::vector<CausalCharacter::Kind> out;
  out.reserve(grid_.size() - 1);
  for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
    auto worst = CausalCharacter::Kind::Timelike;
    for (int j = 0; j <= 4; ++j) {
      const double s = grid_[i] + (grid_[i + 1] - grid_[i]) * j / 4.0;
      const VecX x = position(s);
      if (!M.contains(x)) {
        worst = CausalCharacter::Kind::Spacelike;
        break;
      }
      const auto k = classify(eval_metric(M, x), velocity(s), M.time_orientation(x)).kind;
      if (k == CausalCharacter::Kind::Spacelike) worst = k;
      if (k == CausalCharacter::Kind::Null && worst == CausalCharacter::Kind::Timelike) worst = k;
    }
    out.push_back(worst);
  }
  return out;
}

double curve_proper_time(const ChartedSpacetime& M, const Curve& c, double rel_tol) {
  auto speed = [&](double s) {
    const VecX x = c.position(s);
    if (!M.contains(x)) {
      std::ostringstream os;
      os << "curve_proper_time: curve leaves the chart at s = " << s;
      throw ContractError(os.str());
    }
    MatX g = M.metric(x);
    const VecX v = c.velocity(s);
    const double q = v.dot(g * v);
    if (!(q < 0)) {
      std::ostringstream os;
      os << "curve_proper_time: curve is not timelike at s = " << s;
      throw ContractError(os.str());
    }
    return std::sqrt(-q);
  };
  std::vector<double> bp = c.breakpoints();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    speed(bp[i]);
    total += integrate_gk15(speed, bp[i], bp[i + 1], rel_tol, 1e-15).value;
  }
  speed(bp.back());
  return total;
}

namespace {

IntegratorConfig shooting_config() {
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.abs_tol = 1e-14;
  cfg.lambda_max = 1.0;
  return cfg;
}

std::optional<GeodesicResult> shoot_once(const ChartedSpacetime& M, const VecX& p, const VecX& v) {
  GeodesicResult r = integrate_geodesic(M, GeodesicState{p, v, 0.0, 0.0}, shooting_config());
  if (r.termination != Termination::ReachedParameterBound) return std::nullopt;
  return r;
}

}  // namespace

ShootingResult shoot_geodesic(const ChartedSpacetime& M, const VecX& p, const VecX& q, std::optional<VecX> guess,
                              double tol) {
  const int d = M.dim();
  M.require_in_domain(p);
  M.require_in_domain(q);
  VecX v = guess.value_or(q - p);
  auto first = shoot_once(M, p, v);
  if (!first) throw ContractError("shoot_geodesic: initial guess leaves the chart");
  GeodesicResult cur = std::move(*first);
  VecX F = cur.final_state().x - q;
  for (int it = 0; it < 50; ++it) {
    const double res = F.cwiseAbs().maxCoeff();
    if (res <= tol) return {v, res, it, std::move(cur)};
    MatX J(d, d);
    const double h = 1e-7 * std::max(1.0, v.cwiseAbs().maxCoeff());
    for (int j = 0; j < d; ++j) {
      VecX vp = v;
      vp(j) += h;
      auto r = shoot_once(M, p, vp);
      if (!r) throw ContractError("shoot_geodesic: Jacobian probe leaves the chart");
      J.col(j) = (r->final_state().x - q - F) / h;
    }
    const VecX step = J.partialPivLu().solve(-F);
    bool improved = false;
    for (double damp = 1.0; damp > 1e-6; damp *= 0.5) {
      const VecX vn = v + damp * step;
      auto r = shoot_once(M, p, vn);
      if (!r) continue;
      const VecX Fn = r->final_state().x - q;
      if (Fn.cwiseAbs().maxCoeff() < res) {
        v = vn;
        F = Fn;
        cur = std::move(*r);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  const double res = F.cwiseAbs().maxCoeff();
  if (res <= tol) return {v, res, 50, std::move(cur)};
  std::ostringstream os;
  os << "shoot_geodesic: no convergence (endpoint residual " << res << "); q may lie outside a normal neighbourhood";
  throw ContractError(os.str());
}

namespace {

/// Geodesic plus sum_k a_k sin(k pi s); a has one column per mode.
class PerturbedCurve final : public Curve {
 public:
  PerturbedCurve(const GeodesicResult& base, MatX a) : base_(base), a_(std::move(a)), d_(base.dim()) {}
  double s_begin() const override { return 0.0; }
  double s_end() const override { return 1.0; }
  VecX position(double s) const override {
    VecX x = base_.dense(s).head(d_);
    for (int k = 0; k < a_.cols(); ++k) x += a_.col(k) * std::sin((k + 1) * std::numbers::pi * s);
    return x;
  }
  VecX velocity(double s) const override {
    VecX v = base_.dense(s).segment(d_, d_);
    for (int k = 0; k < a_.cols(); ++k) {
      const double w = (k + 1) * std::numbers::pi;
      v += a_.col(k) * (w * std::cos(w * s));
    }
    return v;
  }

 private:
  const GeodesicResult& base_;
  MatX a_;
  int d_;
};

MatX draw_coefficients(std::mt19937_64& rng, int d, int modes, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  MatX a(d, modes);
  for (int k = 0; k < modes; ++k)
    for (int i = 0; i < d; ++i) a(i, k) = U(rng);
  return a;
}

/// Proper time of one perturbed curve, or nothing when it is not timelike.
std::optional<double> try_curve(const ChartedSpacetime& M, const GeodesicResult& base, MatX a) {
  const PerturbedCurve c(base, std::move(a));
  try {
    return curve_proper_time(M, c);
  } catch (const ContractError&) {
    return std::nullopt;
  }
}

constexpr int kPilot = 64;
constexpr int kMaxAttempts = 100;  // per trial; exhausting it means > 99% rejection

}  // namespace

TwinResult twin_trial(const ChartedSpacetime& M, const VecX& p, const VecX& q, const VariationFamily& family,
                      int N, int jobs) {
  if (N < 0) throw UsageError("twin_trial: N must be non-negative");
  if (family.modes < 1 || family.modes > 8) throw UsageError("twin_trial: modes must be in 1..8");
  if (!(family.amplitude >= 0)) throw UsageError("twin_trial: amplitude must be non-negative");
  const int d = M.dim();
  ShootingResult shot = shoot_geodesic(M, p, q);
  if (!shot.geodesic.timelike()) throw ContractError("twin_trial: q is not timelike related to p along a geodesic");
  const GeodesicResult& base = shot.geodesic;

  TwinResult res;
  res.shooting_residual = shot.residual;
  res.tau_geodesic = curve_proper_time(M, PerturbedCurve(base, MatX::Zero(d, family.modes)));

  double amp = family.amplitude;
  if (family.adapt_amplitude && amp > 0) {
    for (int halvings = 0; halvings < 40; ++halvings) {
      int rejected = 0;
      for (int j = 0; j < kPilot; ++j) {
        std::seed_seq ss{family.seed, std::uint64_t{0xA11CE}, static_cast<std::uint64_t>(j)};
        std::mt19937_64 rng(ss);
        if (!try_curve(M, base, draw_coefficients(rng, d, family.modes, amp))) ++rejected;
      }
      if (2 * rejected <= kPilot) break;
      amp *= 0.5;
    }
  }
  res.amplitude = amp;

  std::vector<double> taus(N, 0.0);
  std::vector<long> rejects(N, 0);
  std::vector<std::exception_ptr> errors(std::max(jobs, 1));
  auto work = [&](int worker, int stride) {
    try {
      for (int i = worker; i < N; i += stride) {
        std::seed_seq ss{family.seed, static_cast<std::uint64_t>(i)};
        std::mt19937_64 rng(ss);
        for (int attempt = 0;; ++attempt) {
          if (attempt == kMaxAttempts)
            throw ContractError("twin_trial: more than 99% of variations are not timelike; region not convex enough");
          if (auto tau = try_curve(M, base, draw_coefficients(rng, d, family.modes, amp))) {
            taus[i] = *tau;
            break;
          }
          ++rejects[i];
        }
      }
    } catch (...) {
      errors[worker] = std::current_exception();
    }
  };
  const int workers = std::clamp(jobs, 1, std::max(1, N));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work, w, workers);
    work(0, workers);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  res.trials = N;
  res.taus = std::move(taus);
  for (long r : rejects) res.rejected += r;
  res.tau_max_perturbed = res.taus.empty() ? 0.0 : *std::max_element(res.taus.begin(), res.taus.end());
  res.margin = res.tau_geodesic - res.tau_max_perturbed;
  return res;
}

double w_function(const ChartedSpacetime& M, const VecX& p, const VecX& q) {
  const ShootingResult shot = shoot_geodesic(M, p, q);
  const MatX E = orthonormal_frame(M, p);
  const VecX y = E.partialPivLu().solve(shot.v);
  return -y(0) * y(0) + y.tail(y.size() - 1).squaredNorm();
}

namespace {

/// x = X(t): slope out to x0, plateau, slope back, quadratic C^1 corners.
class LongCurveGraph final : public Curve {
 public:
  LongCurveGraph(double T, double x0, double sigma, double delta)
      : T_(T), x0_(x0), sigma_(sigma), delta_(delta), t1_(x0 / sigma), t2_(T - x0 / sigma) {}
  double s_begin() const override { return 0.0; }
  double s_end() const override { return T_; }
  VecX position(double t) const override {
    VecX x(2);
    x << t, X(t);
    return x;
  }
  VecX velocity(double t) const override {
    VecX v(2);
    v << 1.0, dX(t);
    return v;
  }
  std::vector<double> breakpoints() const override {
    return {0.0, t1_ - delta_, t1_ + delta_, t2_ - delta_, t2_ + delta_, T_};
  }
  double t1() const { return t1_; }
  double t2() const { return t2_; }

 private:
  double X(double t) const {
    if (t <= t1_ - delta_) return sigma_ * t;
    if (t < t1_ + delta_) return x0_ - sigma_ * sq(t1_ + delta_ - t) / (4 * delta_);
    if (t <= t2_ - delta_) return x0_;
    if (t < t2_ + delta_) return x0_ - sigma_ * sq(t - t2_ + delta_) / (4 * delta_);
    return sigma_ * (T_ - t);
  }
  double dX(double t) const {
    if (t <= t1_ - delta_) return sigma_;
    if (t < t1_ + delta_) return sigma_ * (t1_ + delta_ - t) / (2 * delta_);
    if (t <= t2_ - delta_) return 0.0;
    if (t < t2_ + delta_) return -sigma_ * (t - t2_ + delta_) / (2 * delta_);
    return -sigma_;
  }
  static double sq(double v) { return v * v; }

  double T_, x0_, sigma_, delta_, t1_, t2_;
};

}  // namespace

LongCurve ads_long_causal_curve(double eps, double x0, double alpha, double slope, double delta) {
  if (!(eps > 0)) throw UsageError("ads_long_causal_curve: eps must be positive");
  if (!(x0 > 0 && x0 < std::numbers::pi / 2)) throw UsageError("ads_long_causal_curve: x0 must lie in (0, pi/2)");
  if (!(slope > 0 && slope < 1) || !(delta > 0)) throw UsageError("ads_long_causal_curve: need 0 < slope < 1, delta > 0");
  const double T = std::numbers::pi + eps;
  const LongCurveGraph graph(T, x0, slope, delta);
  if (!(graph.t1() + delta < graph.t2() - delta))
    throw UsageError("ads_long_causal_curve: x0 too large for the corner width at this slope");

  std::vector<double> grid;
  const auto bp = graph.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const int pieces = i % 2 == 1 ? 8 : 64;
    for (int j = 0; j < pieces; ++j) grid.push_back(bp[i] + (bp[i + 1] - bp[i]) * j / pieces);
  }
  grid.push_back(T);

  LongCurve out{SampledCurve::sample(graph, grid)};
  out.t_first = graph.t1();
  out.t_second = graph.t2();
  out.tau = curve_proper_time(ads2(alpha), out.curve);
  out.lower_bound = alpha * eps / std::cos(x0);
  return out;
}

}  // namespace lorentz
