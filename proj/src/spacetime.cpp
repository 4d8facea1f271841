#include "lorentz/spacetime.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace lorentz {

const char* to_string(BoundaryKind k) {
  switch (k) {
    case BoundaryKind::None: return "none";
    case BoundaryKind::ChartEdge: return "chart-edge";
    case BoundaryKind::ManifoldEdge: return "manifold-edge";
    case BoundaryKind::CurvatureSingularity: return "curvature-singularity";
  }
  return "?";
}

const char* to_string(Side s) { return s == Side::Lower ? "lower" : "upper"; }

const char* to_string(CausalCharacter::Kind k) {
  switch (k) {
    case CausalCharacter::Kind::Timelike: return "timelike";
    case CausalCharacter::Kind::Null: return "null";
    case CausalCharacter::Kind::Spacelike: return "spacelike";
  }
  return "?";
}

const char* to_string(CausalCharacter::Orientation o) {
  switch (o) {
    case CausalCharacter::Orientation::Future: return "future";
    case CausalCharacter::Orientation::Past: return "past";
    case CausalCharacter::Orientation::None: return "none";
  }
  return "?";
}

std::optional<BoundaryHit> Domain::violation(const VecX& x, double margin) const {
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const auto& r = ranges_[i];
    const double xi = x(static_cast<Eigen::Index>(i));
    std::string name = i < names_.size() ? names_[i] : "x" + std::to_string(i);
    if (std::isnan(xi)) return BoundaryHit{static_cast<int>(i), name, Side::Lower, r.lo_kind};
    if (std::isfinite(r.lo) && !(xi > r.lo + margin))
      return BoundaryHit{static_cast<int>(i), name, Side::Lower, r.lo_kind};
    if (std::isfinite(r.hi) && !(xi < r.hi - margin))
      return BoundaryHit{static_cast<int>(i), name, Side::Upper, r.hi_kind};
  }
  for (const auto& c : constraints_) {
    if (!(c.level(x) > margin)) return BoundaryHit{-1, c.name, Side::Lower, c.kind};
  }
  return std::nullopt;
}

ChartedSpacetime::ChartedSpacetime(ChartSpec spec) {
  if (spec.dim < 2) throw UsageError("ChartedSpacetime: dimension must be at least 2");
  if (static_cast<int>(spec.coord_names.size()) != spec.dim)
    throw UsageError("ChartedSpacetime: coordinate name count does not match dimension");
  if (static_cast<int>(spec.domain.ranges_.size()) != spec.dim)
    throw UsageError("ChartedSpacetime: domain range count does not match dimension");
  if (!spec.metric || !spec.time_orientation)
    throw UsageError("ChartedSpacetime: metric and time orientation are required");
  spec.domain.names_ = spec.coord_names;
  impl_ = std::make_shared<const ChartSpec>(std::move(spec));
}

void ChartedSpacetime::require_in_domain(const VecX& x, double margin) const {
  if (x.size() != dim()) throw UsageError("coordinate tuple has wrong length");
  if (auto hit = violation(x, margin)) {
    std::ostringstream os;
    os << name() << ": point outside chart domain at " << hit->name << " (" << to_string(hit->side)
       << " side)";
    if (hit->coordinate >= 0) os << ", value " << x(hit->coordinate);
    throw DomainError(os.str(), hit->coordinate);
  }
}

Event::Event(ChartedSpacetime c, VecX coords) : chart(std::move(c)), x(std::move(coords)) {
  chart.require_in_domain(x);
}

Tangent::Tangent(Event e, VecX components) : at(std::move(e)), v(std::move(components)) {
  if (v.size() != at.chart.dim()) throw UsageError("tangent vector has wrong length");
}

MatX eval_metric(const ChartedSpacetime& M, const VecX& x) {
  M.require_in_domain(x);
  MatX g = M.metric(x);
  return 0.5 * (g + g.transpose());
}

double inner(const Tangent& a, const Tangent& b) {
  if (!(a.at.chart == b.at.chart) || a.at.x != b.at.x)
    throw UsageError("inner: tangent vectors live at different events");
  return inner(eval_metric(a.at.chart, a.at.x), a.v, b.v);
}

double norm_length(const Tangent& v) { return std::sqrt(std::abs(inner(v, v))); }

double auxiliary_scale(const MatX& g, const VecX& v) {
  const VecX a = v.cwiseAbs();
  return a.dot(g.cwiseAbs() * a);
}

CausalCharacter classify(const MatX& g, const VecX& v, const VecX& time_orientation, double tol) {
  using K = CausalCharacter::Kind;
  using O = CausalCharacter::Orientation;
  const double q = inner(g, v, v);
  const double s = auxiliary_scale(g, v);
  CausalCharacter c;
  if (std::abs(q) <= tol * s) {
    c.kind = K::Null;
  } else {
    c.kind = q < 0 ? K::Timelike : K::Spacelike;
  }
  if (c.kind == K::Spacelike || v.isZero(0.0)) {
    c.orientation = O::None;
  } else {
    c.orientation = inner(g, v, time_orientation) < 0 ? O::Future : O::Past;
  }
  return c;
}

CausalCharacter classify(const Tangent& v, double tol) {
  if (!(tol > 0)) throw UsageError("classify: tolerance must be positive");
  const auto& M = v.at.chart;
  return classify(eval_metric(M, v.at.x), v.v, M.time_orientation(v.at.x), tol);
}

int negative_eigenvalue_count(const MatX& g) {
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  int count = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) < 0) ++count;
  return count;
}

bool has_lorentzian_signature(const MatX& g) {
  Eigen::SelfAdjointEigenSolver<MatX> es(0.5 * (g + g.transpose()), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  int neg = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= 1e-14 * scale) return false;
    if (ev(i) < 0) ++neg;
  }
  return neg == 1;
}

MatX orthonormal_frame_from(const MatX& g, const VecX& unit_timelike) {
  const int d = static_cast<int>(g.rows());
  MatX frame(d, d);
  frame.col(0) = unit_timelike / std::sqrt(-inner(g, unit_timelike, unit_timelike));
  int filled = 1;
  for (int k = 0; k < d && filled < d; ++k) {
    VecX w = VecX::Unit(d, k);
    // Remove components along the frame built so far; eta_00 = -1.
    for (int j = 0; j < filled; ++j) {
      const double sign = j == 0 ? -1.0 : 1.0;
      w -= sign * inner(g, w, frame.col(j)) * frame.col(j);
    }
    const double nn = inner(g, w, w);
    if (nn <= 1e-10 * auxiliary_scale(g, VecX::Unit(d, k))) continue;
    frame.col(filled++) = w / std::sqrt(nn);
  }
  if (filled != d) throw DegeneracyError("orthonormal_frame: could not complete the frame");
  return frame;
}

MatX orthonormal_frame(const ChartedSpacetime& M, const VecX& x) {
  const MatX g = eval_metric(M, x);
  VecX T = M.time_orientation(x);
  const double q = inner(g, T, T);
  if (!(q < 0)) throw DegeneracyError("orthonormal_frame: time orientation is not timelike");
  return orthonormal_frame_from(g, T / std::sqrt(-q));
}

}  // namespace lorentz
