#pragma once

// Charts, events, tangent vectors, metric evaluation and causal
// classification.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lorentz/dual.hpp"
#include "lorentz/errors.hpp"
#include "lorentz/linalg.hpp"

namespace lorentz {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// What lies beyond a domain boundary. ChartEdge is a coordinate artifact
/// (the spacetime continues); ManifoldEdge and CurvatureSingularity are
/// places where the spacetime itself ends.
enum class BoundaryKind { None, ChartEdge, ManifoldEdge, CurvatureSingularity };
enum class Side { Lower, Upper };

const char* to_string(BoundaryKind k);
const char* to_string(Side s);

struct CoordinateRange {
  double lo = -kInf;
  double hi = kInf;
  BoundaryKind lo_kind = BoundaryKind::None;
  BoundaryKind hi_kind = BoundaryKind::None;
};

/// Open constraint level(x) > margin.
struct LevelConstraint {
  std::string name;
  std::function<double(const VecX&)> level;
  BoundaryKind kind = BoundaryKind::ChartEdge;
};

struct BoundaryHit {
  int coordinate = -1;  // -1 for a level constraint
  std::string name;
  Side side = Side::Lower;
  BoundaryKind kind = BoundaryKind::None;

  bool non_extendible() const {
    return kind == BoundaryKind::ManifoldEdge || kind == BoundaryKind::CurvatureSingularity;
  }
};

class Domain {
 public:
  Domain() = default;
  explicit Domain(std::vector<CoordinateRange> ranges, std::vector<LevelConstraint> constraints = {})
      : ranges_(std::move(ranges)), constraints_(std::move(constraints)) {}

  bool contains(const VecX& x, double margin = 0.0) const { return !violation(x, margin); }
  std::optional<BoundaryHit> violation(const VecX& x, double margin = 0.0) const;
  const std::vector<CoordinateRange>& ranges() const { return ranges_; }

 private:
  std::vector<CoordinateRange> ranges_;
  std::vector<LevelConstraint> constraints_;
  std::vector<std::string> names_;
  friend class ChartedSpacetime;
};

/// A metric g_{mu nu}(x) evaluable on reals and on first/second order duals.
class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual MatX eval(const VecX& x) const = 0;
  virtual Mat<Dual1> eval(const Vec<Dual1>& x) const = 0;
  virtual Mat<Dual2> eval(const Vec<Dual2>& x) const = 0;
};

/// A real function on the chart, evaluable on reals and duals.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  virtual double eval(const VecX& x) const = 0;
  virtual Dual1 eval(const Vec<Dual1>& x) const = 0;
  virtual Dual2 eval(const Vec<Dual2>& x) const = 0;
};

namespace detail {
template <class F>
class GenericMetricField final : public MetricField {
 public:
  explicit GenericMetricField(F f) : f_(std::move(f)) {}
  MatX eval(const VecX& x) const override { return f_(x); }
  Mat<Dual1> eval(const Vec<Dual1>& x) const override { return f_(x); }
  Mat<Dual2> eval(const Vec<Dual2>& x) const override { return f_(x); }

 private:
  F f_;
};

template <class F>
class GenericScalarField final : public ScalarField {
 public:
  explicit GenericScalarField(F f) : f_(std::move(f)) {}
  double eval(const VecX& x) const override { return f_(x); }
  Dual1 eval(const Vec<Dual1>& x) const override { return f_(x); }
  Dual2 eval(const Vec<Dual2>& x) const override { return f_(x); }

 private:
  F f_;
};
}  // namespace detail

/// Wrap a generic lambda `(const Vec<S>&) -> Mat<S>`.
template <class F>
std::shared_ptr<const MetricField> make_metric_field(F f) {
  return std::make_shared<detail::GenericMetricField<F>>(std::move(f));
}

template <class F>
std::shared_ptr<const ScalarField> make_scalar_field(F f) {
  return std::make_shared<detail::GenericScalarField<F>>(std::move(f));
}

/// Connection coefficients Gamma^l_{mn}, stored as gamma[l](m, n).
template <class S>
struct Connection {
  std::vector<Mat<S>> gamma;

  Connection() = default;
  explicit Connection(int dim) : gamma(dim, Mat<S>::Constant(dim, dim, S(0))) {}
  int dim() const { return static_cast<int>(gamma.size()); }
  S& operator()(int l, int m, int n) { return gamma[l](m, n); }
  const S& operator()(int l, int m, int n) const { return gamma[l](m, n); }
};

struct ChartSpec {
  std::string name;
  int dim = 0;
  std::vector<std::string> coord_names;
  std::shared_ptr<const MetricField> metric;
  Domain domain;
  std::function<Connection<double>(const VecX&)> christoffel_closed_form;
  std::function<VecX(const VecX&)> time_orientation;
};

/// A single coordinate chart on a Lorentzian manifold. Cheap to copy;
/// copies share the same immutable definition and compare equal.
class ChartedSpacetime {
 public:
  ChartedSpacetime() = default;
  explicit ChartedSpacetime(ChartSpec spec);

  const std::string& name() const { return impl_->name; }
  int dim() const { return impl_->dim; }
  int spatial_dim() const { return impl_->dim - 1; }
  const std::vector<std::string>& coord_names() const { return impl_->coord_names; }
  const Domain& domain() const { return impl_->domain; }

  bool contains(const VecX& x, double margin = 0.0) const { return impl_->domain.contains(x, margin); }
  std::optional<BoundaryHit> violation(const VecX& x, double margin = 0.0) const {
    return impl_->domain.violation(x, margin);
  }
  /// Throws DomainError naming the offending coordinate.
  void require_in_domain(const VecX& x, double margin = 0.0) const;

  /// Raw metric evaluation without domain checks; S is double or a dual.
  template <class S>
  Mat<S> metric(const Vec<S>& x) const {
    return impl_->metric->eval(x);
  }

  bool has_closed_form_christoffel() const { return static_cast<bool>(impl_->christoffel_closed_form); }
  Connection<double> closed_form_christoffel(const VecX& x) const { return impl_->christoffel_closed_form(x); }
  VecX time_orientation(const VecX& x) const { return impl_->time_orientation(x); }

  friend bool operator==(const ChartedSpacetime& a, const ChartedSpacetime& b) { return a.impl_ == b.impl_; }

 private:
  std::shared_ptr<const ChartSpec> impl_;
};

struct Event {
  ChartedSpacetime chart;
  VecX x;

  Event(ChartedSpacetime c, VecX coords);
};

struct Tangent {
  Event at;
  VecX v;

  Tangent(Event e, VecX components);
};

struct CausalCharacter {
  enum class Kind { Timelike, Null, Spacelike };
  enum class Orientation { Future, Past, None };
  Kind kind = Kind::Spacelike;
  Orientation orientation = Orientation::None;

  friend bool operator==(const CausalCharacter&, const CausalCharacter&) = default;
};

const char* to_string(CausalCharacter::Kind k);
const char* to_string(CausalCharacter::Orientation o);

inline constexpr double kDefaultNullTolerance = 1e-9;

/// Symmetrised metric at an in-domain point.
MatX eval_metric(const ChartedSpacetime& M, const VecX& x);

double inner(const Tangent& a, const Tangent& b);
double norm_length(const Tangent& v);
CausalCharacter classify(const Tangent& v, double tol = kDefaultNullTolerance);

/// Matrix-level helpers shared by the engines.
inline double inner(const MatX& g, const VecX& v, const VecX& w) { return v.dot(g * w); }
/// Sum |g_{mn}| |v^m| |v^n|, the natural size of <v,v> for rounding purposes.
double auxiliary_scale(const MatX& g, const VecX& v);
CausalCharacter classify(const MatX& g, const VecX& v, const VecX& time_orientation,
                         double tol = kDefaultNullTolerance);

/// Number of negative eigenvalues of a symmetric matrix.
int negative_eigenvalue_count(const MatX& g);
bool has_lorentzian_signature(const MatX& g);

/// Orthonormal frame at x: column 0 is the future unit timelike vector
/// built from the time orientation, columns 1..n are spacelike unit vectors.
MatX orthonormal_frame(const ChartedSpacetime& M, const VecX& x);

/// Orthonormal frame whose column 0 is the given unit timelike vector.
MatX orthonormal_frame_from(const MatX& g, const VecX& unit_timelike);

}  // namespace lorentz
