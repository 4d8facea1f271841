#pragma once

// Jacobi fields orthogonal to a unit timelike geodesic, in a parallel
// orthonormal frame: A'' = -R A with R_ki = <Riem(e_i, c') c', e_k>.
// Conjugate points are the zeros of det A.

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lorentz/geodesic.hpp"
#include "lorentz/slice.hpp"

namespace lorentz {

/// A geodesic stopped before the requested parameter.
class IncompletenessError : public std::runtime_error {
 public:
  IncompletenessError(const std::string& what, GeodesicResult result)
      : std::runtime_error(what), result_(std::make_shared<const GeodesicResult>(std::move(result))) {}
  const GeodesicResult& result() const noexcept { return *result_; }

 private:
  std::shared_ptr<const GeodesicResult> result_;
};

struct JacobiMode {
  enum class Kind { FromPoint, FromSlice };
  Kind kind = Kind::FromPoint;
  MatX K0;     // FromSlice: n x n shape operator in frame components
  MatX frame;  // FromSlice: d x n; FromPoint: built from the initial velocity when empty

  static JacobiMode from_point() { return {}; }
  static JacobiMode from_slice(const SliceSpec& s) { return {Kind::FromSlice, s.K0, s.frame}; }
};

/// Geodesic together with its transported frame and Jacobi matrix, all
/// integrated with one adaptive controller. The parameter is proper time.
class JacobiBundle {
 public:
  JacobiBundle(GeodesicResult run, JacobiMode mode);

  const GeodesicResult& base() const { return run_; }
  const JacobiMode& mode() const { return mode_; }
  int n() const { return n_; }
  double t_begin() const { return run_.lambda_begin(); }
  double t_end() const { return run_.lambda_end; }

  VecX position(double t) const;
  VecX velocity(double t) const;
  MatX frame(double t) const;  // d x n
  MatX A(double t) const;
  MatX A_dot(double t) const;
  /// Second derivative from the Jacobi equation, -R(t) A(t).
  MatX A_ddot(double t) const;
  /// R_ki = <Riem(e_i, c') c', e_k> at t.
  MatX tidal(double t) const;

  double det(double t) const;
  /// K = A' A^-1.
  MatX shape_operator(double t) const;
  /// tr(A' A^-1).
  double expansion(double t) const;
  /// (ln det A)' from a dual-number determinant of A + eps A'.
  double expansion_log_det(double t) const;
  /// A'^T A - A^T A'.
  MatX wronskian(double t) const;

 private:
  struct Unpacked {
    VecX x, v;
    MatX E, A, Ad;
  };
  Unpacked unpack(double t) const;

  GeodesicResult run_;
  JacobiMode mode_;
  int d_ = 0, n_ = 0;
};

/// Tidal matrix for a unit timelike velocity v and spatial frame E at x.
MatX tidal_matrix(const ChartedSpacetime& M, const VecX& x, const VecX& v, const MatX& E);

/// Re-integrates the geodesic's initial data jointly with frame and Jacobi
/// fields over the geodesic's parameter range. The geodesic must be unit
/// timelike and not degraded (ContractError otherwise).
JacobiBundle propagate_jacobi(const ChartedSpacetime& M, const GeodesicResult& geodesic, const JacobiMode& mode);

/// Normal geodesic of a slice, propagated FromSlice up to proper time t_max.
JacobiBundle propagate_from_slice(const SliceSpec& slice, double t_max, IntegratorConfig cfg = {});
/// Geodesic from x with unit timelike v, propagated FromPoint up to proper time t_max.
JacobiBundle propagate_from_point(const ChartedSpacetime& M, const VecX& x, const VecX& v, double t_max,
                                  IntegratorConfig cfg = {});

struct ConjugateReport {
  std::optional<double> t_star;
  std::vector<std::pair<double, double>> det_trace;  // (t, det A)
  double refinement = 0.0;                           // final bisection bracket width
  /// det A came close to zero without changing sign.
  bool grazing = false;
};

/// Sign-change scan of det A on a uniform grid of `resolution` cells over
/// [t_begin, min(t_max, t_end)], refined by bisection to a 1e-10 bracket.
ConjugateReport first_conjugate(const JacobiBundle& bundle, double t_max, int resolution = 2048);

/// exp(t, p) along the unit timelike direction v; throws IncompletenessError
/// when the geodesic ends before t.
Event exp_map(const Event& p, const VecX& v, double t, IntegratorConfig cfg = {});
/// exp(t, p) along the slice normal.
Event exp_map(const SliceSpec& slice, double t, IntegratorConfig cfg = {});

/// Closed-form AdS2 geodesics: the intersection of the embedding hyperboloid
/// -u^2 - v^2 + w^2 = -alpha^2 with the plane through the origin spanned by
/// the embedded point and velocity, mapped back to (t, x). The parameter is
/// the affine parameter of the given velocity.
class Ads2GeodesicOracle {
 public:
  Ads2GeodesicOracle(double alpha, const VecX& p, const VecX& v);
  VecX operator()(double lambda) const;
  CausalCharacter::Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }

  static Eigen::Vector3d embed(double alpha, const VecX& x);
  static Eigen::Vector3d embed_velocity(double alpha, const VecX& x, const VecX& v);

 private:
  Eigen::Vector3d ambient(double lambda) const;

  double alpha_, t0_, omega_ = 0.0;
  Eigen::Vector3d P_, V_;
  CausalCharacter::Kind kind_;
};

/// Oracle for a tangent on an AdS2 chart (alpha read off the metric).
Ads2GeodesicOracle ads2_geodesic_oracle(const Tangent& v);

}  // namespace lorentz
