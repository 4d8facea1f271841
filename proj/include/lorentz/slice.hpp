#pragma once

// Spacelike slices through a point: unit normal, orthonormal frame of the
// slice, and the shape operator K = grad N restricted to the slice.

#include <memory>

#include "lorentz/scale_factor.hpp"
#include "lorentz/spacetime.hpp"

namespace lorentz {

enum class TimeDirection { Future, Past };

/// The normal points in the direction the congruence travels, and K0 is
/// taken with respect to that normal, so tr K0 is the expansion seen by
/// the run (a past run sees the sign of the future expansion flipped).
struct SliceSpec {
  ChartedSpacetime chart;
  VecX point;
  VecX normal;  // unit timelike
  MatX frame;   // d x n, orthonormal spacelike columns orthogonal to normal
  MatX K0;      // n x n, frame components
  TimeDirection direction = TimeDirection::Future;

  int n() const { return static_cast<int>(K0.rows()); }
  double expansion() const { return K0.trace(); }
};

/// t = t0 in an FLRW chart at the given spatial coordinates: K0 = +-(a'/a) I.
SliceSpec flrw_time_slice(const ChartedSpacetime& M, const ScaleFactor& a, const VecX& point, TimeDirection dir);
/// Hyperboloid tau = const through a point of the Milne chart: K0 = +-(1/tau) I.
SliceSpec milne_slice(const ChartedSpacetime& M, const VecX& point, TimeDirection dir);
/// r = r0 in the Schwarzschild interior; the future normal points towards r = 0.
SliceSpec schwarzschild_interior_slice(const ChartedSpacetime& M, double r_s, const VecX& point,
                                       TimeDirection dir = TimeDirection::Future);
/// t = 0 in Minkowski space with a prescribed shape operator (frame = coordinate axes).
SliceSpec minkowski_slice(const ChartedSpacetime& M, const VecX& point, const MatX& K0);

/// Level set of a time function T (increasing to the future), with K0
/// obtained by differentiating the normal field with dual numbers.
SliceSpec slice_from_time_function(const ChartedSpacetime& M, const ScalarField& T, const VecX& point,
                                   TimeDirection dir);

/// Closed-form expansion of the r = r0 slice in the Schwarzschild interior
/// (future normal): (n-2)(r_s/r)^(n-2) / (2 r F^(1/2)) - (n-1) F^(1/2) / r with F = (r_s/r)^(n-2) - 1.
double schwarzschild_interior_expansion(int n, double r_s, double r);

}  // namespace lorentz
