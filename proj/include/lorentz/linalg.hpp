#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "lorentz/dual.hpp"

namespace lorentz {

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

using VecX = Vec<double>;
using MatX = Mat<double>;

/// LU factorisation with partial pivoting on the real part. Works for any
/// scalar with field operations, including nested duals, so derivatives
/// propagate through inverses and determinants.
template <class S>
struct SmallLU {
  Mat<S> lu;
  Eigen::VectorXi perm;
  int sign = 1;
  bool singular = false;

  explicit SmallLU(Mat<S> a) : lu(std::move(a)), perm(lu.rows()) {
    const int n = static_cast<int>(lu.rows());
    for (int i = 0; i < n; ++i) perm(i) = i;
    for (int k = 0; k < n; ++k) {
      int p = k;
      double best = std::abs(value_of(lu(k, k)));
      for (int i = k + 1; i < n; ++i) {
        double c = std::abs(value_of(lu(i, k)));
        if (c > best) {
          best = c;
          p = i;
        }
      }
      if (best == 0.0) {
        singular = true;
        continue;
      }
      if (p != k) {
        lu.row(k).swap(lu.row(p));
        std::swap(perm(k), perm(p));
        sign = -sign;
      }
      for (int i = k + 1; i < n; ++i) {
        lu(i, k) = lu(i, k) / lu(k, k);
        for (int j = k + 1; j < n; ++j) lu(i, j) = lu(i, j) - lu(i, k) * lu(k, j);
      }
    }
  }

  S determinant() const {
    S d(sign);
    for (int i = 0; i < lu.rows(); ++i) d = d * lu(i, i);
    return d;
  }

  Vec<S> solve(const Vec<S>& b) const {
    const int n = static_cast<int>(lu.rows());
    Vec<S> y(n);
    for (int i = 0; i < n; ++i) {
      S s = b(perm(i));
      for (int j = 0; j < i; ++j) s = s - lu(i, j) * y(j);
      y(i) = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      S s = y(i);
      for (int j = i + 1; j < n; ++j) s = s - lu(i, j) * y(j);
      y(i) = s / lu(i, i);
    }
    return y;
  }

  Mat<S> inverse() const {
    const int n = static_cast<int>(lu.rows());
    Mat<S> inv(n, n);
    for (int j = 0; j < n; ++j) {
      Vec<S> e = Vec<S>::Constant(n, S(0));
      e(j) = S(1);
      inv.col(j) = solve(e);
    }
    return inv;
  }
};

template <class S>
Mat<S> inverse(const Mat<S>& a) {
  SmallLU<S> lu(a);
  if (lu.singular) throw std::domain_error("inverse: singular matrix");
  return lu.inverse();
}

template <class S>
S determinant(const Mat<S>& a) {
  return SmallLU<S>(a).determinant();
}

/// Lift a real vector into a dual vector with zero infinitesimal parts.
template <class S>
Vec<S> lift(const VecX& x) {
  Vec<S> out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = S(x(i));
  return out;
}

}  // namespace lorentz
