#pragma once

#include "w2d/common.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace w2d {

struct Ellipticity {
  double lambda;
  double Lambda;

  Ellipticity(double lam, double Lam) : lambda(lam), Lambda(Lam) {
    if (!(lam > 0.0) || !(Lam >= lam) || !std::isfinite(Lam))
      throw input_error("Ellipticity: need 0 < lambda <= Lambda < inf");
  }
};

// Eigenvalues of a small symmetric matrix, nondecreasing. Works on any dense
// expression; only the lower triangle is read.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sym_eigenvalues(
    const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat A = M;
  if (A.rows() != A.cols()) throw input_error("sym_eigenvalues: matrix not square");
  if (!A.allFinite()) throw input_error("sym_eigenvalues: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace detail {

// Eigenvalues with |e| below 1e-12 * ||M|| contribute zero to either Pucci
// sum, so they are dropped explicitly.
template <typename Derived>
double pucci_sum(const Eigen::MatrixBase<Derived>& M, double pos_w, double neg_w) {
  auto ev = sym_eigenvalues(M);
  double scale = M.norm();
  double cut = 1e-12 * scale;
  double out = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    double e = double(ev[i]);
    if (e > cut) out += pos_w * e;
    else if (e < -cut) out += neg_w * e;
  }
  return out;
}

}  // namespace detail

// M^-(M) = lambda * sum_{e_i > 0} e_i + Lambda * sum_{e_i < 0} e_i
template <typename Derived>
double pucci_minus(const Eigen::MatrixBase<Derived>& M, const Ellipticity& e) {
  return detail::pucci_sum(M, e.lambda, e.Lambda);
}

// M^+(M) = Lambda * sum_{e_i > 0} e_i + lambda * sum_{e_i < 0} e_i
template <typename Derived>
double pucci_plus(const Eigen::MatrixBase<Derived>& M, const Ellipticity& e) {
  return detail::pucci_sum(M, e.Lambda, e.lambda);
}

}  // namespace w2d
