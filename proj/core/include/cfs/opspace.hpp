#pragma once

#include "cfs/linalg.hpp"
#include "cfs/spectral.hpp"

namespace cfs {

inline constexpr double kRankTolerance = 1e-10;

/// A point of F: a self-adjoint operator of rank r <= 2n with at most n
/// positive and n negative eigenvalues, stored as x = sum_a nu_a |e_a><e_a|
/// with Hilbert-orthonormal e_a (columns of `factors`).
class OperatorPoint {
 public:
  /// Validates orthonormality, nonzero spectrum and the signature bound.
  OperatorPoint(CMatrix factors, RVector spectrum, int spin_dim);

  /// The zero operator on a Hilbert space of dimension `hilbert_dim`.
  static OperatorPoint zero(Eigen::Index hilbert_dim, int spin_dim);

  Eigen::Index hilbert_dim() const noexcept { return factors_.rows(); }
  Eigen::Index rank() const noexcept { return factors_.cols(); }
  int spin_dim() const noexcept { return spin_dim_; }
  const CMatrix& factors() const noexcept { return factors_; }
  const RVector& spectrum() const noexcept { return spectrum_; }

  /// Counts of positive and negative spectrum entries.
  std::pair<int, int> signature() const;

  CMatrix dense() const;
  CVector apply(const CVector& v) const;

  /// U x U^dagger for a unitary U on the Hilbert space.
  OperatorPoint conjugated(const CMatrix& unitary) const;
  /// s * x for real s != 0 (the signature flips for s < 0).
  OperatorPoint scaled(double s) const;

 private:
  CMatrix factors_;
  RVector spectrum_;
  int spin_dim_;
};

/// Factors a dense Hermitian candidate into an OperatorPoint. Eigenvalues with
/// |nu| <= tol * ||matrix|| are dropped. Throws NotSelfAdjoint,
/// SignatureViolation or RankViolation.
OperatorPoint verify_membership(const CMatrix& matrix, int spin_dim, double tol = kRankTolerance);

/// Non-trivial eigenvalues of xy, padded to 2n. Computed from the r_x x r_x
/// matrix D_x G D_y G^dagger with G = E_x^dagger E_y; the f x f product is
/// never formed.
EigenvalueList product_eigenvalues(const OperatorPoint& x, const OperatorPoint& y);

/// tr(x) = sum of the spectrum.
double operator_trace(const OperatorPoint& x);

/// Hilbert-Schmidt distance ||x - y||_2, evaluated in factored form.
double operator_distance(const OperatorPoint& x, const OperatorPoint& y);

}  // namespace cfs
