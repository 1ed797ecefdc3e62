#pragma once

#include "cfs/opspace.hpp"

namespace cfs {

/// S_x = x(H) with a Hilbert-orthonormal basis and the spin scalar product
/// <u|v>_x = -<u|x v> carried as an explicit Gram matrix.
class SpinSpace {
 public:
  explicit SpinSpace(OperatorPoint x);

  /// Same space, basis replaced by basis * change (change must be unitary).
  SpinSpace with_basis_change(const CMatrix& change) const;

  const OperatorPoint& base_point() const noexcept { return point_; }
  const CMatrix& basis() const noexcept { return basis_; }
  Eigen::Index dim() const noexcept { return basis_.cols(); }

  /// -B^+ x B.
  CMatrix spin_gram() const;
  /// Positive and negative inertia of the spin Gram matrix.
  std::pair<int, int> signature() const;

  /// pi_x as a dense f x f matrix.
  CMatrix projector() const;
  /// pi_x u as a Hilbert vector.
  CVector project(const CVector& u) const;
  /// Coordinates B^+ u of pi_x u in this basis.
  CVector coordinates(const CVector& u) const;

 private:
  SpinSpace(OperatorPoint x, CMatrix basis);

  OperatorPoint point_;
  CMatrix basis_;
};

/// Spin space of x. Throws RankToleranceAmbiguity when the smallest retained
/// eigenvalue sits within a factor 10 of the truncation threshold `tol`.
SpinSpace spin_projector(const OperatorPoint& x, double tol = kRankTolerance);

/// -<u|x v>. Throws NotInSpinSpace if u or v leaves S_x by more than tol.
complex spin_product(const SpinSpace& space, const CVector& u, const CVector& v,
                     double tol = 1e-10);

/// psi^u(x) = pi_x u in the basis of `space`.
CVector physical_wave_function(const CVector& u, const SpinSpace& space);

/// P(x,y) : S_y -> S_x as a matrix between the two bases, with both spin
/// Gram matrices.
struct KernelMatrix {
  CMatrix entries;      // dim S_x rows, dim S_y columns
  CMatrix target_gram;  // spin products on S_x
  CMatrix source_gram;  // spin products on S_y
};

/// pi_x y restricted to S_y.
KernelMatrix fermionic_kernel(const SpinSpace& x, const SpinSpace& y);

/// -sum_l psi^{u_l}(x) <psi^{u_l}(y)| . >_y over the columns u_l of an
/// orthonormal Hilbert basis.
KernelMatrix fermionic_kernel_mode_sum(const SpinSpace& x, const SpinSpace& y,
                                       const CMatrix& hilbert_basis);

/// Adjoint with respect to the spin scalar products: G_y^{-1} K^+ G_x.
CMatrix spin_adjoint(const KernelMatrix& kernel);

struct ClosedChain {
  CMatrix matrix;  // A_xy on S_x
  EigenvalueList eigenvalues;
  double solver_cross_check = 0.0;
  bool solver_flagged = false;
};

/// A_xy = P(x,y) P(y,x) and its eigenvalues padded to 2n. Both solver
/// routes run; disagreement above 1e-6 relative sets `solver_flagged`.
ClosedChain closed_chain(const SpinSpace& x, const SpinSpace& y);
ClosedChain closed_chain(const OperatorPoint& x, const OperatorPoint& y);

/// det <a_i|b_j> for two orthonormal f-tuples stored as columns. Throws
/// NonOrthonormalInput otherwise.
complex hartree_fock_overlap(const CMatrix& basis_a, const CMatrix& basis_b, double tol = 1e-10);

}  // namespace cfs
