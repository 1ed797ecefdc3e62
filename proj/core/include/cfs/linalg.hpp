#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace cfs {

using complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

namespace linalg {

/// Eigenvalues of a small dense (possibly non-normal) complex matrix.
struct SmallEigenResult {
  std::vector<complex> values;
  // Largest relative disagreement between the Schur route and the
  // characteristic-polynomial route, when both ran.
  double cross_check = 0.0;
  bool used_fallback = false;
  bool flagged = false;
};

/// Diagonal similarity scaling (Parlett-Reinsch) that equalizes row and
/// column norms. Returns the balanced matrix; eigenvalues are unchanged.
CMatrix balance(const CMatrix& a);

/// Coefficients c[0..d] of det(t - A) = t^d + c[d-1] t^(d-1) + ... + c[0],
/// via the Faddeev-LeVerrier recursion.
std::vector<complex> characteristic_polynomial(const CMatrix& a);

/// Roots of a monic polynomial given by its low-order coefficients
/// (Aberth-Ehrlich iteration). Throws EigenSolverFailure on non-convergence.
std::vector<complex> monic_roots(const std::vector<complex>& coeffs);

/// Balanced complex Schur eigenvalues with a characteristic-polynomial
/// fallback. With `cross_check` set both routes run and disagreements above
/// 1e-6 relative are flagged.
SmallEigenResult small_eigenvalues(const CMatrix& a, bool cross_check = false);

/// Minimal distance between two equally sized multisets of complex numbers
/// under the best matching (exact for size <= 8, greedy beyond).
double multiset_distance(const std::vector<complex>& a, const std::vector<complex>& b);

}  // namespace linalg
}  // namespace cfs
