#include "cfs/geometry.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cfs/errors.hpp"
#include "cfs/linalg.hpp"

namespace cfs {
namespace {

void require_same_space(const OperatorPoint& x, const OperatorPoint& y) {
  if (x.hilbert_dim() != y.hilbert_dim() || x.spin_dim() != y.spin_dim()) {
    throw Error(ErrorCode::InvalidArgument, "points live on different Hilbert spaces");
  }
}

CMatrix diag(const RVector& v) { return v.cast<complex>().asDiagonal(); }

// Matrix of pi_x y |_{S_y} between bases B_x and B_y: B_x^+ E_y D_y E_y^+ B_y.
CMatrix kernel_entries(const CMatrix& bx, const OperatorPoint& y, const CMatrix& by) {
  return (bx.adjoint() * y.factors()) * diag(y.spectrum()) * (y.factors().adjoint() * by);
}

ClosedChain finish_chain(CMatrix a, int spin_dim) {
  auto solved = linalg::small_eigenvalues(a, /*cross_check=*/true);
  ClosedChain chain{std::move(a), EigenvalueList::padded(spin_dim, std::move(solved.values)),
                    solved.cross_check, solved.flagged};
  return chain;
}

}  // namespace

SpinSpace::SpinSpace(OperatorPoint x) : point_(std::move(x)), basis_(point_.factors()) {}

SpinSpace::SpinSpace(OperatorPoint x, CMatrix basis) : point_(std::move(x)), basis_(std::move(basis)) {}

SpinSpace SpinSpace::with_basis_change(const CMatrix& change) const {
  if (change.rows() != dim() || change.cols() != dim()) {
    throw Error(ErrorCode::InvalidArgument, "basis change has the wrong size");
  }
  const double defect = (change.adjoint() * change - CMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  if (defect > 1e-10) throw Error(ErrorCode::NonOrthonormalInput, "basis change is not unitary");
  return SpinSpace(point_, basis_ * change);
}

CMatrix SpinSpace::spin_gram() const { return -kernel_entries(basis_, point_, basis_); }

std::pair<int, int> SpinSpace::signature() const {
  if (dim() == 0) return {0, 0};
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(spin_gram());
  const RVector& ev = solver.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  int p = 0;
  int q = 0;
  for (Eigen::Index a = 0; a < ev.size(); ++a) {
    if (ev[a] > kRankTolerance * scale) ++p;
    if (ev[a] < -kRankTolerance * scale) ++q;
  }
  return {p, q};
}

CMatrix SpinSpace::projector() const { return basis_ * basis_.adjoint(); }

CVector SpinSpace::project(const CVector& u) const { return basis_ * (basis_.adjoint() * u); }

CVector SpinSpace::coordinates(const CVector& u) const { return basis_.adjoint() * u; }

SpinSpace spin_projector(const OperatorPoint& x, double tol) {
  if (x.rank() > 0) {
    const RVector mags = x.spectrum().cwiseAbs();
    const double ratio = mags.minCoeff() / mags.maxCoeff();
    if (ratio <= 10.0 * tol) {
      throw Error(ErrorCode::RankToleranceAmbiguity,
                  "eigenvalue ratio " + std::to_string(ratio) + " straddles the rank threshold");
    }
  }
  return SpinSpace(x);
}

complex spin_product(const SpinSpace& space, const CVector& u, const CVector& v, double tol) {
  for (const CVector* w : {&u, &v}) {
    const double leak = (*w - space.project(*w)).norm();
    if (leak > tol * std::max(1.0, w->norm())) {
      throw Error(ErrorCode::NotInSpinSpace,
                  "vector leaves the spin space by " + std::to_string(leak));
    }
  }
  return -u.dot(space.base_point().apply(v));
}

CVector physical_wave_function(const CVector& u, const SpinSpace& space) {
  return space.coordinates(u);
}

KernelMatrix fermionic_kernel(const SpinSpace& x, const SpinSpace& y) {
  require_same_space(x.base_point(), y.base_point());
  return {kernel_entries(x.basis(), y.base_point(), y.basis()), x.spin_gram(), y.spin_gram()};
}

KernelMatrix fermionic_kernel_mode_sum(const SpinSpace& x, const SpinSpace& y,
                                       const CMatrix& hilbert_basis) {
  require_same_space(x.base_point(), y.base_point());
  const CMatrix gy = y.spin_gram();
  CMatrix entries = CMatrix::Zero(x.dim(), y.dim());
  for (Eigen::Index l = 0; l < hilbert_basis.cols(); ++l) {
    const CVector psi_x = physical_wave_function(hilbert_basis.col(l), x);
    const CVector psi_y = physical_wave_function(hilbert_basis.col(l), y);
    // <psi_y | phi>_y = psi_y^+ G_y phi as a row acting on coordinates of phi
    entries -= psi_x * (psi_y.adjoint() * gy);
  }
  return {entries, x.spin_gram(), gy};
}

CMatrix spin_adjoint(const KernelMatrix& kernel) {
  return kernel.source_gram.partialPivLu().solve(kernel.entries.adjoint() * kernel.target_gram);
}

ClosedChain closed_chain(const SpinSpace& x, const SpinSpace& y) {
  require_same_space(x.base_point(), y.base_point());
  const CMatrix pxy = kernel_entries(x.basis(), y.base_point(), y.basis());
  const CMatrix pyx = kernel_entries(y.basis(), x.base_point(), x.basis());
  return finish_chain(pxy * pyx, x.base_point().spin_dim());
}

ClosedChain closed_chain(const OperatorPoint& x, const OperatorPoint& y) {
  require_same_space(x, y);
  // In the eigenbases: P(x,y) = G D_y and P(y,x) = G^+ D_x with G = E_x^+ E_y.
  const CMatrix g = x.factors().adjoint() * y.factors();
  const CMatrix a = (g * diag(y.spectrum())) * (g.adjoint() * diag(x.spectrum()));
  return finish_chain(a, x.spin_dim());
}

complex hartree_fock_overlap(const CMatrix& basis_a, const CMatrix& basis_b, double tol) {
  if (basis_a.rows() != basis_b.rows() || basis_a.cols() != basis_b.cols()) {
    throw Error(ErrorCode::NonOrthonormalInput, "bases have different shapes");
  }
  const Eigen::Index f = basis_a.cols();
  for (const CMatrix* b : {&basis_a, &basis_b}) {
    const double defect = (b->adjoint() * *b - CMatrix::Identity(f, f)).cwiseAbs().maxCoeff();
    if (defect > tol) {
      throw Error(ErrorCode::NonOrthonormalInput,
                  "basis is not orthonormal (defect " + std::to_string(defect) + ")");
    }
  }
  return (basis_a.adjoint() * basis_b).determinant();
}

}  // namespace cfs
