#include "cfs/opspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cfs/errors.hpp"

namespace cfs {
namespace {

constexpr double kOrthonormalityTol = 1e-10;

void require_compatible(const OperatorPoint& x, const OperatorPoint& y) {
  if (x.hilbert_dim() != y.hilbert_dim() || x.spin_dim() != y.spin_dim()) {
    throw Error(ErrorCode::InvalidArgument,
                "operators live on different Hilbert spaces or spin dimensions");
  }
}

}  // namespace

OperatorPoint::OperatorPoint(CMatrix factors, RVector spectrum, int spin_dim)
    : factors_(std::move(factors)), spectrum_(std::move(spectrum)), spin_dim_(spin_dim) {
  if (spin_dim_ < 1) throw Error(ErrorCode::InvalidArgument, "spin dimension must be positive");
  if (factors_.cols() != spectrum_.size()) {
    throw Error(ErrorCode::InvalidArgument, "factor count does not match spectrum length");
  }
  if (!factors_.allFinite() || !spectrum_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "operator data has non-finite entries");
  }
  for (Eigen::Index a = 0; a < spectrum_.size(); ++a) {
    if (spectrum_[a] == 0.0) {
      throw Error(ErrorCode::InvalidArgument, "spectrum entries of the factored form must be nonzero");
    }
  }
  const auto [pos, neg] = signature();
  if (pos > spin_dim_ || neg > spin_dim_) {
    throw Error(ErrorCode::SignatureViolation,
                std::to_string(pos) + " positive / " + std::to_string(neg) +
                    " negative eigenvalues exceed n = " + std::to_string(spin_dim_));
  }
  if (rank() > 0) {
    const CMatrix gram = factors_.adjoint() * factors_;
    const double defect = (gram - CMatrix::Identity(rank(), rank())).cwiseAbs().maxCoeff();
    if (defect > kOrthonormalityTol) {
      throw Error(ErrorCode::InvalidArgument,
                  "factor vectors are not orthonormal (defect " + std::to_string(defect) + ")");
    }
  }
}

OperatorPoint OperatorPoint::zero(Eigen::Index hilbert_dim, int spin_dim) {
  return OperatorPoint(CMatrix(hilbert_dim, 0), RVector(0), spin_dim);
}

std::pair<int, int> OperatorPoint::signature() const {
  int pos = 0;
  int neg = 0;
  for (Eigen::Index a = 0; a < spectrum_.size(); ++a) {
    if (spectrum_[a] > 0.0) {
      ++pos;
    } else {
      ++neg;
    }
  }
  return {pos, neg};
}

CMatrix OperatorPoint::dense() const {
  return factors_ * spectrum_.cast<complex>().asDiagonal() * factors_.adjoint();
}

CVector OperatorPoint::apply(const CVector& v) const {
  const CVector coords = factors_.adjoint() * v;
  return factors_ * (spectrum_.cast<complex>().asDiagonal() * coords);
}

OperatorPoint OperatorPoint::conjugated(const CMatrix& unitary) const {
  return OperatorPoint(unitary * factors_, spectrum_, spin_dim_);
}

OperatorPoint OperatorPoint::scaled(double s) const {
  if (s == 0.0) return zero(hilbert_dim(), spin_dim_);
  return OperatorPoint(factors_, spectrum_ * s, spin_dim_);
}

OperatorPoint verify_membership(const CMatrix& matrix, int spin_dim, double tol) {
  if (matrix.rows() != matrix.cols()) {
    throw Error(ErrorCode::InvalidArgument, "candidate operator is not square");
  }
  const Eigen::Index f = matrix.rows();
  if (f == 0) return OperatorPoint::zero(0, spin_dim);

  const double entry_scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  const double asymmetry = (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
  if (asymmetry > tol * entry_scale) {
    throw Error(ErrorCode::NotSelfAdjoint,
                "max asymmetry " + std::to_string(asymmetry) + " exceeds tolerance");
  }

  const CMatrix hermitian = 0.5 * (matrix + matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenSolverFailure, "Hermitian eigensolver did not converge");
  }
  const RVector& evals = solver.eigenvalues();
  const double norm = evals.cwiseAbs().maxCoeff();

  std::vector<Eigen::Index> kept;
  int pos = 0;
  int neg = 0;
  for (Eigen::Index a = 0; a < f; ++a) {
    if (std::abs(evals[a]) > tol * norm && norm > 0.0) {
      kept.push_back(a);
      (evals[a] > 0.0 ? pos : neg) += 1;
    }
  }
  if (pos > spin_dim || neg > spin_dim) {
    throw Error(ErrorCode::SignatureViolation,
                std::to_string(pos) + " positive / " + std::to_string(neg) +
                    " negative eigenvalues exceed n = " + std::to_string(spin_dim));
  }
  if (static_cast<int>(kept.size()) > 2 * spin_dim) {
    throw Error(ErrorCode::RankViolation, "rank exceeds 2n");
  }

  const auto r = static_cast<Eigen::Index>(kept.size());
  CMatrix factors(f, r);
  RVector spectrum(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    factors.col(k) = solver.eigenvectors().col(kept[static_cast<std::size_t>(k)]);
    spectrum[k] = evals[kept[static_cast<std::size_t>(k)]];
  }
  return OperatorPoint(std::move(factors), std::move(spectrum), spin_dim);
}

EigenvalueList product_eigenvalues(const OperatorPoint& x, const OperatorPoint& y) {
  require_compatible(x, y);
  const int n = x.spin_dim();
  if (x.rank() == 0 || y.rank() == 0) return EigenvalueList::padded(n, {});

  // xy = E_x (D_x E_x^+ E_y D_y E_y^+) shares its non-trivial spectrum with
  // D_x G D_y G^+ where G = E_x^+ E_y.
  const CMatrix gram = x.factors().adjoint() * y.factors();
  const CMatrix reduced = x.spectrum().cast<complex>().asDiagonal() * gram *
                          y.spectrum().cast<complex>().asDiagonal() * gram.adjoint();
  auto result = linalg::small_eigenvalues(reduced);
  return EigenvalueList::padded(n, std::move(result.values));
}

double operator_trace(const OperatorPoint& x) { return x.spectrum().sum(); }

double operator_distance(const OperatorPoint& x, const OperatorPoint& y) {
  require_compatible(x, y);
  const Eigen::Index rx = x.rank();
  const Eigen::Index ry = y.rank();
  if (rx + ry == 0) return 0.0;

  // x - y = W diag(D_x, -D_y) W^+ with W = [E_x E_y]; with W = QR the
  // Frobenius norm is that of R D R^+, which avoids the cancellation in
  // ||x||^2 + ||y||^2 - 2 Re tr(xy).
  CMatrix w(x.hilbert_dim(), rx + ry);
  w << x.factors(), y.factors();
  RVector d(rx + ry);
  d << x.spectrum(), -y.spectrum();

  Eigen::HouseholderQR<CMatrix> qr(w);
  const Eigen::Index k = std::min(w.rows(), w.cols());
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return (r * d.cast<complex>().asDiagonal() * r.adjoint()).norm();
}

}  // namespace cfs
