#include "cfs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cfs/errors.hpp"

namespace cfs::linalg {
namespace {

double l1(const complex& z) { return std::abs(z.real()) + std::abs(z.imag()); }

bool all_finite(const std::vector<complex>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const complex& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

complex horner(const std::vector<complex>& coeffs, complex z, complex* derivative) {
  // coeffs holds c[0..d-1] of a monic polynomial of degree d.
  complex p = 1.0;
  complex dp = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) {
    dp = dp * z + p;
    p = p * z + coeffs[k];
  }
  *derivative = dp;
  return p;
}

}  // namespace

CMatrix balance(const CMatrix& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  CMatrix b = a;
  const Eigen::Index n = b.rows();
  bool done = false;
  for (int sweep = 0; !done && sweep < 100; ++sweep) {
    done = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      double r = 0.0;
      double c = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (j == i) continue;
        c += l1(b(j, i));
        r += l1(b(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        b.row(i) /= f;
        b.col(i) *= f;
      }
    }
  }
  return b;
}

std::vector<complex> characteristic_polynomial(const CMatrix& a) {
  const Eigen::Index d = a.rows();
  std::vector<complex> coeffs(static_cast<std::size_t>(d), 0.0);
  CMatrix m = CMatrix::Zero(d, d);
  complex prev = 1.0;  // c_{d-k+1}, starting with the leading coefficient
  for (Eigen::Index k = 1; k <= d; ++k) {
    m = a * m;
    m.diagonal().array() += prev;
    const complex ck = -(a * m).trace() / static_cast<double>(k);
    coeffs[static_cast<std::size_t>(d - k)] = ck;
    prev = ck;
  }
  return coeffs;
}

std::vector<complex> monic_roots(const std::vector<complex>& coeffs) {
  const std::size_t d = coeffs.size();
  if (d == 0) return {};
  if (d == 1) return {-coeffs[0]};

  double bound = 0.0;
  for (const auto& c : coeffs) bound = std::max(bound, std::abs(c));
  const double radius = 1.0 + bound;

  std::vector<complex> z(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double angle = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(d) + 0.4;
    z[k] = std::polar(0.5 * radius, angle);
  }

  // Stop once every root is a root of a polynomial within a few ulps of the
  // input (backward-error test); clustered roots never reach a small step.
  auto converged = [&] {
    for (const auto& zk : z) {
      complex dp;
      const double residual = std::abs(horner(coeffs, zk, &dp));
      double magnitude = 1.0;
      double power = 1.0;
      const double r = std::abs(zk);
      for (std::size_t k = coeffs.size(); k-- > 0;) {
        magnitude = magnitude * r + std::abs(coeffs[k]);
        power *= r;
      }
      if (residual > 32.0 * std::numeric_limits<double>::epsilon() * std::max(magnitude, power)) {
        return false;
      }
    }
    return true;
  };

  for (int iter = 0; iter < 500; ++iter) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      complex dp;
      const complex p = horner(coeffs, z[k], &dp);
      if (p == 0.0) continue;
      const complex ratio = p / dp;
      complex repulsion = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      }
      const complex step = ratio / (1.0 - ratio * repulsion);
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[k])));
    }
    if (!all_finite(z)) break;
    if (max_step < 1e-15 || converged()) return z;
  }
  if (!all_finite(z)) {
    throw Error(ErrorCode::EigenSolverFailure, "polynomial root iteration diverged");
  }
  throw Error(ErrorCode::EigenSolverFailure, "polynomial root iteration did not converge");
}

SmallEigenResult small_eigenvalues(const CMatrix& a, bool cross_check) {
  SmallEigenResult result;
  if (a.rows() == 0) return result;
  if (!a.allFinite()) {
    throw Error(ErrorCode::EigenSolverFailure, "matrix has non-finite entries");
  }

  const CMatrix balanced = balance(a);
  Eigen::ComplexEigenSolver<CMatrix> solver(balanced, /*computeEigenvectors=*/false);
  bool schur_ok = solver.info() == Eigen::Success;
  if (schur_ok) {
    const auto& ev = solver.eigenvalues();
    result.values.assign(ev.data(), ev.data() + ev.size());
    schur_ok = all_finite(result.values);
  }

  if (!schur_ok) {
    result.values = monic_roots(characteristic_polynomial(balanced));
    result.used_fallback = true;
  } else if (cross_check) {
    std::vector<complex> roots;
    try {
      roots = monic_roots(characteristic_polynomial(balanced));
    } catch (const Error&) {
      result.cross_check = std::numeric_limits<double>::infinity();
      result.flagged = true;
      return result;
    }
    double scale = 0.0;
    for (const auto& v : result.values) scale = std::max(scale, std::abs(v));
    const double diff = multiset_distance(result.values, roots);
    result.cross_check = scale > 0.0 ? diff / scale : diff;
    result.flagged = result.cross_check > 1e-6;
  }
  return result;
}

double multiset_distance(const std::vector<complex>& a, const std::vector<complex>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "multiset_distance: size mismatch");
  }
  const std::size_t n = a.size();
  if (n == 0) return 0.0;

  if (n <= 6) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (std::size_t i = 0; i < n && worst < best; ++i) {
        worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
      }
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }

  std::vector<bool> used(n, false);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pick = n;
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double d = std::abs(a[i] - b[j]);
      if (d < dist) {
        dist = d;
        pick = j;
      }
    }
    used[pick] = true;
    worst = std::max(worst, dist);
  }
  return worst;
}

}  // namespace cfs::linalg
