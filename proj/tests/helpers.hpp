#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cfs/errors.hpp"
#include "cfs/opspace.hpp"

namespace testing {

/// Error code raised by `fn`, or nullopt if it returned normally.
template <class Fn>
std::optional<cfs::ErrorCode> error_of(Fn&& fn) {
  try {
    fn();
  } catch (const cfs::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline cfs::OperatorPoint diagonal_point(const std::vector<double>& diag, int spin_dim) {
  const auto f = static_cast<Eigen::Index>(diag.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(f, f);
  for (Eigen::Index i = 0; i < f; ++i) m(i, i) = diag[i];
  return cfs::verify_membership(m, spin_dim);
}

inline double max_abs(std::span<const std::complex<double>> v) {
  double m = 0.0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace testing
