#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

namespace cfs {

/// The 2n non-trivial eigenvalues of an operator product xy, zero-padded when
/// the product has lower rank.
class EigenvalueList {
 public:
  EigenvalueList(int spin_dim, std::vector<std::complex<double>> values);

  /// Pads `nontrivial` with zeros up to length 2n. Throws if it is longer.
  static EigenvalueList padded(int spin_dim, std::vector<std::complex<double>> nontrivial);

  int spin_dim() const noexcept { return spin_dim_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const std::complex<double>> values() const noexcept { return values_; }
  const std::complex<double>& operator[](std::size_t i) const { return values_[i]; }

 private:
  int spin_dim_;
  std::vector<std::complex<double>> values_;
};

enum class Causality { Spacelike, Timelike, Lightlike };

std::string_view to_string(Causality c) noexcept;

/// Sum of absolute values, |xy|.
double spectral_weight(const EigenvalueList& ev);

/// |(xy)^2| - (1/2n) |xy|^2.
double lagrangian(const EigenvalueList& ev);

/// (1/4n) sum_{i,j} (|l_i| - |l_j|)^2. Same value as lagrangian(); kept as
/// a separate route for cross-checking.
double lagrangian_variance_form(const EigenvalueList& ev);

/// |xy|^2, the integrand of the boundedness functional.
double boundedness_integrand(const EigenvalueList& ev);

inline constexpr double kCausalityAbsFloor = 1e-12;

/// Spacelike if all moduli agree to `tol` relative to the largest modulus
/// (or everything is below `abs_floor`), otherwise timelike if every
/// imaginary part is below tol * max modulus, otherwise lightlike.
/// Throws InvalidArgument unless 0 < tol < 1.
Causality classify_causality(const EigenvalueList& ev, double tol,
                             double abs_floor = kCausalityAbsFloor);

}  // namespace cfs
