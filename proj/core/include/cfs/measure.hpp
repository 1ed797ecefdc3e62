#pragma once

#include <vector>

#include "cfs/opspace.hpp"

namespace cfs {

struct Atom {
  OperatorPoint point;
  double weight;
};

/// A universal measure with finite support. Its support is space-time M.
class DiscreteMeasure {
 public:
  /// Throws InvalidArgument on non-positive weights, mismatched dimensions or
  /// duplicate support points (operator distance <= 1e-10).
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  /// Push-forward of a weighted point list: atoms whose operators coincide
  /// (distance <= 1e-10) are merged and their weights added. When given,
  /// `atom_of_input[k]` receives the atom index that input k landed in.
  static DiscreteMeasure push_forward(std::vector<Atom> points,
                                      std::vector<std::size_t>* atom_of_input = nullptr);

  std::size_t size() const noexcept { return atoms_.size(); }
  bool empty() const noexcept { return atoms_.empty(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  auto begin() const noexcept { return atoms_.begin(); }
  auto end() const noexcept { return atoms_.end(); }

  int spin_dim() const;
  Eigen::Index hilbert_dim() const;

  DiscreteMeasure with_weights_scaled(double c) const;
  DiscreteMeasure conjugated(const CMatrix& unitary) const;

 private:
  std::vector<Atom> atoms_;
};

struct SweepOptions {
  int threads = 1;
  // Evaluate only i <= j and double the off-diagonal terms.
  bool use_symmetry = false;
};

/// rho(F) = sum of weights (compensated summation).
double total_volume(const DiscreteMeasure& rho);

/// sum_i w_i tr(x_i).
double trace_integral(const DiscreteMeasure& rho);

/// S = sum_{i,j} w_i w_j L(x_i, x_j), diagonal included. Row partial sums are
/// combined in index order, so the result does not depend on `threads`.
double causal_action(const DiscreteMeasure& rho, const SweepOptions& opts = {});

/// T = sum_{i,j} w_i w_j |x_i x_j|^2.
double boundedness_functional(const DiscreteMeasure& rho, const SweepOptions& opts = {});

struct ActionSummary {
  double action;
  double boundedness;
  double volume;
  double trace;
};

/// All four functionals; S and T share one pair sweep.
ActionSummary evaluate_functionals(const DiscreteMeasure& rho, const SweepOptions& opts = {});

}  // namespace cfs
