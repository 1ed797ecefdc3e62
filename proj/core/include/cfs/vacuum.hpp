#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cfs/diracsea.hpp"
#include "cfs/spectral.hpp"

namespace cfs {

struct DecompositionOptions {
  double residual_tol = 1e-8;       // relative to ||P||
  double misalignment_tol = 1e-6;   // ||c - alpha xi|| / ||c||
  double lightlike_tol = 1e-10;     // |xi^2| below this times |xi|_E^2 counts as null
};

/// P = c_j gamma^j + beta 1 with c fitted as alpha xi.
struct CliffordDecomposition {
  FourVector xi{};
  double xi_sq = 0.0;
  complex alpha = 0.0;
  complex beta = 0.0;
  std::array<complex, 4> vector_component{};  // covariant c_j
  double residual = 0.0;     // ||P - (c_j gamma^j + beta)||_F
  double kernel_norm = 0.0;  // ||P||_F
  double misalignment = 0.0;
  bool degenerate_xi = false;
  bool valid = false;
};

/// beta = Tr(P)/4, c_j = eta_jk Tr(gamma^k P)/4, alpha = <c,xi>/<xi,xi> (a
/// Euclidean least-squares fit along xi when xi is null). Throws
/// InvalidArgument for xi = 0; a null xi only clears the validity flag.
CliffordDecomposition decompose_kernel(const SpinorMatrix& kernel, const FourVector& xi,
                                       const DecompositionOptions& opts = {});

struct ChainInvariants {
  double a = 0.0;  // alpha beta-bar + beta alpha-bar
  double b = 0.0;  // |alpha|^2 xi^2 + |beta|^2
  double xi_sq = 0.0;
};

ChainInvariants chain_invariants(const CliffordDecomposition& dec);

/// {b + s, b + s, b - s, b - s} with s the principal square root of a^2 xi^2.
EigenvalueList chain_eigenvalue_formula(const CliffordDecomposition& dec);

struct PointPair {
  std::size_t x = 0;
  std::size_t y = 0;
};

/// Every ordered pair (x, y), x-major.
std::vector<PointPair> all_pairs(std::size_t point_count);

/// `count` uniformly drawn ordered pairs from a seeded mt19937_64.
std::vector<PointPair> sample_pairs(std::size_t point_count, std::size_t count, std::uint64_t seed);

struct AuditOptions {
  double band_multiplier = 3.0;
  double class_tol = 1e-6;
  int threads = 1;
  DecompositionOptions decomposition;
};

struct AuditRow {
  PointPair pair;
  FourVector xi{};
  double xi_sq = 0.0;
  Causality spectral = Causality::Spacelike;
  Causality minkowski = Causality::Lightlike;
  double lagrangian = 0.0;
  double eig_discrepancy = 0.0;  // NaN when xi = 0
  double clifford_residual = 0.0;  // relative to ||P||
  double misalignment = 0.0;
  bool in_band = false;
  bool decomposition_valid = false;
  bool solver_flagged = false;
};

struct AuditSummary {
  std::size_t total = 0;
  std::size_t in_band = 0;
  std::size_t out_of_band = 0;
  std::size_t agreements = 0;  // out-of-band rows only
  std::size_t valid_decompositions = 0;
  std::size_t solver_flagged = 0;
  std::size_t timelike_out_of_band = 0;
  std::size_t spacelike_out_of_band = 0;
  std::size_t timelike_agreements = 0;
  std::size_t spacelike_agreements = 0;
  double max_valid_discrepancy = 0.0;
  double max_clifford_residual = 0.0;

  double agreement_rate() const {
    return out_of_band ? static_cast<double>(agreements) / static_cast<double>(out_of_band) : 0.0;
  }
};

struct AuditReport {
  std::vector<AuditRow> rows;  // in input pair order
  AuditSummary summary;
};

/// For each pair: the spectral class from the closed chain of F(x), F(y), the
/// Minkowski class from sign(xi^2), the Clifford decomposition of the spinor
/// kernel and the formula-vs-numerics eigenvalue discrepancy. Pairs with
/// ||xi^0| - |xi|| <= K eps are kept but excluded from the agreement rate.
/// Throws EmptySample for an empty pair list.
AuditReport causality_audit(const LatticeSeaSystem& sys, std::span<const PointPair> pairs,
                            const AuditOptions& opts = {});

}  // namespace cfs
