#include "cfs/vacuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cfs/errors.hpp"
#include "cfs/geometry.hpp"
#include "cfs/linalg.hpp"
#include "cfs/parallel.hpp"

namespace cfs {
namespace {

constexpr std::array<double, 4> kMetric{1.0, -1.0, -1.0, -1.0};

Causality minkowski_class(const FourVector& xi, double xi_sq, double tol) {
  double euclid = 0.0;
  for (double v : xi) euclid += v * v;
  if (xi_sq > tol * euclid) return Causality::Timelike;
  if (xi_sq < -tol * euclid) return Causality::Spacelike;
  return Causality::Lightlike;
}

}  // namespace

CliffordDecomposition decompose_kernel(const SpinorMatrix& kernel, const FourVector& xi,
                                       const DecompositionOptions& opts) {
  double euclid = 0.0;
  for (double v : xi) euclid += v * v;
  if (euclid == 0.0) throw Error(ErrorCode::InvalidArgument, "xi must be nonzero");

  const auto& g = dirac_matrices();
  CliffordDecomposition dec;
  dec.xi = xi;
  dec.xi_sq = minkowski_square(xi);
  dec.beta = kernel.trace() / 4.0;

  SpinorMatrix rebuilt = dec.beta * SpinorMatrix::Identity();
  for (int j = 0; j < 4; ++j) {
    // Tr(gamma^j gamma^k) = 4 eta^{jk}
    dec.vector_component[j] = kMetric[j] * (g[j] * kernel).trace() / 4.0;
    rebuilt += dec.vector_component[j] * g[j];
  }
  dec.residual = (kernel - rebuilt).norm();
  dec.kernel_norm = kernel.norm();

  std::array<double, 4> xi_lower{};
  for (int j = 0; j < 4; ++j) xi_lower[j] = kMetric[j] * xi[j];

  dec.degenerate_xi = std::abs(dec.xi_sq) <= opts.lightlike_tol * euclid;
  complex num = 0.0;
  if (!dec.degenerate_xi) {
    for (int j = 0; j < 4; ++j) num += dec.vector_component[j] * xi[j];
    dec.alpha = num / dec.xi_sq;
  } else {
    for (int j = 0; j < 4; ++j) num += dec.vector_component[j] * xi_lower[j];
    dec.alpha = num / euclid;
  }

  double c_norm = 0.0;
  double off = 0.0;
  for (int j = 0; j < 4; ++j) {
    c_norm += std::norm(dec.vector_component[j]);
    off += std::norm(dec.vector_component[j] - dec.alpha * xi_lower[j]);
  }
  dec.misalignment = c_norm > 0.0 ? std::sqrt(off / c_norm) : 0.0;

  dec.valid = !dec.degenerate_xi && dec.residual <= opts.residual_tol * dec.kernel_norm &&
              dec.misalignment <= opts.misalignment_tol;
  return dec;
}

ChainInvariants chain_invariants(const CliffordDecomposition& dec) {
  ChainInvariants inv;
  inv.a = 2.0 * (dec.alpha * std::conj(dec.beta)).real();
  inv.b = std::norm(dec.alpha) * dec.xi_sq + std::norm(dec.beta);
  inv.xi_sq = dec.xi_sq;
  return inv;
}

EigenvalueList chain_eigenvalue_formula(const CliffordDecomposition& dec) {
  const ChainInvariants inv = chain_invariants(dec);
  const complex s = std::sqrt(complex(inv.a * inv.a * inv.xi_sq, 0.0));
  return EigenvalueList(2, {inv.b + s, inv.b + s, inv.b - s, inv.b - s});
}

std::vector<PointPair> all_pairs(std::size_t point_count) {
  std::vector<PointPair> pairs;
  pairs.reserve(point_count * point_count);
  for (std::size_t x = 0; x < point_count; ++x) {
    for (std::size_t y = 0; y < point_count; ++y) pairs.push_back({x, y});
  }
  return pairs;
}

std::vector<PointPair> sample_pairs(std::size_t point_count, std::size_t count, std::uint64_t seed) {
  if (point_count == 0) throw Error(ErrorCode::EmptySample, "no points to sample from");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, point_count - 1);
  std::vector<PointPair> pairs(count);
  for (auto& p : pairs) {
    p.x = pick(rng);
    p.y = pick(rng);
  }
  return pairs;
}

AuditReport causality_audit(const LatticeSeaSystem& sys, std::span<const PointPair> pairs,
                            const AuditOptions& opts) {
  if (pairs.empty()) throw Error(ErrorCode::EmptySample, "no pairs to audit");
  const LatticeSpec& spec = sys.spec();
  for (const auto& p : pairs) {
    if (p.x >= sys.point_count() || p.y >= sys.point_count()) {
      throw Error(ErrorCode::InvalidArgument, "pair index outside the lattice");
    }
  }

  AuditReport report;
  report.rows.resize(pairs.size());
  parallel_for(pairs.size(), opts.threads, [&](std::size_t r) {
    const PointPair pair = pairs[r];
    AuditRow& row = report.rows[r];
    row.pair = pair;
    row.xi = separation(spec, pair.x, pair.y);
    row.xi_sq = minkowski_square(row.xi);
    const double spatial = std::sqrt(row.xi[1] * row.xi[1] + row.xi[2] * row.xi[2] + row.xi[3] * row.xi[3]);
    row.in_band = std::abs(std::abs(row.xi[0]) - spatial) <= opts.band_multiplier * spec.eps;
    row.minkowski = minkowski_class(row.xi, row.xi_sq, opts.decomposition.lightlike_tol);

    const ClosedChain chain = [&] {
      try {
        return closed_chain(sys.operator_at(pair.x), sys.operator_at(pair.y));
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " at pair (" + std::to_string(pair.x) + ", " +
                                  std::to_string(pair.y) + ")");
      }
    }();
    row.spectral = classify_causality(chain.eigenvalues, opts.class_tol);
    row.lagrangian = lagrangian(chain.eigenvalues);
    row.solver_flagged = chain.solver_flagged;

    if (row.xi == FourVector{}) {
      row.eig_discrepancy = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    const CliffordDecomposition dec =
        decompose_kernel(sys.spinor_kernel(pair.x, pair.y), row.xi, opts.decomposition);
    row.clifford_residual = dec.kernel_norm > 0.0 ? dec.residual / dec.kernel_norm : 0.0;
    row.misalignment = dec.misalignment;
    row.decomposition_valid = dec.valid;

    const EigenvalueList predicted = chain_eigenvalue_formula(dec);
    const auto numeric = chain.eigenvalues.values();
    const auto formula = predicted.values();
    double scale = 0.0;
    for (const auto& v : numeric) scale = std::max(scale, std::abs(v));
    const double diff = linalg::multiset_distance({numeric.begin(), numeric.end()},
                                                  {formula.begin(), formula.end()});
    row.eig_discrepancy = scale > 0.0 ? diff / scale : diff;
  });

  AuditSummary& s = report.summary;
  s.total = report.rows.size();
  for (const auto& row : report.rows) {
    if (row.solver_flagged) ++s.solver_flagged;
    s.max_clifford_residual = std::max(s.max_clifford_residual, row.clifford_residual);
    if (row.decomposition_valid) {
      ++s.valid_decompositions;
      s.max_valid_discrepancy = std::max(s.max_valid_discrepancy, row.eig_discrepancy);
    }
    if (row.in_band) {
      ++s.in_band;
      continue;
    }
    ++s.out_of_band;
    const bool agree = row.spectral == row.minkowski;
    if (agree) ++s.agreements;
    if (row.minkowski == Causality::Timelike) {
      ++s.timelike_out_of_band;
      if (agree) ++s.timelike_agreements;
    } else if (row.minkowski == Causality::Spacelike) {
      ++s.spacelike_out_of_band;
      if (agree) ++s.spacelike_agreements;
    }
  }
  return report;
}

}  // namespace cfs
