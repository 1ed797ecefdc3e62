#include "cfs/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "cfs/errors.hpp"

namespace cfs {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotSelfAdjoint: return "NotSelfAdjoint";
    case ErrorCode::SignatureViolation: return "SignatureViolation";
    case ErrorCode::RankViolation: return "RankViolation";
    case ErrorCode::EigenSolverFailure: return "EigenSolverFailure";
    case ErrorCode::MassShellFailure: return "MassShellFailure";
    case ErrorCode::SliceMismatch: return "SliceMismatch";
    case ErrorCode::NotInSpinSpace: return "NotInSpinSpace";
    case ErrorCode::RankToleranceAmbiguity: return "RankToleranceAmbiguity";
    case ErrorCode::NonOrthonormalInput: return "NonOrthonormalInput";
    case ErrorCode::InfeasibleTrace: return "InfeasibleTrace";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::EmptySample: return "EmptySample";
  }
  return "Unknown";
}

std::string_view to_string(Causality c) noexcept {
  switch (c) {
    case Causality::Spacelike: return "spacelike";
    case Causality::Timelike: return "timelike";
    case Causality::Lightlike: return "lightlike";
  }
  return "unknown";
}

EigenvalueList::EigenvalueList(int spin_dim, std::vector<std::complex<double>> values)
    : spin_dim_(spin_dim), values_(std::move(values)) {
  if (spin_dim_ < 1) {
    throw Error(ErrorCode::InvalidArgument, "spin dimension must be positive");
  }
  if (values_.size() != static_cast<std::size_t>(2 * spin_dim_)) {
    throw Error(ErrorCode::InvalidArgument,
                "eigenvalue list must hold exactly 2n = " + std::to_string(2 * spin_dim_) +
                    " entries, got " + std::to_string(values_.size()));
  }
}

EigenvalueList EigenvalueList::padded(int spin_dim, std::vector<std::complex<double>> nontrivial) {
  if (spin_dim < 1) {
    throw Error(ErrorCode::InvalidArgument, "spin dimension must be positive");
  }
  const auto target = static_cast<std::size_t>(2 * spin_dim);
  if (nontrivial.size() > target) {
    throw Error(ErrorCode::RankViolation, "product has more than 2n non-trivial eigenvalues");
  }
  nontrivial.resize(target, 0.0);
  return EigenvalueList(spin_dim, std::move(nontrivial));
}

double spectral_weight(const EigenvalueList& ev) {
  double sum = 0.0;
  for (const auto& v : ev.values()) sum += std::abs(v);
  return sum;
}

double lagrangian(const EigenvalueList& ev) {
  double sum_sq = 0.0;
  double sum = 0.0;
  for (const auto& v : ev.values()) {
    const double m = std::abs(v);
    sum += m;
    sum_sq += m * m;
  }
  const double value = sum_sq - sum * sum / (2.0 * ev.spin_dim());
  // The closed form can dip below zero by roundoff when all moduli agree.
  return std::max(value, 0.0);
}

double lagrangian_variance_form(const EigenvalueList& ev) {
  const auto vals = ev.values();
  double total = 0.0;
  for (const auto& a : vals) {
    const double ma = std::abs(a);
    for (const auto& b : vals) {
      const double d = ma - std::abs(b);
      total += d * d;
    }
  }
  return total / (4.0 * ev.spin_dim());
}

double boundedness_integrand(const EigenvalueList& ev) {
  const double w = spectral_weight(ev);
  return w * w;
}

Causality classify_causality(const EigenvalueList& ev, double tol, double abs_floor) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "causality tolerance must lie in (0, 1)");
  }
  double max_mod = 0.0;
  double min_mod = std::numeric_limits<double>::infinity();
  for (const auto& v : ev.values()) {
    const double m = std::abs(v);
    max_mod = std::max(max_mod, m);
    min_mod = std::min(min_mod, m);
  }
  if (max_mod <= abs_floor) return Causality::Spacelike;
  if (max_mod - min_mod <= tol * max_mod) return Causality::Spacelike;

  const bool all_real = std::all_of(ev.values().begin(), ev.values().end(), [&](const auto& v) {
    return std::abs(v.imag()) <= tol * max_mod;
  });
  return all_real ? Causality::Timelike : Causality::Lightlike;
}

}  // namespace cfs
