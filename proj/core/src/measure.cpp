#include "cfs/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cfs/errors.hpp"
#include "cfs/parallel.hpp"

namespace cfs {
namespace {

constexpr double kDuplicateDistance = 1e-10;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Real linear functional p^+ x p for a fixed probe vector p. Coinciding
// operators give coinciding fingerprints; the converse is checked exactly.
double fingerprint(const OperatorPoint& x, const CVector& probe) {
  const CVector coords = x.factors().adjoint() * probe;
  double s = 0.0;
  for (Eigen::Index a = 0; a < coords.size(); ++a) s += x.spectrum()[a] * std::norm(coords[a]);
  return s;
}

CVector make_probe(Eigen::Index f) {
  CVector p(f);
  for (Eigen::Index k = 0; k < f; ++k) {
    const double t = static_cast<double>(k);
    p[k] = complex(std::cos(0.7 * t + 0.3), std::sin(1.3 * t + 0.1));
  }
  return p;
}

// Groups of indices whose operators are within kDuplicateDistance.
// Returns, for every atom, the smallest index of its group.
std::vector<std::size_t> duplicate_groups(const std::vector<Atom>& atoms) {
  const std::size_t count = atoms.size();
  std::vector<std::size_t> root(count);
  std::iota(root.begin(), root.end(), 0);
  if (count < 2) return root;

  const CVector probe = make_probe(atoms.front().point.hilbert_dim());
  const double window = kDuplicateDistance * probe.squaredNorm() * 10.0;

  std::vector<double> key(count);
  for (std::size_t i = 0; i < count; ++i) key[i] = fingerprint(atoms[i].point, probe);
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return key[a] < key[b] || (key[a] == key[b] && a < b);
  });

  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t i = order[s];
    for (std::size_t t = s + 1; t < count && key[order[t]] - key[i] <= window; ++t) {
      const std::size_t j = order[t];
      if (operator_distance(atoms[i].point, atoms[j].point) <= kDuplicateDistance) {
        const std::size_t lo = std::min(root[i], root[j]);
        root[i] = root[j] = lo;
      }
    }
  }
  // Flatten chains so every member points at its minimal index.
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t r = root[i];
    while (root[r] != r) r = root[r];
    root[i] = r;
  }
  return root;
}

void validate_dimensions(const std::vector<Atom>& atoms) {
  if (atoms.empty()) return;
  const auto f = atoms.front().point.hilbert_dim();
  const int n = atoms.front().point.spin_dim();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const auto& a = atoms[i];
    if (!(a.weight > 0.0) || !std::isfinite(a.weight)) {
      throw Error(ErrorCode::InvalidArgument,
                  "atom " + std::to_string(i) + " has non-positive weight");
    }
    if (a.point.hilbert_dim() != f || a.point.spin_dim() != n) {
      throw Error(ErrorCode::InvalidArgument,
                  "atom " + std::to_string(i) + " has mismatched Hilbert or spin dimension");
    }
  }
}

template <typename PairFn>
void pair_sweep(const DiscreteMeasure& rho, const SweepOptions& opts, std::vector<double>& action_rows,
                std::vector<double>& bound_rows, PairFn&& fn) {
  const std::size_t count = rho.size();
  action_rows.assign(count, 0.0);
  bound_rows.assign(count, 0.0);
  parallel_for(count, opts.threads, [&](std::size_t i) {
    CompensatedSum s_row;
    CompensatedSum t_row;
    const std::size_t j0 = opts.use_symmetry ? i : 0;
    for (std::size_t j = j0; j < count; ++j) {
      const double factor = (opts.use_symmetry && j != i) ? 2.0 : 1.0;
      const double ww = factor * rho[i].weight * rho[j].weight;
      try {
        const auto [l, b] = fn(rho[i].point, rho[j].point);
        s_row.add(ww * l);
        t_row.add(ww * b);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " at pair (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
      }
    }
    action_rows[i] = s_row.value();
    bound_rows[i] = t_row.value();
  });
}

double ordered_sum(const std::vector<double>& rows) {
  CompensatedSum s;
  for (double v : rows) s.add(v);
  return s.value();
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  validate_dimensions(atoms_);
  const auto root = duplicate_groups(atoms_);
  for (std::size_t i = 0; i < root.size(); ++i) {
    if (root[i] != i) {
      throw Error(ErrorCode::InvalidArgument, "atoms " + std::to_string(root[i]) + " and " +
                                                  std::to_string(i) + " coincide as operators");
    }
  }
}

DiscreteMeasure DiscreteMeasure::push_forward(std::vector<Atom> points,
                                              std::vector<std::size_t>* atom_of_input) {
  validate_dimensions(points);
  const auto root = duplicate_groups(points);
  std::vector<Atom> merged;
  std::vector<std::size_t> slot(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (root[i] == i) {
      slot[i] = merged.size();
      merged.push_back(points[i]);
    } else {
      slot[i] = slot[root[i]];
      merged[slot[i]].weight += points[i].weight;
    }
  }
  if (atom_of_input) *atom_of_input = std::move(slot);
  return DiscreteMeasure(std::move(merged));
}

int DiscreteMeasure::spin_dim() const {
  if (atoms_.empty()) throw Error(ErrorCode::InvalidArgument, "empty measure");
  return atoms_.front().point.spin_dim();
}

Eigen::Index DiscreteMeasure::hilbert_dim() const {
  if (atoms_.empty()) throw Error(ErrorCode::InvalidArgument, "empty measure");
  return atoms_.front().point.hilbert_dim();
}

DiscreteMeasure DiscreteMeasure::with_weights_scaled(double c) const {
  std::vector<Atom> scaled = atoms_;
  for (auto& a : scaled) a.weight *= c;
  return DiscreteMeasure(std::move(scaled));
}

DiscreteMeasure DiscreteMeasure::conjugated(const CMatrix& unitary) const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const auto& a : atoms_) out.push_back({a.point.conjugated(unitary), a.weight});
  return DiscreteMeasure(std::move(out));
}

double total_volume(const DiscreteMeasure& rho) {
  CompensatedSum s;
  for (const auto& a : rho) s.add(a.weight);
  return s.value();
}

double trace_integral(const DiscreteMeasure& rho) {
  CompensatedSum s;
  for (const auto& a : rho) s.add(a.weight * operator_trace(a.point));
  return s.value();
}

ActionSummary evaluate_functionals(const DiscreteMeasure& rho, const SweepOptions& opts) {
  std::vector<double> s_rows;
  std::vector<double> t_rows;
  pair_sweep(rho, opts, s_rows, t_rows, [](const OperatorPoint& x, const OperatorPoint& y) {
    const auto ev = product_eigenvalues(x, y);
    return std::pair{lagrangian(ev), boundedness_integrand(ev)};
  });
  return {ordered_sum(s_rows), ordered_sum(t_rows), total_volume(rho), trace_integral(rho)};
}

double causal_action(const DiscreteMeasure& rho, const SweepOptions& opts) {
  return evaluate_functionals(rho, opts).action;
}

double boundedness_functional(const DiscreteMeasure& rho, const SweepOptions& opts) {
  return evaluate_functionals(rho, opts).boundedness;
}

}  // namespace cfs
