#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfs/measure.hpp"

namespace cfs {

/// Smooth positive reparameterization used for weights.
double softplus(double raw);
double softplus_inverse(double value);

/// Maps a real parameter vector onto a discrete measure.
class MeasureFamily {
 public:
  virtual ~MeasureFamily() = default;

  virtual std::string name() const = 0;
  virtual std::size_t parameter_count() const = 0;
  virtual std::vector<double> initial_parameters() const = 0;

  /// Throws cfs::Error if `params` leaves the family's domain.
  virtual DiscreteMeasure measure(std::span<const double> params) const = 0;

  /// Parameters whose measure has every weight multiplied by `weight_factor`
  /// and every operator multiplied by `spectrum_factor`.
  virtual std::vector<double> rescaled(std::span<const double> params, double weight_factor,
                                       double spectrum_factor) const = 0;
};

/// "single-atom-split": one atom on C^2 (n = 1), parameters
/// [w_raw, s, p] with weight softplus(w_raw) and spectrum (s (1 + p^2), -s p^2).
/// Under fixed volume V and trace tau, S = tau^4 (1 + 2 p^2)^2 / (2 V^2).
std::unique_ptr<MeasureFamily> make_single_atom_split();

/// "two-atom-rotation": two atoms on C^2 (n = 1), parameters
/// [w1_raw, w2_raw, s, p, theta]; both operators are s diag(1 + p^2, -p^2),
/// the second one rotated by the real angle theta. Coinciding atoms merge.
std::unique_ptr<MeasureFamily> make_two_atom_rotation();

/// Looks up a registered family by name. Throws InvalidArgument.
std::unique_ptr<MeasureFamily> make_family(const std::string& name);
std::vector<std::string> registered_families();

struct VariationalProblem {
  std::shared_ptr<const MeasureFamily> family;
  std::vector<double> start;  // family default when empty
  // Unset targets are captured from the start point.
  std::optional<double> volume_target;
  std::optional<double> trace_target;
  std::optional<double> bound_C;  // boundedness filter T <= C, disabled when unset
  std::uint64_t seed = 0;
  int threads = 1;
};

struct Budget {
  std::size_t anneal_steps = 4000;
  std::size_t polish_steps = 400;
  double step_size = 0.25;
  double initial_temperature = 0.1;  // relative to the starting action
};

/// Rescales weights to the volume target, then spectra to the trace target.
/// Throws InfeasibleTrace if the trace integral vanishes but the target does
/// not.
std::vector<double> project_constraints(const MeasureFamily& family, std::span<const double> params,
                                        double volume_target, double trace_target);

struct IterateRecord {
  std::size_t iter = 0;
  double action = 0.0;
  double boundedness = 0.0;
  double volume = 0.0;
  double trace = 0.0;
  // Set when the iterate became the new incumbent; accepted rows therefore
  // have non-increasing action.
  bool accepted = false;
};

struct MinimizeResult {
  std::vector<IterateRecord> log;
  std::vector<double> best_parameters;
  DiscreteMeasure best;
  ActionSummary best_summary{};
  double volume_target = 0.0;
  double trace_target = 0.0;
  bool budget_exhausted = false;
};

/// Simulated annealing over projected parameters followed by a
/// finite-difference projected-descent polish. Deterministic for a given
/// seed and budget. Throws InfeasibleTrace / InfeasibleStart when the start
/// cannot be made feasible.
MinimizeResult minimize_action(const VariationalProblem& problem, const Budget& budget = {});

}  // namespace cfs
