#include "cfs/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cfs/errors.hpp"

namespace cfs {

double softplus(double raw) {
  // log(1 + e^raw) without overflow for large raw.
  return raw > 0.0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
}

double softplus_inverse(double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "softplus_inverse needs a positive finite value");
  }
  return value + std::log(-std::expm1(-value));
}

namespace {

void check_size(std::span<const double> params, std::size_t expected, const std::string& name) {
  if (params.size() != expected) {
    throw Error(ErrorCode::InvalidArgument,
                name + " expects " + std::to_string(expected) + " parameters, got " + std::to_string(params.size()));
  }
  for (double v : params) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, name + ": non-finite parameter");
  }
}

// s * R diag(1 + p^2, -p^2) R^T on C^2 with R the rotation by theta.
OperatorPoint split_operator(double s, double p, double theta) {
  if (s == 0.0) throw Error(ErrorCode::InvalidArgument, "spectrum scale must be nonzero");
  CMatrix rot(2, 2);
  rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const double p2 = p * p;
  if (p2 == 0.0) {
    return OperatorPoint(rot.leftCols(1), RVector::Constant(1, s), 1);
  }
  RVector spectrum(2);
  spectrum << s * (1.0 + p2), -s * p2;
  return OperatorPoint(rot, spectrum, 1);
}

class SingleAtomSplit final : public MeasureFamily {
 public:
  std::string name() const override { return "single-atom-split"; }
  std::size_t parameter_count() const override { return 3; }
  std::vector<double> initial_parameters() const override { return {softplus_inverse(1.0), 1.0, 0.5}; }

  DiscreteMeasure measure(std::span<const double> params) const override {
    check_size(params, 3, name());
    return DiscreteMeasure({Atom{split_operator(params[1], params[2], 0.0), softplus(params[0])}});
  }

  std::vector<double> rescaled(std::span<const double> params, double weight_factor,
                               double spectrum_factor) const override {
    check_size(params, 3, name());
    return {softplus_inverse(weight_factor * softplus(params[0])), params[1] * spectrum_factor, params[2]};
  }
};

class TwoAtomRotation final : public MeasureFamily {
 public:
  std::string name() const override { return "two-atom-rotation"; }
  std::size_t parameter_count() const override { return 5; }
  std::vector<double> initial_parameters() const override {
    return {softplus_inverse(0.7), softplus_inverse(0.3), 1.0, 0.4, 0.9};
  }

  DiscreteMeasure measure(std::span<const double> params) const override {
    check_size(params, 5, name());
    std::vector<Atom> atoms;
    atoms.push_back({split_operator(params[2], params[3], 0.0), softplus(params[0])});
    atoms.push_back({split_operator(params[2], params[3], params[4]), softplus(params[1])});
    return DiscreteMeasure::push_forward(std::move(atoms));
  }

  std::vector<double> rescaled(std::span<const double> params, double weight_factor,
                               double spectrum_factor) const override {
    check_size(params, 5, name());
    return {softplus_inverse(weight_factor * softplus(params[0])),
            softplus_inverse(weight_factor * softplus(params[1])), params[2] * spectrum_factor, params[3],
            params[4]};
  }
};

struct Evaluation {
  std::vector<double> params;  // projected
  ActionSummary summary{};
};

class Objective {
 public:
  Objective(const MeasureFamily& family, double volume_target, double trace_target, int threads)
      : family_(family), volume_(volume_target), trace_(trace_target), sweep_{threads, false} {}

  Evaluation operator()(std::span<const double> params) const {
    Evaluation e;
    e.params = project_constraints(family_, params, volume_, trace_);
    e.summary = evaluate_functionals(family_.measure(e.params), sweep_);
    return e;
  }

  // Action only, with out-of-domain points mapped to +inf.
  double action(std::span<const double> params) const {
    try {
      return (*this)(params).summary.action;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }

 private:
  const MeasureFamily& family_;
  double volume_;
  double trace_;
  SweepOptions sweep_;
};

IterateRecord record(std::size_t iter, const ActionSummary& s, bool accepted) {
  return {iter, s.action, s.boundedness, s.volume, s.trace, accepted};
}

IterateRecord failed_record(std::size_t iter) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return {iter, nan, nan, nan, nan, false};
}

bool within_bound(const std::optional<double>& bound, const ActionSummary& s) {
  return !bound || s.boundedness <= *bound;
}

}  // namespace

std::unique_ptr<MeasureFamily> make_single_atom_split() { return std::make_unique<SingleAtomSplit>(); }
std::unique_ptr<MeasureFamily> make_two_atom_rotation() { return std::make_unique<TwoAtomRotation>(); }

std::vector<std::string> registered_families() { return {"single-atom-split", "two-atom-rotation"}; }

std::unique_ptr<MeasureFamily> make_family(const std::string& name) {
  if (name == "single-atom-split") return make_single_atom_split();
  if (name == "two-atom-rotation") return make_two_atom_rotation();
  throw Error(ErrorCode::InvalidArgument, "unknown measure family '" + name + "'");
}

std::vector<double> project_constraints(const MeasureFamily& family, std::span<const double> params,
                                        double volume_target, double trace_target) {
  if (!(volume_target > 0.0) || !std::isfinite(volume_target)) {
    throw Error(ErrorCode::InvalidArgument, "volume target must be positive");
  }
  if (!std::isfinite(trace_target)) throw Error(ErrorCode::InvalidArgument, "trace target must be finite");

  std::vector<double> out(params.begin(), params.end());
  // The softplus round trip can leave a few ulps; a second pass removes them.
  for (int pass = 0; pass < 2; ++pass) {
    const double volume = total_volume(family.measure(out));
    if (volume != volume_target) out = family.rescaled(out, volume_target / volume, 1.0);

    const double trace = trace_integral(family.measure(out));
    if (trace == 0.0) {
      if (trace_target == 0.0) break;
      throw Error(ErrorCode::InfeasibleTrace, "trace integral vanishes but the target is nonzero");
    }
    if (trace_target == 0.0) {
      throw Error(ErrorCode::InfeasibleTrace, "spectral rescaling cannot reach a zero trace target");
    }
    if (trace != trace_target) out = family.rescaled(out, 1.0, trace_target / trace);
  }
  return out;
}

MinimizeResult minimize_action(const VariationalProblem& problem, const Budget& budget) {
  if (!problem.family) throw Error(ErrorCode::InvalidArgument, "variational problem has no family");
  const MeasureFamily& family = *problem.family;
  std::vector<double> start = problem.start.empty() ? family.initial_parameters() : problem.start;
  if (start.size() != family.parameter_count()) {
    throw Error(ErrorCode::InvalidArgument, "start vector has the wrong length");
  }

  const DiscreteMeasure start_measure = family.measure(start);
  const double volume_target = problem.volume_target.value_or(total_volume(start_measure));
  const double trace_target = problem.trace_target.value_or(trace_integral(start_measure));
  const Objective objective(family, volume_target, trace_target, problem.threads);

  Evaluation current = objective(start);
  if (!within_bound(problem.bound_C, current.summary)) {
    throw Error(ErrorCode::InfeasibleStart, "projected start violates the boundedness bound");
  }
  Evaluation best = current;

  std::vector<IterateRecord> log;
  log.push_back(record(0, current.summary, true));
  std::size_t iter = 0;

  std::mt19937_64 rng(problem.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double t0 = budget.initial_temperature * (current.summary.action > 0.0 ? current.summary.action : 1.0);

  for (std::size_t k = 0; k < budget.anneal_steps; ++k) {
    const double frac = budget.anneal_steps > 1 ? static_cast<double>(k) / (budget.anneal_steps - 1) : 0.0;
    const double temperature = t0 * std::pow(1e-4, frac);
    const double step = budget.step_size * (1.0 - 0.9 * frac);

    std::vector<double> proposal = current.params;
    for (double& v : proposal) v += step * (1.0 + std::abs(v)) * normal(rng);
    const double u = uniform(rng);
    ++iter;

    Evaluation candidate;
    try {
      candidate = objective(proposal);
    } catch (const Error&) {
      log.push_back(failed_record(iter));
      continue;
    }
    if (!within_bound(problem.bound_C, candidate.summary)) {
      log.push_back(record(iter, candidate.summary, false));
      continue;
    }
    const double delta = candidate.summary.action - current.summary.action;
    const bool improves_best = candidate.summary.action < best.summary.action;
    log.push_back(record(iter, candidate.summary, improves_best));
    if (delta <= 0.0 || u < std::exp(-delta / temperature)) current = candidate;
    if (improves_best) best = std::move(candidate);
  }

  // Projected descent with central differences. Coordinates whose one-sided
  // derivative jump does not shrink with the step sit on a kink and are frozen
  // for that iteration.
  bool converged = false;
  double trial = 1.0;
  const std::size_t n = best.params.size();
  for (std::size_t k = 0; k < budget.polish_steps; ++k) {
    const double f0 = best.summary.action;
    std::vector<double> grad(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-6 * (1.0 + std::abs(best.params[i]));
      auto shifted = [&](double d) {
        std::vector<double> p = best.params;
        p[i] += d;
        return objective.action(p);
      };
      const double fp = shifted(h);
      const double fm = shifted(-h);
      if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
      const double forward = (fp - f0) / h;
      const double backward = (f0 - fm) / h;
      const double jump = forward - backward;
      const double noise = 1e-9 * (1.0 + std::abs(f0)) / h;
      if (std::abs(jump) > 0.1 * std::max(std::abs(forward), std::abs(backward)) && std::abs(jump) > noise) {
        const double fp2 = shifted(0.5 * h);
        const double fm2 = shifted(-0.5 * h);
        const double jump_half = (fp2 - f0) / (0.5 * h) - (f0 - fm2) / (0.5 * h);
        if (std::abs(jump_half) > 0.75 * std::abs(jump)) continue;
      }
      grad[i] = (fp - fm) / (2.0 * h);
    }

    double gnorm2 = 0.0;
    for (double g : grad) gnorm2 += g * g;
    if (gnorm2 <= 1e-24 * (1.0 + f0 * f0)) {
      converged = true;
      break;
    }

    bool moved = false;
    double t = trial;
    for (int attempt = 0; attempt < 60; ++attempt, t *= 0.5) {
      std::vector<double> p = best.params;
      for (std::size_t i = 0; i < n; ++i) p[i] -= t * grad[i];
      Evaluation candidate;
      try {
        candidate = objective(p);
      } catch (const Error&) {
        continue;
      }
      if (!within_bound(problem.bound_C, candidate.summary)) continue;
      if (candidate.summary.action <= f0 - 1e-4 * t * gnorm2 && candidate.summary.action < f0) {
        ++iter;
        log.push_back(record(iter, candidate.summary, true));
        best = std::move(candidate);
        moved = true;
        break;
      }
    }
    if (!moved) {
      converged = true;
      break;
    }
    trial = std::min(1e3, 2.0 * t);
  }

  MinimizeResult result{std::move(log), best.params, family.measure(best.params), best.summary,
                        volume_target, trace_target, !converged};
  return result;
}

}  // namespace cfs
