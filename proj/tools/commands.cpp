#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "cfs/errors.hpp"
#include "cfs/minimize.hpp"
#include "cfs/vacuum.hpp"
#include "system_file.hpp"

namespace cfs::cli {
namespace {

std::string format_fixed15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

int fail(std::ostream& err, int code, const std::string& message) {
  err << "error: " << message << '\n';
  return code;
}

int computation_code(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InfeasibleTrace:
    case ErrorCode::InfeasibleStart: return kInfeasible;
    default: return kComputation;
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "' for writing");
  return out;
}

// Rebuilds the lattice system a file was written from and checks that it
// reproduces the stored atoms.
LatticeSeaSystem rebuild(const SystemFile& file, int threads) {
  BuildOptions opts;
  opts.edits = file.lattice->edits;
  opts.convention = file.convention;
  opts.custom_weight = file.counting_weight;
  opts.threads = threads;
  LatticeSeaSystem sys = build_system(file.lattice->spec, opts);

  const DiscreteMeasure& stored = file.measure;
  bool same = stored.size() == sys.measure().size();
  for (std::size_t i = 0; same && i < stored.size(); ++i) {
    const Atom& a = stored[i];
    const Atom& b = sys.measure()[i];
    const double scale = std::max(1.0, std::sqrt(a.point.spectrum().squaredNorm()));
    same = std::abs(a.weight - b.weight) <= 1e-12 * a.weight &&
           a.point.hilbert_dim() == b.point.hilbert_dim() &&
           operator_distance(a.point, b.point) <= 1e-9 * scale;
  }
  if (!same) {
    throw Error(ErrorCode::InvalidArgument, "atoms in the system file do not match its lattice provenance");
  }
  return sys;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int run_build_vacuum(const BuildVacuumArgs& args, std::ostream& out, std::ostream& err) {
  LatticeSpec spec{args.eps, args.n_t, args.n_s, args.mass};
  BuildOptions opts;
  opts.threads = args.threads;
  try {
    spec.validate();
    for (const auto& m : args.add_modes) opts.edits.added.push_back(parse_mode_label(m));
    for (const auto& m : args.remove_modes) opts.edits.removed.push_back(parse_mode_label(m));
    if (args.weight == "counting") {
      opts.convention = WeightConvention::Counting;
    } else if (args.weight == "eps4") {
      opts.convention = WeightConvention::Eps4;
    } else {
      std::size_t used = 0;
      double w = 0.0;
      try {
        w = std::stod(args.weight, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != args.weight.size() || !(w > 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::InvalidArgument, "--weight must be 'counting', 'eps4' or a positive number");
      }
      opts.convention = WeightConvention::Custom;
      opts.custom_weight = w;
    }
  } catch (const Error& e) {
    return fail(err, kUsage, e.what());
  }

  try {
    const LatticeSeaSystem sys = build_system(spec, opts);
    save_system(system_from_lattice(sys, opts.edits), args.out);

    std::map<std::pair<int, int>, std::size_t> signatures;
    for (const auto& atom : sys.measure()) ++signatures[atom.point.signature()];
    out << "hilbert_dim " << sys.hilbert_dim() << '\n';
    out << "lattice_points " << sys.point_count() << '\n';
    out << "atoms " << sys.measure().size() << '\n';
    for (const auto& [sig, count] : signatures) {
      out << "signature (" << sig.first << "," << sig.second << ") " << count << '\n';
    }
  } catch (const Error& e) {
    return fail(err, computation_code(e), e.what());
  }
  return kOk;
}

int run_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err) {
  bool sample = false;
  std::size_t sample_count = 0;
  if (args.pairs.size() == 1 && args.pairs[0] == "all") {
    sample = false;
  } else if (args.pairs.size() == 2 && args.pairs[0] == "sample") {
    try {
      std::size_t used = 0;
      const long long n = std::stoll(args.pairs[1], &used);
      if (used != args.pairs[1].size() || n <= 0) throw std::invalid_argument("count");
      sample_count = static_cast<std::size_t>(n);
      sample = true;
    } catch (const std::exception&) {
      return fail(err, kUsage, "--pairs sample needs a positive integer count");
    }
  } else {
    return fail(err, kUsage, "--pairs must be 'all' or 'sample N'");
  }
  if (!(args.band_mult >= 0.0)) return fail(err, kUsage, "--band-mult must be non-negative");
  if (!(args.class_tol > 0.0 && args.class_tol < 1.0)) return fail(err, kUsage, "--class-tol must lie in (0, 1)");

  SystemFile file;
  try {
    file = load_system(args.sys);
  } catch (const Error& e) {
    return fail(err, kUsage, e.what());
  }
  if (!file.lattice) return fail(err, kUsage, "classify needs a lattice-built system file");

  try {
    const LatticeSeaSystem sys = rebuild(file, args.threads);
    const std::vector<PointPair> pairs =
        sample ? sample_pairs(sys.point_count(), sample_count, args.seed) : all_pairs(sys.point_count());
    AuditOptions opts;
    opts.band_multiplier = args.band_mult;
    opts.class_tol = args.class_tol;
    opts.threads = args.threads;
    const AuditReport report = causality_audit(sys, pairs, opts);

    std::ofstream csv = open_output(args.out);
    csv << "ix,iy,xi0,xi1,xi2,xi3,xi_sq,class_spectral,class_minkowski,lagrangian,eig_discrepancy,in_band,"
           "decomposition_valid\n";
    for (const auto& row : report.rows) {
      csv << row.pair.x << ',' << row.pair.y;
      for (double v : row.xi) csv << ',' << format_real(v);
      csv << ',' << format_real(row.xi_sq) << ',' << to_string(row.spectral) << ','
          << to_string(row.minkowski) << ',' << format_real(row.lagrangian) << ','
          << format_real(row.eig_discrepancy) << ',' << (row.in_band ? 1 : 0) << ','
          << (row.decomposition_valid ? 1 : 0) << '\n';
    }
    if (!csv) throw Error(ErrorCode::InvalidArgument, "failed writing '" + args.out + "'");

    const AuditSummary& s = report.summary;
    auto rate = [](std::size_t a, std::size_t b) { return b ? format_fixed15(static_cast<double>(a) / b) : "n/a"; };
    out << "pairs " << s.total << '\n';
    out << "in_band " << s.in_band << '\n';
    out << "out_of_band " << s.out_of_band << '\n';
    out << "agreement_rate " << rate(s.agreements, s.out_of_band) << '\n';
    out << "timelike_agreement " << rate(s.timelike_agreements, s.timelike_out_of_band) << " of "
        << s.timelike_out_of_band << '\n';
    out << "spacelike_agreement " << rate(s.spacelike_agreements, s.spacelike_out_of_band) << " of "
        << s.spacelike_out_of_band << '\n';
    out << "valid_decompositions " << s.valid_decompositions << '\n';
    out << "max_formula_discrepancy " << format_fixed15(s.max_valid_discrepancy) << '\n';
    out << "max_clifford_residual " << format_fixed15(s.max_clifford_residual) << '\n';
    out << "solver_flagged " << s.solver_flagged << '\n';
  } catch (const Error& e) {
    return fail(err, e.code() == ErrorCode::InvalidArgument ? kUsage : computation_code(e), e.what());
  }
  return kOk;
}

int run_action(const ActionArgs& args, std::ostream& out, std::ostream& err) {
  SystemFile file;
  try {
    file = load_system(args.sys);
  } catch (const Error& e) {
    return fail(err, kUsage, e.what());
  }
  try {
    const ActionSummary s = evaluate_functionals(file.measure, SweepOptions{args.threads, false});
    out << "S " << format_fixed15(s.action) << '\n';
    out << "T " << format_fixed15(s.boundedness) << '\n';
    out << "volume " << format_fixed15(s.volume) << '\n';
    out << "trace " << format_fixed15(s.trace) << '\n';
    if (args.report_constraints) {
      std::map<std::pair<int, int>, std::size_t> signatures;
      Eigen::Index max_rank = 0;
      for (const auto& atom : file.measure) {
        ++signatures[atom.point.signature()];
        max_rank = std::max(max_rank, atom.point.rank());
      }
      out << "atoms " << file.measure.size() << '\n';
      out << "spin_dimension " << file.spin_dim << '\n';
      out << "max_rank " << max_rank << " (bound " << 2 * file.spin_dim << ")\n";
      for (const auto& [sig, count] : signatures) {
        out << "signature (" << sig.first << "," << sig.second << ") " << count << '\n';
      }
      out << "volume_constraint " << format_fixed15(s.volume) << '\n';
      out << "trace_constraint " << format_fixed15(s.trace) << '\n';
    }
  } catch (const Error& e) {
    return fail(err, computation_code(e), e.what());
  }
  return kOk;
}

int run_minimize(const MinimizeArgs& args, std::ostream& out, std::ostream& err) {
  using json = nlohmann::ordered_json;
  VariationalProblem problem;
  Budget budget;
  try {
    std::ifstream in(args.config, std::ios::binary);
    if (!in) return fail(err, kUsage, "cannot open '" + args.config + "'");
    const json cfg = json::parse(in);
    problem.family = make_family(cfg.at("family").get<std::string>());
    problem.seed = cfg.value("seed", std::uint64_t{0});
    if (cfg.contains("start")) problem.start = cfg.at("start").get<std::vector<double>>();
    auto optional_real = [&](const char* key) -> std::optional<double> {
      if (!cfg.contains(key) || cfg.at(key).is_null()) return std::nullopt;
      return cfg.at(key).get<double>();
    };
    problem.volume_target = optional_real("volume_target");
    problem.trace_target = optional_real("trace_target");
    problem.bound_C = optional_real("bound_C");
    if (cfg.contains("budget")) {
      const auto& b = cfg.at("budget");
      budget.anneal_steps = b.value("anneal_steps", budget.anneal_steps);
      budget.polish_steps = b.value("polish_steps", budget.polish_steps);
      budget.step_size = b.value("step_size", budget.step_size);
      budget.initial_temperature = b.value("initial_temperature", budget.initial_temperature);
    }
    problem.threads = args.threads;
  } catch (const json::exception& e) {
    return fail(err, kUsage, std::string("config: ") + e.what());
  } catch (const Error& e) {
    return fail(err, kUsage, e.what());
  }

  try {
    const MinimizeResult result = minimize_action(problem, budget);

    std::ofstream log = open_output(args.out_log);
    log << "iter,S,T,volume,trace,accepted\n";
    for (const auto& r : result.log) {
      log << r.iter << ',' << format_real(r.action) << ',' << format_real(r.boundedness) << ','
          << format_real(r.volume) << ',' << format_real(r.trace) << ',' << (r.accepted ? 1 : 0) << '\n';
    }
    if (!log) throw Error(ErrorCode::InvalidArgument, "failed writing '" + args.out_log + "'");

    SystemFile best = system_from_measure(result.best);
    best.family = FamilyProvenance{problem.family->name(), result.best_parameters};
    save_system(best, args.out_best);

    const ActionSummary& s = result.best_summary;
    out << "best_S " << format_fixed15(s.action) << '\n';
    out << "T " << format_fixed15(s.boundedness) << '\n';
    out << "volume_residual " << format_fixed15(std::abs(s.volume - result.volume_target) / result.volume_target)
        << '\n';
    const double trace_scale = std::max(std::abs(result.trace_target), 1.0);
    out << "trace_residual " << format_fixed15(std::abs(s.trace - result.trace_target) / trace_scale) << '\n';
    out << "iterations " << result.log.size() << '\n';
    out << "budget_exhausted " << (result.budget_exhausted ? "yes" : "no") << '\n';
    if (result.budget_exhausted) err << "warning: BudgetExhausted: returning the best iterate found\n";
  } catch (const Error& e) {
    return fail(err, computation_code(e), e.what());
  }
  return kOk;
}

}  // namespace cfs::cli
