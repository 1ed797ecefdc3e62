// Acceptance suite: one PASS/FAIL line per criterion, details indented below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cfs/diracsea.hpp"
#include "cfs/geometry.hpp"
#include "cfs/linalg.hpp"
#include "cfs/measure.hpp"
#include "cfs/minimize.hpp"
#include "cfs/opspace.hpp"
#include "cfs/parallel.hpp"
#include "cfs/spectral.hpp"
#include "cfs/vacuum.hpp"
#include "commands.hpp"
#include "oracles.hpp"

namespace {

using namespace cfs;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    details.push_back(std::string(ok ? "ok   " : "fail ") + what);
  }
  void note(const std::string& what) { details.push_back("info " + what); }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int worker_count() { return std::max(4, default_thread_count()); }

// 1 -----------------------------------------------------------------------
Outcome lagrangian_forms() {
  Outcome out;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> pick(0, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<complex> ev(2 * n);
    for (auto& l : ev) {
      switch (pick(rng)) {
        case 0: l = 0.0; break;                          // rank deficiency
        case 1: l = complex(u(rng), 0.0); break;         // real
        default: l = complex(u(rng), u(rng)); break;
      }
    }
    const EigenvalueList list(n, ev);
    const double a = lagrangian(list);
    const double b = lagrangian_variance_form(list);
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
  }
  const double elapsed = seconds_since(t0);
  out.require(worst <= 1e-10, "max |closed - variance| / (1 + L) = " + sci(worst) + " over 10^4 lists");
  out.require(elapsed < 1.0, "runtime " + fmt("%.3f", elapsed) + " s < 1 s");
  return out;
}

// 2 -----------------------------------------------------------------------
Outcome closed_chain_equivalence() {
  Outcome out;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2);
  double worst_ev = 0.0;
  double worst_trace = 0.0;
  int flagged = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const OperatorPoint x = oracle::random_point(16, 2, rng);
    const OperatorPoint y = oracle::random_point(16, 2, rng);
    const ClosedChain chain = closed_chain(x, y);
    if (chain.solver_flagged) ++flagged;
    const EigenvalueList direct = product_eigenvalues(x, y);
    const auto a = chain.eigenvalues.values();
    const auto b = direct.values();
    double scale = 0.0;
    for (const auto& l : b) scale = std::max(scale, std::abs(l));
    const double d = oracle::multiset_distance_bruteforce({a.begin(), a.end()}, {b.begin(), b.end()});
    worst_ev = std::max(worst_ev, d / scale);

    const CMatrix xy = x.dense() * y.dense();
    CMatrix ap = CMatrix::Identity(chain.matrix.rows(), chain.matrix.cols());
    CMatrix xyp = CMatrix::Identity(16, 16);
    for (int p = 1; p <= 3; ++p) {
      ap = ap * chain.matrix;
      xyp = xyp * xy;
      const double tscale = std::pow(x.dense().norm() * y.dense().norm(), p);
      worst_trace = std::max(worst_trace, std::abs(ap.trace() - xyp.trace()) / tscale);
    }
  }
  const double elapsed = seconds_since(t0);
  out.require(worst_ev <= 1e-8, "closed chain vs product eigenvalues, max rel distance " + sci(worst_ev));
  out.require(worst_trace <= 1e-8, "Tr A^p = tr (xy)^p for p = 1,2,3, max rel error " + sci(worst_trace));
  out.note("solver cross-check flags: " + std::to_string(flagged));
  out.require(elapsed < 10.0, "runtime " + fmt("%.2f", elapsed) + " s < 10 s");
  return out;
}

// 3 -----------------------------------------------------------------------
Outcome spacelike_vanishing() {
  Outcome out;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> mag(0.01, 10.0);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  double worst = 0.0;
  int misclassified = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 2;
    const double r = mag(rng);
    std::vector<complex> ev(2 * n);
    for (auto& l : ev) l = std::polar(r, phase(rng));
    const EigenvalueList list(n, ev);
    const double scale = std::pow(spectral_weight(list), 2);
    worst = std::max(worst, lagrangian(list) / scale);
    if (classify_causality(list, 1e-6) != Causality::Spacelike) ++misclassified;
  }
  out.require(worst <= 1e-12, "equal-modulus spectra: max L / |xy|^2 = " + sci(worst) + " over 10^3");
  out.require(misclassified == 0, "equal-modulus spectra classified spacelike (" +
                                      std::to_string(misclassified) + " misses)");

  double worst_orth = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const CMatrix u = oracle::random_unitary(16, rng);
    const RVector nu = (RVector(4) << 1.0 + mag(rng), 0.5, -0.7, -mag(rng)).finished();
    const OperatorPoint x(u.leftCols(4), nu, 2);
    const OperatorPoint y(u.middleCols(4 + (trial % 9), 4), nu.reverse(), 2);
    const EigenvalueList ev = product_eigenvalues(x, y);
    const double scale = std::pow(nu.cwiseAbs().sum(), 4);
    worst_orth = std::max(worst_orth, std::abs(lagrangian(ev)) / scale);
  }
  out.require(worst_orth <= 1e-12, "orthogonal ranges: max L / scale = " + sci(worst_orth) + " over 10^3");
  return out;
}

// 4 and 5 share one audit -------------------------------------------------
struct VacuumAudit {
  AuditReport report;
  double build_seconds = 0.0;
  double audit_seconds = 0.0;
  int threads = 1;
};

VacuumAudit run_vacuum_audit() {
  VacuumAudit va;
  va.threads = worker_count();
  const LatticeSpec spec{1.0, 8, 8, 0.5};
  BuildOptions opts;
  opts.threads = va.threads;
  auto t0 = Clock::now();
  const LatticeSeaSystem sys = build_system(spec, opts);
  va.build_seconds = seconds_since(t0);
  const auto pairs = sample_pairs(sys.point_count(), 100000, 0);
  AuditOptions audit;
  audit.threads = va.threads;
  audit.band_multiplier = 3.0;
  t0 = Clock::now();
  va.report = causality_audit(sys, pairs, audit);
  va.audit_seconds = seconds_since(t0);
  return va;
}

Outcome minkowski_recovery(const VacuumAudit& va) {
  Outcome out;
  const AuditSummary& s = va.report.summary;
  const double rate = s.agreement_rate();
  out.require(rate >= 0.9, "agreement " + fmt("%.4f", rate) + " over " + std::to_string(s.out_of_band) +
                               " out-of-band pairs (threshold 0.90)");
  out.note("in-band pairs reported separately: " + std::to_string(s.in_band) + " of " + std::to_string(s.total));
  out.note("timelike agreement " +
           fmt("%.4f", s.timelike_out_of_band ? double(s.timelike_agreements) / s.timelike_out_of_band : 0.0) +
           " of " + std::to_string(s.timelike_out_of_band) + ", spacelike agreement " +
           fmt("%.4f", s.spacelike_out_of_band ? double(s.spacelike_agreements) / s.spacelike_out_of_band : 0.0) +
           " of " + std::to_string(s.spacelike_out_of_band));

  // Finite-size breakdown by |xi^0|; the time direction is not periodic, so
  // large separations see only a few lattice slices.
  std::map<int, std::pair<std::size_t, std::size_t>> by_time;
  for (const auto& row : va.report.rows) {
    if (row.in_band || row.minkowski == Causality::Lightlike) continue;
    auto& [agree, total] = by_time[static_cast<int>(std::lround(std::abs(row.xi[0])))];
    ++total;
    if (row.spectral == row.minkowski) ++agree;
  }
  std::string line = "agreement by |xi0|:";
  for (const auto& [t, counts] : by_time) {
    line += " " + std::to_string(t) + ":" + fmt("%.2f", double(counts.first) / counts.second);
  }
  out.note(line);
  out.note("solver cross-check flags: " + std::to_string(s.solver_flagged));
  const double total = va.build_seconds + va.audit_seconds;
  out.require(total < 300.0, "runtime " + fmt("%.1f", total) + " s (build " + fmt("%.1f", va.build_seconds) +
                                 " s, audit " + fmt("%.1f", va.audit_seconds) + " s) on " +
                                 std::to_string(va.threads) + " workers");
  return out;
}

Outcome eigenvalue_formula(const VacuumAudit& va) {
  Outcome out;
  const AuditSummary& s = va.report.summary;
  out.require(s.valid_decompositions > 0,
              "pairs with valid decomposition flag: " + std::to_string(s.valid_decompositions));
  out.require(s.max_valid_discrepancy <= 1e-6,
              "max formula discrepancy on flagged-valid pairs " + sci(s.max_valid_discrepancy));
  out.require(s.max_clifford_residual <= 1e-8, "max Clifford residual / ||P|| = " + sci(s.max_clifford_residual));
  std::size_t nonzero_xi = 0;
  double worst_misalign = 0.0;
  for (const auto& row : va.report.rows) {
    if (std::isnan(row.eig_discrepancy)) continue;
    ++nonzero_xi;
    worst_misalign = std::max(worst_misalign, row.misalignment);
  }
  out.note("decomposition valid on " + std::to_string(s.valid_decompositions) + " of " +
           std::to_string(nonzero_xi) + " pairs with xi != 0; largest misalignment of c against xi " +
           fmt("%.3f", worst_misalign));
  return out;
}

// 6 -----------------------------------------------------------------------
Outcome kernel_identities() {
  Outcome out;
  const LatticeSpec spec{1.0, 4, 4, 1.0};
  const LatticeSeaSystem sys = build_system(spec);
  const CMatrix hilbert = CMatrix::Identity(sys.hilbert_dim(), sys.hilbert_dim());

  std::mt19937_64 rng(6);
  const auto pairs = sample_pairs(sys.point_count(), 200, 6);
  double worst_adj = 0.0;
  double worst_sum = 0.0;
  for (const auto& p : pairs) {
    const SpinSpace sx = spin_projector(sys.operator_at(p.x));
    const SpinSpace sy = spin_projector(sys.operator_at(p.y));
    const KernelMatrix kxy = fermionic_kernel(sx, sy);
    const KernelMatrix kyx = fermionic_kernel(sy, sx);
    const double scale = std::max(kxy.entries.norm(), 1e-300);
    worst_adj = std::max(worst_adj, (spin_adjoint(kxy) - kyx.entries).norm() / scale);
    const KernelMatrix ms = fermionic_kernel_mode_sum(sx, sy, hilbert);
    worst_sum = std::max(worst_sum, (ms.entries - kxy.entries).norm() / scale);
  }
  out.require(worst_adj <= 1e-10, "P(y,x) = P(x,y)* (spin adjoint), max rel error " + sci(worst_adj));
  out.require(worst_sum <= 1e-10, "definitional vs mode-sum kernel, max rel error " + sci(worst_sum));

  // Translation invariance: every pair with the same xi gives the same P.
  std::map<std::array<long, 4>, SpinorMatrix> reference;
  double worst_shift = 0.0;
  double max_norm = 0.0;
  for (std::size_t x = 0; x < sys.point_count(); x += 3) {
    for (std::size_t y = 0; y < sys.point_count(); ++y) {
      const FourVector xi = separation(spec, x, y);
      const std::array<long, 4> key{std::lround(xi[0]), std::lround(xi[1]), std::lround(xi[2]), std::lround(xi[3])};
      const SpinorMatrix p = sys.spinor_kernel(x, y);
      max_norm = std::max(max_norm, p.norm());
      auto [it, fresh] = reference.emplace(key, p);
      if (!fresh) worst_shift = std::max(worst_shift, (p - it->second).norm());
    }
  }
  worst_shift /= max_norm;
  out.require(worst_shift <= 1e-12, "P depends only on xi on the periodic lattice, max rel spread " +
                                        sci(worst_shift) + " over " + std::to_string(reference.size()) +
                                        " separations");
  return out;
}

// 7 -----------------------------------------------------------------------
Outcome compatibility_identity() {
  Outcome out;
  const LatticeSpec spec{1.0, 2, 2, 1.0};
  const LatticeSeaSystem sys = build_system(spec);
  const Eigen::Index f = sys.hilbert_dim();
  double worst = 0.0;
  std::size_t checked = 0;
  for (std::size_t pt = 0; pt < sys.point_count(); ++pt) {
    const SpinSpace space = spin_projector(sys.operator_at(pt));
    const auto wave = sys.wave_matrix(pt);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < f; ++i) scale = std::max(scale, wave.col(i).squaredNorm());
    for (Eigen::Index i = 0; i < f; ++i) {
      const CVector u = space.project(CVector::Unit(f, i));
      for (Eigen::Index j = 0; j < f; ++j) {
        const CVector v = space.project(CVector::Unit(f, j));
        const complex lhs = spin_product(space, u, v);
        const complex rhs = spinor_product(wave.col(i), wave.col(j));
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
        ++checked;
      }
    }
  }
  out.require(worst <= 1e-10, "spin product of physical wave functions = psi-bar psi, max rel error " +
                                  sci(worst) + " over " + std::to_string(checked) + " (x, u, v)");
  return out;
}

// 8 -----------------------------------------------------------------------
Outcome invariance_suite() {
  Outcome out;
  std::mt19937_64 rng(8);
  std::vector<Atom> atoms;
  for (int i = 0; i < 12; ++i) atoms.push_back({oracle::random_point(10, 2, rng), 0.5 + 0.1 * i});
  const DiscreteMeasure random_measure(std::move(atoms));
  const DiscreteMeasure vacuum = build_system(LatticeSpec{1.0, 2, 2, 1.0}).measure();

  double worst_unitary = 0.0;
  double worst_scale = 0.0;
  for (const DiscreteMeasure* rho : {&random_measure, &vacuum}) {
    const ActionSummary base = evaluate_functionals(*rho);
    for (int k = 0; k < 5; ++k) {
      const CMatrix u = oracle::random_unitary(rho->hilbert_dim(), rng);
      const ActionSummary rotated = evaluate_functionals(rho->conjugated(u));
      worst_unitary = std::max({worst_unitary, std::abs(rotated.action - base.action) / base.action,
                                std::abs(rotated.boundedness - base.boundedness) / base.boundedness});
    }
    for (double c : {0.25, 3.0, 17.5}) {
      const ActionSummary scaled = evaluate_functionals(rho->with_weights_scaled(c));
      worst_scale = std::max({worst_scale, std::abs(scaled.action - c * c * base.action) / (c * c * base.action),
                              std::abs(scaled.boundedness - c * c * base.boundedness) / (c * c * base.boundedness)});
    }
  }
  out.require(worst_unitary <= 1e-10, "unitary conjugation, max rel change of S, T " + sci(worst_unitary));
  out.require(worst_scale <= 1e-12, "weight scaling by c gives c^2, max rel error " + sci(worst_scale));
  return out;
}

// 9 -----------------------------------------------------------------------
Outcome optimizer_validation() {
  Outcome out;
  const double volume = 1.0;
  const double trace = 1.0;
  auto feasible_log = [&](const MinimizeResult& r) {
    double worst = 0.0;
    for (const auto& row : r.log) {
      if (!row.accepted) continue;
      worst = std::max({worst, std::abs(row.volume - volume) / volume, std::abs(row.trace - trace) / trace});
    }
    return worst;
  };
  auto monotone = [](const MinimizeResult& r) {
    double last = std::numeric_limits<double>::infinity();
    for (const auto& row : r.log) {
      if (!row.accepted) continue;
      if (row.action > last) return false;
      last = row.action;
    }
    return true;
  };

  VariationalProblem three;
  three.family = make_two_atom_rotation();
  three.volume_target = volume;
  three.trace_target = trace;
  three.seed = 9;
  const MinimizeResult r3 = minimize_action(three, Budget{});
  const oracle::GridResult grid = oracle::two_atom_grid_search(100, volume, trace);
  const double rel3 = std::abs(r3.best_summary.action - grid.best) / grid.best;
  out.require(rel3 <= 0.01, "two-atom family: best S " + fmt("%.10g", r3.best_summary.action) + " vs grid " +
                                fmt("%.10g", grid.best) + " over " + std::to_string(grid.points) +
                                " points, rel diff " + sci(rel3));

  VariationalProblem one;
  one.family = make_single_atom_split();
  one.volume_target = volume;
  one.trace_target = trace;
  one.seed = 9;
  const MinimizeResult r1 = minimize_action(one, Budget{});
  const double analytic = std::pow(trace, 4) / (2.0 * volume * volume);
  const double err1 = std::abs(r1.best_summary.action - analytic);
  out.require(err1 <= 1e-4, "single-atom family: best S " + fmt("%.12g", r1.best_summary.action) +
                                " vs analytic " + fmt("%.12g", analytic) + ", error " + sci(err1));

  const double feas = std::max(feasible_log(r1), feasible_log(r3));
  out.require(feas <= 1e-10, "accepted iterates feasible, max rel constraint residual " + sci(feas));
  out.require(monotone(r1) && monotone(r3), "accepted objective values non-increasing");
  return out;
}

// 10 ----------------------------------------------------------------------
Outcome hartree_fock_phase() {
  Outcome out;
  std::mt19937_64 rng(10);
  double worst = 0.0;
  double worst_mod = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix a = oracle::random_unitary(16, rng).leftCols(8);
    const CMatrix u = oracle::random_unitary(8, rng);
    const complex det = u.determinant();
    const complex overlap = hartree_fock_overlap(a, a * u);
    worst = std::max(worst, std::abs(det - overlap));
    worst_mod = std::max(worst_mod, std::abs(std::abs(det) - 1.0));
  }
  out.require(worst <= 1e-10, "|det U - overlap| max " + sci(worst) + " over 100 unitaries");
  out.require(worst_mod <= 1e-10, "||det U| - 1| max " + sci(worst_mod));
  return out;
}

// 11 ----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome out;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("cfs_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::ostringstream sink;

  auto build = [&](const std::string& name, int threads) {
    cli::BuildVacuumArgs a;
    a.n_t = 2;
    a.n_s = 4;
    a.mass = 0.5;
    a.out = (dir / name).string();
    a.threads = threads;
    return cli::run_build_vacuum(a, sink, sink);
  };
  bool ok = build("a.json", 1) == 0 && build("b.json", 8) == 0;
  out.require(ok && slurp(dir / "a.json") == slurp(dir / "b.json"),
              "system file byte-identical across runs (1 and 8 workers)");

  auto classify = [&](const std::string& name, int threads) {
    cli::ClassifyArgs a;
    a.sys = (dir / "a.json").string();
    a.pairs = {"sample", "500"};
    a.seed = 42;
    a.out = (dir / name).string();
    a.threads = threads;
    return cli::run_classify(a, sink, sink);
  };
  ok = classify("a.csv", 1) == 0 && classify("b.csv", 2) == 0;
  out.require(ok && slurp(dir / "a.csv") == slurp(dir / "b.csv"), "classify CSV byte-identical for equal seeds");

  {
    std::ofstream cfg(dir / "min.json");
    cfg << R"({"family": "two-atom-rotation", "seed": 5, "budget": {"anneal_steps": 500, "polish_steps": 50}})";
  }
  auto minimize = [&](const std::string& tag) {
    cli::MinimizeArgs a;
    a.config = (dir / "min.json").string();
    a.out_log = (dir / (tag + ".csv")).string();
    a.out_best = (dir / (tag + ".json")).string();
    return cli::run_minimize(a, sink, sink);
  };
  ok = minimize("m1") == 0 && minimize("m2") == 0;
  out.require(ok && slurp(dir / "m1.csv") == slurp(dir / "m2.csv") && slurp(dir / "m1.json") == slurp(dir / "m2.json"),
              "minimize log and best file byte-identical for equal seeds");

  const DiscreteMeasure rho = build_system(LatticeSpec{1.0, 2, 4, 0.5}).measure();
  const ActionSummary ref = evaluate_functionals(rho, {1, false});
  double worst = 0.0;
  for (int threads : {2, 8}) {
    const ActionSummary s = evaluate_functionals(rho, {threads, false});
    worst = std::max({worst, std::abs(s.action - ref.action) / ref.action,
                      std::abs(s.boundedness - ref.boundedness) / ref.boundedness,
                      std::abs(s.volume - ref.volume) / ref.volume, std::abs(s.trace - ref.trace) / std::abs(ref.trace)});
  }
  out.require(worst <= 1e-12, "functionals across 1, 2, 8 workers, max rel diff " + sci(worst));
  fs::remove_all(dir);
  return out;
}

void report(int id, const std::string& title, const Outcome& o, bool& all) {
  std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str());
  for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

Outcome guarded(const std::function<Outcome()>& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    Outcome o;
    o.require(false, std::string("exception: ") + e.what());
    return o;
  }
}

}  // namespace

int main() {
  bool all = true;
  report(1, "Lagrangian form identity", guarded(lagrangian_forms), all);
  report(2, "closed chain / product equivalence", guarded(closed_chain_equivalence), all);
  report(3, "spacelike implies vanishing Lagrangian", guarded(spacelike_vanishing), all);

  VacuumAudit va;
  std::string audit_error;
  try {
    va = run_vacuum_audit();
  } catch (const std::exception& e) {
    audit_error = e.what();
  }
  auto with_audit = [&](Outcome (*fn)(const VacuumAudit&)) {
    return guarded([&] {
      if (!audit_error.empty()) throw std::runtime_error(audit_error);
      return fn(va);
    });
  };
  report(4, "Minkowski causality recovery", with_audit(minkowski_recovery), all);
  report(5, "eigenvalue formula b +- sqrt(a^2 xi^2)", with_audit(eigenvalue_formula), all);
  report(6, "kernel identities", guarded(kernel_identities), all);
  report(7, "compatibility identity", guarded(compatibility_identity), all);
  report(8, "invariance suite", guarded(invariance_suite), all);
  report(9, "optimizer validation", guarded(optimizer_validation), all);
  report(10, "Hartree-Fock phase law", guarded(hartree_fock_phase), all);
  report(11, "determinism", guarded(determinism), all);
  return all ? 0 : 1;
}
