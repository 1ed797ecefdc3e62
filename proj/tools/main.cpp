#include <iostream>

#include <CLI11.hpp>

#include "cfs/parallel.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace cfs::cli;

  CLI::App app{"Causal fermion system toolkit: lattice vacua, causal action, minimization"};
  app.require_subcommand(1);

  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: CFS_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);

  BuildVacuumArgs build;
  auto* cmd_build = app.add_subcommand("build-vacuum", "Build the lattice Dirac sea system and write it as JSON");
  cmd_build->add_option("--eps", build.eps, "Lattice spacing")->required();
  cmd_build->add_option("--nt", build.n_t, "Time extent")->required();
  cmd_build->add_option("--ns", build.n_s, "Spatial extent")->required();
  cmd_build->add_option("--mass", build.mass, "Fermion mass")->required();
  cmd_build->add_option("--add-mode", build.add_modes, "Occupy a positive-energy mode a1,a2,a3,s")
      ->take_first();
  cmd_build->add_option("--remove-mode", build.remove_modes, "Vacate a sea mode a1,a2,a3,s")->take_first();
  cmd_build->add_option("--weight", build.weight, "Atom weight: counting (1), eps4, or a positive number");
  cmd_build->add_option("--out", build.out, "Output system file")->required();
  for (auto* opt : {cmd_build->get_option("--add-mode"), cmd_build->get_option("--remove-mode")}) {
    opt->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)->allow_extra_args(false);
  }

  ClassifyArgs classify;
  auto* cmd_classify = app.add_subcommand("classify", "Audit spectral causality against the Minkowski light cone");
  cmd_classify->add_option("--sys", classify.sys, "System file")->required()->check(CLI::ExistingFile);
  cmd_classify->add_option("--pairs", classify.pairs, "'all' or 'sample N'")->expected(1, 2);
  cmd_classify->add_option("--seed", classify.seed, "Sampling seed (default 0)");
  cmd_classify->add_option("--band-mult", classify.band_mult, "Light-cone band half-width in units of eps");
  cmd_classify->add_option("--class-tol", classify.class_tol, "Relative tolerance of the spectral classifier");
  cmd_classify->add_option("--out", classify.out, "Output CSV")->required();

  ActionArgs action;
  auto* cmd_action = app.add_subcommand("action", "Evaluate S, T, volume and trace of a system file");
  cmd_action->add_option("--sys", action.sys, "System file")->required()->check(CLI::ExistingFile);
  cmd_action->add_flag("--report-constraints", action.report_constraints, "Also report constraint data");

  MinimizeArgs minimize;
  auto* cmd_minimize = app.add_subcommand("minimize", "Minimize the causal action over a registered family");
  cmd_minimize->add_option("--config", minimize.config, "JSON problem definition")->required()->check(CLI::ExistingFile);
  cmd_minimize->add_option("--out-log", minimize.out_log, "Iterate log CSV")->required();
  cmd_minimize->add_option("--out-best", minimize.out_best, "Best system file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (threads <= 0) threads = cfs::default_thread_count();
  build.threads = classify.threads = action.threads = minimize.threads = threads;

  if (*cmd_build) return run_build_vacuum(build, std::cout, std::cerr);
  if (*cmd_classify) return run_classify(classify, std::cout, std::cerr);
  if (*cmd_action) return run_action(action, std::cout, std::cerr);
  return run_minimize(minimize, std::cout, std::cerr);
}
