#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cfs::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kComputation = 3, kInfeasible = 4 };

struct BuildVacuumArgs {
  double eps = 1.0;
  int n_t = 2;
  int n_s = 2;
  double mass = 1.0;
  std::vector<std::string> add_modes;
  std::vector<std::string> remove_modes;
  std::string weight = "counting";  // "counting", "eps4" or a positive number
  std::string out;
  int threads = 1;
};

struct ClassifyArgs {
  std::string sys;
  std::vector<std::string> pairs{"all"};  // {"all"} or {"sample", N}
  std::uint64_t seed = 0;
  double band_mult = 3.0;
  double class_tol = 1e-6;
  std::string out;
  int threads = 1;
};

struct ActionArgs {
  std::string sys;
  bool report_constraints = false;
  int threads = 1;
};

struct MinimizeArgs {
  std::string config;
  std::string out_log;
  std::string out_best;
  int threads = 1;
};

int run_build_vacuum(const BuildVacuumArgs& args, std::ostream& out, std::ostream& err);
int run_classify(const ClassifyArgs& args, std::ostream& out, std::ostream& err);
int run_action(const ActionArgs& args, std::ostream& out, std::ostream& err);
int run_minimize(const MinimizeArgs& args, std::ostream& out, std::ostream& err);

/// "%.17g", with "nan"/"inf" spelled out.
std::string format_real(double v);

}  // namespace cfs::cli
