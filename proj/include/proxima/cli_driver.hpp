#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "proxima/config.hpp"

namespace proxima::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNonConvergence = 2,
  kHypothesisViolation = 3,  // proximal resolution failed: T(A0) not within B0
  kUnsupported = 4,
};

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon;
  std::optional<int> max_iter;
  bool json = false;
  std::vector<std::string> points;  // inline query points for project/check-pair
  std::string set_name = "A";       // target set for project: A, B or K
  int samples = 200;                // sample budget for check-contraction
};

int cmd_solve_bpp(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_solve_vi(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_dist(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_check_pair(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_project(const Options& opts, std::ostream& out, std::ostream& err);
int cmd_check_contraction(const Options& opts, std::ostream& out, std::ostream& err);

}  // namespace proxima::cli
