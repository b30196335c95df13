#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxima/bpp_engine.hpp"
#include "proxima/vi_solver.hpp"

namespace proxima {

/// Solver block of a problem description. epsilon is the proximal
/// membership tolerance, epsilon_stop the stopping tolerance.
struct SolverConfig {
  double epsilon = 1e-8;
  double epsilon_stop = 1e-8;
  int max_iterations = 100000;
  std::uint64_t seed = 0;
  std::vector<Point> starts;
};

struct SetSpec {
  std::optional<ConvexSet> convex;
  std::vector<std::size_t> indices;
};

struct MapSpec {
  std::optional<std::pair<Matrix, Vec>> affine;       // M, t
  std::optional<std::vector<std::size_t>> table;
  std::optional<double> declared_k;
};

struct ViSpec {
  Operator op;
  std::optional<double> lambda;  // empty means "auto"
};

/// A fully validated problem description. Parsing rejects unknown keys and
/// checks every referenced file; the original document is kept for report
/// round-trips.
struct ProblemConfig {
  enum class Mode { Bpp, Vi };
  Mode mode = Mode::Bpp;
  std::optional<MetricSpace> space;
  SetSpec a;  // holds K in vi mode
  SetSpec b;
  std::optional<MapSpec> map;
  std::optional<ViSpec> vi;
  SolverConfig solver;
  nlohmann::json raw;
};

ProblemConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ProblemConfig load_config(const std::string& path);

ProximalPair build_pair(const ProblemConfig& cfg);
ProximalMap build_map(const ProblemConfig& cfg, ProximalPair pair);
VIProblem build_vi_problem(const ProblemConfig& cfg);

/// Parses an inline point: "1.5,2" for euclidean spaces, "3" for finite.
Point parse_inline_point(const std::string& text, const MetricSpace& space);

}  // namespace proxima
