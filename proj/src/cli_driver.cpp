#include "proxima/cli_driver.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "proxima/report.hpp"

namespace proxima::cli {

namespace {

using nlohmann::json;

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedConfigError& e) {
    err << "unsupported configuration: " << e.what() << "\n";
    return kUnsupported;
  } catch (const ResolutionFailureError& e) {
    err << "hypothesis violation: " << e.what() << "\n";
    return kHypothesisViolation;
  } catch (const NotAContractionError& e) {
    err << "not a contraction: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const IterationNonConvergence& e) {
    err << "nonconvergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const SeparationNonConvergence& e) {
    err << "nonconvergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const ProjectionNonConvergence& e) {
    err << "nonconvergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const DivergenceError& e) {
    err << "divergence: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const InfeasibleIntersectionError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kNonConvergence;
  } catch (const CannotCertifyError& e) {
    err << "cannot certify: " << e.what() << "\n";
    return kConfigError;
  } catch (const InsufficientSamplesError& e) {
    err << "insufficient samples: " << e.what() << "\n";
    return kConfigError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

ProblemConfig load_with_overrides(const Options& opts) {
  ProblemConfig cfg = load_config(opts.config_path);
  if (opts.seed) {
    cfg.solver.seed = *opts.seed;
    cfg.raw["solver"]["seed"] = *opts.seed;
  }
  if (opts.epsilon) {
    if (!(*opts.epsilon > 0.0)) throw ConfigError("--epsilon must be > 0");
    cfg.solver.epsilon = *opts.epsilon;
    cfg.raw["solver"]["epsilon"] = *opts.epsilon;
  }
  if (opts.max_iter) {
    if (*opts.max_iter < 1) throw ConfigError("--max-iter must be >= 1");
    cfg.solver.max_iterations = *opts.max_iter;
    cfg.raw["solver"]["max_iterations"] = *opts.max_iter;
  }
  return cfg;
}

void write_outputs(const Options& opts, const IterationTrace& trace, const json& certificate,
                   const json& report) {
  const std::filesystem::path dir(opts.out_dir);
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  write_trace_csv(csv, trace);
  atomic_write(dir / "trace.csv", csv.str());
  atomic_write(dir / "certificate.json", certificate.dump(2) + "\n");
  atomic_write(dir / "report.json", report.dump(2) + "\n");
}

ConvergenceCriterion criterion_of(const SolverConfig& solver) {
  return ConvergenceCriterion{solver.epsilon_stop, solver.max_iterations};
}

double spread_of_limits(const MetricSpace& space, const std::vector<Point>& limits) {
  double spread = 0.0;
  for (std::size_t i = 0; i < limits.size(); ++i)
    for (std::size_t j = i + 1; j < limits.size(); ++j)
      spread = std::max(spread, space.distance(limits[i], limits[j]));
  return spread;
}

}  // namespace

int cmd_solve_bpp(const Options& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const auto start_time = std::chrono::steady_clock::now();
    ProblemConfig cfg = load_with_overrides(opts);
    if (cfg.mode != ProblemConfig::Mode::Bpp)
      throw ConfigError("solve-bpp needs a config with mode \"bpp\"");
    ProximalPair pair = build_pair(cfg);
    ProximalMap map = build_map(cfg, std::move(pair));
    const ConvergenceCriterion criterion = criterion_of(cfg.solver);

    IterateOutput run = iterate(map, cfg.solver.starts.front(), criterion);
    std::vector<std::string> warnings = run.result.certificate.warnings;

    json certificate = certificate_json(run.result);
    if (cfg.solver.starts.size() > 1) {
      const UniquenessReport uniq = verify_uniqueness(map, cfg.solver.starts, criterion);
      certificate["multi_start_spread"] = uniq.spread;
      certificate["multi_start_unique"] = uniq.unique;
      if (!uniq.unique)
        warnings.push_back("multi-start spread " + format_double(uniq.spread) +
                           " exceeds 10 * epsilon_stop");
    }
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start_time)
                               .count();
    const json report = run_report(config_digest(cfg.raw), "bpp", certificate, wall_ms,
                                   warnings, cfg.raw);
    write_outputs(opts, run.trace, certificate, report);
    if (opts.json) {
      out << certificate.dump(2) << "\n";
    } else {
      out << "best proximity point: " << run.result.point.describe() << "\n"
          << "final gap |d(x,Tx) - d(A,B)|: " << format_double(run.result.final_gap) << "\n"
          << "iterations: " << run.result.iterations << "\n"
          << "separation d(A,B): " << format_double(map.pair().separation()) << "\n";
      for (const std::string& w : warnings) out << "warning: " << w << "\n";
    }
    return kOk;
  });
}

int cmd_solve_vi(const Options& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    const auto start_time = std::chrono::steady_clock::now();
    ProblemConfig cfg = load_with_overrides(opts);
    if (cfg.mode != ProblemConfig::Mode::Vi)
      throw ConfigError("solve-vi needs a config with mode \"vi\"");
    VIProblem problem = build_vi_problem(cfg);
    const ConvergenceCriterion criterion = criterion_of(cfg.solver);

    Vec u0;
    if (!cfg.solver.starts.empty()) {
      u0 = cfg.solver.starts.front().coords();
    } else {
      u0 = problem.k.project(Vec(problem.k.dim(), 0.0)).point;
    }
    if (!problem.lambda && !opts.json) {
      const LambdaChoice choice = choose_lambda(problem.s);
      out << "auto lambda = " << format_double(choice.lambda)
          << ", predicted k = " << format_double(choice.predicted_k) << "\n";
    }
    VIResult result = solve_vi(problem, u0, criterion);

    json certificate = certificate_json(result);
    std::vector<std::string> warnings = result.warnings;
    if (cfg.solver.starts.size() > 1) {
      std::vector<Point> limits;
      for (const Point& s : cfg.solver.starts)
        limits.push_back(solve_vi(problem, s.coords(), criterion).solution);
      const double spread =
          spread_of_limits(MetricSpace::euclidean(problem.k.dim(), 2.0), limits);
      certificate["multi_start_spread"] = spread;
      certificate["multi_start_unique"] = spread <= 10.0 * criterion.epsilon_stop;
    }
    const double wall_ms = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - start_time)
                               .count();
    const json report = run_report(config_digest(cfg.raw), "vi", certificate, wall_ms,
                                   warnings, cfg.raw);
    write_outputs(opts, result.trace, certificate, report);
    if (opts.json) {
      out << certificate.dump(2) << "\n";
    } else {
      out << "solution: " << result.solution.describe() << "\n"
          << "natural residual: " << format_double(result.natural_residual) << "\n"
          << "iterations: " << result.iterations << "\n"
          << "lambda: " << format_double(result.lambda)
          << (result.certified ? " (certified contraction)" : " (uncertified)") << "\n";
      for (const std::string& w : warnings) out << "warning: " << w << "\n";
    }
    return kOk;
  });
}

int cmd_dist(const Options& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    ProblemConfig cfg = load_with_overrides(opts);
    ProximalPair pair = build_pair(cfg);
    if (opts.json) {
      out << json{{"separation", pair.separation()},
                  {"method", to_string(pair.method())},
                  {"witness_a", point_to_json(pair.witness_a())},
                  {"witness_b", point_to_json(pair.witness_b())}}
                 .dump(2)
          << "\n";
    } else {
      out << "d(A,B) = " << format_double(pair.separation()) << "  ["
          << to_string(pair.method()) << "]\n"
          << "witness a = " << pair.witness_a().describe()
          << ", b = " << pair.witness_b().describe() << "\n";
    }
    return kOk;
  });
}

int cmd_check_pair(const Options& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    ProblemConfig cfg = load_with_overrides(opts);
    ProximalPair pair = build_pair(cfg);
    const double eps = pair.eps();
    json j{{"separation", pair.separation()},
           {"method", to_string(pair.method())},
           {"witness_a", point_to_json(pair.witness_a())},
           {"witness_b", point_to_json(pair.witness_b())},
           {"witness_a_in_A0", pair.in_A0(pair.witness_a(), eps)},
           {"witness_b_in_B0", pair.in_B0(pair.witness_b(), eps)}};
    if (pair.is_finite_pair()) {
      j["A0"] = pair.enumerate_A0();
      j["B0"] = pair.enumerate_B0();
    }
    json queries = json::array();
    for (const std::string& text : opts.points) {
      const Point p = parse_inline_point(text, pair.space());
      queries.push_back(json{{"point", point_to_json(p)},
                             {"in_A", pair.contains(Side::A, p, eps)},
                             {"in_B", pair.contains(Side::B, p, eps)},
                             {"in_A0", pair.in_A0(p, eps)},
                             {"in_B0", pair.in_B0(p, eps)}});
    }
    if (!queries.empty()) j["queries"] = queries;
    if (opts.json) {
      out << j.dump(2) << "\n";
    } else {
      out << "d(A,B) = " << format_double(pair.separation()) << "  ["
          << to_string(pair.method()) << "]\n"
          << "witness a in A0: " << (j["witness_a_in_A0"].get<bool>() ? "yes" : "no")
          << ", witness b in B0: " << (j["witness_b_in_B0"].get<bool>() ? "yes" : "no") << "\n";
      if (pair.is_finite_pair()) {
        out << "A0 =";
        for (std::size_t i : pair.enumerate_A0()) out << " " << i;
        out << "\nB0 =";
        for (std::size_t i : pair.enumerate_B0()) out << " " << i;
        out << "\n";
      }
      for (const auto& q : queries)
        out << q["point"].dump() << ": in_A0 = " << (q["in_A0"].get<bool>() ? "yes" : "no")
            << ", in_B0 = " << (q["in_B0"].get<bool>() ? "yes" : "no") << "\n";
    }
    return kOk;
  });
}

int cmd_project(const Options& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    ProblemConfig cfg = load_with_overrides(opts);
    if (cfg.space->is_finite())
      throw UnsupportedConfigError("projection applies to euclidean configurations");
    const ConvexSet* target = nullptr;
    if (opts.set_name == "A" || opts.set_name == "K") {
      if (!cfg.a.convex) throw ConfigError("config has no convex set " + opts.set_name);
      target = &*cfg.a.convex;
    } else if (opts.set_name == "B") {
      if (!cfg.b.convex) throw ConfigError("config has no convex set B");
      target = &*cfg.b.convex;
    } else {
      throw ConfigError("--set must be A, B or K");
    }
    if (opts.points.empty()) throw ConfigError("project needs at least one --point");
    json results = json::array();
    for (const std::string& text : opts.points) {
      const Point p = parse_inline_point(text, *cfg.space);
      const ProjectionResult pr = target->project(p.coords());
      results.push_back(json{{"point", p.coords()},
                             {"projection", pr.point},
                             {"distance", pr.distance},
                             {"iterations", pr.iterations}});
    }
    if (opts.json) {
      out << results.dump(2) << "\n";
    } else {
      for (const auto& r : results) {
        out << r["point"].dump() << " -> " << r["projection"].dump()
            << "  distance = " << format_double(r["distance"].get<double>());
        if (r["iterations"].get<int>() > 0)
          out << "  (dykstra sweeps: " << r["iterations"].get<int>() << ")";
        out << "\n";
      }
    }
    return kOk;
  });
}

int cmd_check_contraction(const Options& opts, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&]() -> int {
    ProblemConfig cfg = load_with_overrides(opts);
    if (cfg.mode != ProblemConfig::Mode::Bpp)
      throw ConfigError("check-contraction needs a config with mode \"bpp\"");
    ProximalPair pair = build_pair(cfg);
    ProximalMap map = build_map(cfg, std::move(pair));
    const ContractionEstimate est = estimate_k(map, opts.samples, cfg.solver.seed);
    const ProximalMap::RangeCheck range = map.verify_range(opts.samples, cfg.solver.seed);
    json j{{"k_hat", est.k_hat},
           {"admissible", est.admissible},
           {"sample_count", est.sample_count},
           {"worst_x", point_to_json(est.worst_x)},
           {"worst_y", point_to_json(est.worst_y)},
           {"range_ok", range.ok()}};
    if (range.outside_b) j["range_violation_outside_B"] = point_to_json(*range.outside_b);
    if (range.outside_b0) j["range_violation_outside_B0"] = point_to_json(*range.outside_b0);
    if (map.declared_k()) j["declared_k"] = *map.declared_k();
    if (opts.json) {
      out << j.dump(2) << "\n";
    } else {
      out << "k-hat = " << format_double(est.k_hat) << " over " << est.sample_count
          << " samples (" << (est.admissible ? "admissible" : "NOT admissible") << ")\n"
          << "worst pair: " << est.worst_x.describe() << ", " << est.worst_y.describe() << "\n";
      if (!range.ok()) out << "warning: sampled range check failed (T(A0) strays from B0)\n";
    }
    return kOk;
  });
}

}  // namespace proxima::cli
