#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include <json.hpp>

#include "proxima/bpp_engine.hpp"
#include "proxima/vi_solver.hpp"

namespace proxima {

/// Shortest round-trip formatting ("%.17g"); used everywhere a double is
/// written to CSV so reruns produce byte-identical files.
std::string format_double(double v);

/// FNV-1a 64 hash of the canonical (key-sorted) dump, as hex.
std::string config_digest(const nlohmann::json& config);

nlohmann::json point_to_json(const Point& p);

/// Columns: n, coordinates (semicolon-joined), step, proximal_residual,
/// apriori_bound, aposteriori_bound. Bounds are filled when the trace knows
/// a contraction constant; missing cells stay empty.
void write_trace_csv(std::ostream& os, const IterationTrace& trace);

nlohmann::json certificate_json(const BppResult& result);
nlohmann::json certificate_json(const VIResult& result);

nlohmann::json run_report(const std::string& digest, const std::string& mode,
                          const nlohmann::json& certificate, double wall_ms,
                          const std::vector<std::string>& warnings,
                          const nlohmann::json& config);

/// Write-to-temp then rename, so readers never observe a partial file.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace proxima
