#include "proxima/report.hpp"

#include <cstdio>
#include <fstream>

namespace proxima {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string config_digest(const nlohmann::json& config) {
  const std::string dump = config.dump();  // object keys are sorted
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json point_to_json(const Point& p) {
  if (p.is_index()) return p.index();
  return p.coords();
}

void write_trace_csv(std::ostream& os, const IterationTrace& trace) {
  os << "n,coordinates,step,proximal_residual,apriori_bound,aposteriori_bound\n";
  const std::optional<double> k = trace.k_for_bounds;
  for (std::size_t n = 0; n < trace.points.size(); ++n) {
    os << n << ",";
    const Point& p = trace.points[n];
    if (p.is_index()) {
      os << p.index();
    } else {
      const Vec& c = p.coords();
      for (std::size_t i = 0; i < c.size(); ++i) {
        if (i) os << ";";
        os << format_double(c[i]);
      }
    }
    os << ",";
    if (n < trace.steps.size()) os << format_double(trace.steps[n]);
    os << ",";
    if (n >= 1 && n - 1 < trace.proximal_residuals.size())
      os << format_double(trace.proximal_residuals[n - 1]);
    os << ",";
    if (n < trace.apriori_bounds.size()) os << format_double(trace.apriori_bounds[n]);
    os << ",";
    if (k && n >= 1 && n - 1 < trace.steps.size())
      os << format_double(*k / (1.0 - *k) * trace.steps[n - 1]);
    os << "\n";
  }
}

nlohmann::json certificate_json(const BppResult& result) {
  return nlohmann::json{
      {"point", point_to_json(result.point)},
      {"final_gap", result.final_gap},
      {"iterations", result.iterations},
      {"k_used", result.certificate.k_used},
      {"k_declared", result.certificate.k_declared},
      {"bounds",
       {{"apriori", result.certificate.apriori_bound},
        {"aposteriori", result.certificate.aposteriori_bound}}},
      {"warnings", result.certificate.warnings},
  };
}

nlohmann::json certificate_json(const VIResult& result) {
  return nlohmann::json{
      {"point", point_to_json(result.solution)},
      {"final_gap", result.natural_residual},
      {"natural_residual", result.natural_residual},
      {"iterations", result.iterations},
      {"lambda", result.lambda},
      {"k_used", result.k_used},
      {"k_declared", result.certified},
      {"certified", result.certified},
      {"bounds",
       {{"apriori", nullptr},
        {"aposteriori",
         result.k_used < 1.0 && !result.trace.steps.empty()
             ? nlohmann::json(result.k_used / (1.0 - result.k_used) * result.trace.steps.back())
             : nlohmann::json(nullptr)}}},
      {"warnings", result.warnings},
  };
}

nlohmann::json run_report(const std::string& digest, const std::string& mode,
                          const nlohmann::json& certificate, double wall_ms,
                          const std::vector<std::string>& warnings,
                          const nlohmann::json& config) {
  return nlohmann::json{
      {"digest", digest},     {"mode", mode},         {"result", certificate},
      {"wall_time_ms", wall_ms}, {"warnings", warnings}, {"config", config},
  };
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace proxima
