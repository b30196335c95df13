#include "proxima/bpp_engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

namespace proxima {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kNonContractionWindow = 50;   // steps of sustained non-decrease
constexpr int kRunningEstimateWindow = 20;  // step ratios kept for the k estimate
constexpr double kAdmissibleMargin = 1e-6;

}  // namespace

ProximalMap::ProximalMap(ProximalPair pair, std::function<Point(const Point&)> map,
                         std::optional<double> declared_k, double eps)
    : pair_(std::move(pair)), map_(std::move(map)), declared_k_(declared_k), eps_(eps) {
  if (!map_) throw InvalidArgumentError("proximal map needs a callable");
  if (!(eps_ > 0.0)) throw InvalidArgumentError("map tolerance must be > 0");
  if (declared_k_ && !(*declared_k_ >= 0.0 && *declared_k_ < 1.0))
    throw InvalidArgumentError("declared contraction constant must lie in [0, 1)");
}

ProximalMap ProximalMap::affine(ProximalPair pair, Matrix m, Vec t,
                                std::optional<double> declared_k, double eps) {
  if (pair.is_finite_pair())
    throw InvalidArgumentError("affine maps apply to euclidean pairs");
  const std::size_t dim = pair.space().size();
  if (m.rows != dim || m.cols != dim || t.size() != dim)
    throw DimensionMismatchError("affine map dimensions do not match the space");
  auto fn = [m, t](const Point& x) {
    Vec y = matvec(m, x.coords());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += t[i];
    return Point::euclidean(std::move(y));
  };
  ProximalMap pm(std::move(pair), std::move(fn), declared_k, eps);
  pm.affine_ = std::make_pair(std::move(m), std::move(t));
  return pm;
}

ProximalMap ProximalMap::table(ProximalPair pair, std::vector<std::size_t> table,
                               std::optional<double> declared_k, double eps) {
  if (!pair.is_finite_pair())
    throw InvalidArgumentError("table maps apply to finite pairs");
  const std::size_t n = pair.space().size();
  if (table.size() != n)
    throw DimensionMismatchError("map table must have one entry per point of the space");
  for (std::size_t v : table)
    if (v >= n) throw DimensionMismatchError("map table entry out of range");
  auto fn = [table](const Point& x) { return Point::finite(table[x.index()]); };
  ProximalMap pm(std::move(pair), std::move(fn), declared_k, eps);
  pm.table_ = std::move(table);
  return pm;
}

ProximalMap::RangeCheck ProximalMap::verify_range(int samples, std::uint64_t seed) const {
  RangeCheck rc;
  std::vector<Point> candidates;
  if (pair_.is_finite_pair()) {
    for (std::size_t i : pair_.enumerate_A0()) candidates.push_back(Point::finite(i));
  } else {
    for (Vec& v : pair_.set_a().sample(samples, seed)) {
      Point p = Point::euclidean(std::move(v));
      if (pair_.in_A0(p, eps_)) candidates.push_back(std::move(p));
    }
  }
  for (const Point& x : candidates) {
    if (rc.samples_checked >= samples) break;
    ++rc.samples_checked;
    const Point y = map_(x);
    if (!pair_.contains(Side::B, y, eps_)) {
      if (!rc.outside_b) rc.outside_b = x;
      continue;
    }
    if (!pair_.in_B0(y, eps_) && !rc.outside_b0) rc.outside_b0 = x;
  }
  return rc;
}

IterateOutput iterate(const ProximalMap& map, const Point& x0,
                      const ConvergenceCriterion& criterion) {
  criterion.validate();
  const ProximalPair& pair = map.pair();
  const MetricSpace& space = pair.space();
  const double eps = map.eps();
  if (!pair.in_A0(x0, eps))
    throw ResolutionFailureError(
        "initial point " + x0.describe() + " is not in the proximal subset A0",
        x0, pair.distance_to_side(x0, Side::B).distance, pair.separation());

  IterationTrace trace;
  trace.k_for_bounds = map.declared_k();
  trace.points.push_back(x0);

  const bool k_known = map.declared_k().has_value();
  const double k = map.declared_k().value_or(0.0);
  double d01 = 0.0;
  std::deque<double> recent_ratios;
  double running_k = 0.0;
  int nondecreasing_run = 0;
  std::vector<std::string> warnings;
  bool declared_k_contradicted = false;

  auto finish = [&](int iterations) {
    BppResult result;
    result.point = trace.points.back();
    const Point tx = map.apply(result.point);
    result.final_gap = std::abs(space.distance(result.point, tx) - pair.separation());
    result.iterations = iterations;
    double k_used = k;
    if (!k_known) {
      k_used = std::min(running_k, 1.0 - kAdmissibleMargin);
      warnings.push_back(
          "no contraction constant declared: stopping used the plain step criterion and "
          "bounds use a sampled ratio estimate");
    }
    result.certificate.k_used = k_used;
    result.certificate.k_declared = k_known;
    const double last_step = trace.steps.empty() ? 0.0 : trace.steps.back();
    const double denom = 1.0 - k_used;
    result.certificate.aposteriori_bound = denom > 0.0 ? k_used / denom * last_step : kInf;
    result.certificate.apriori_bound =
        denom > 0.0 ? std::pow(k_used, static_cast<double>(trace.steps.size())) / denom * d01
                    : kInf;
    result.certificate.warnings = std::move(warnings);
    return IterateOutput{std::move(trace), std::move(result)};
  };

  for (int n = 0; n < criterion.max_iterations; ++n) {
    const Point& xn = trace.points.back();
    const Point y = map.apply(xn);
    const Point xnext = pair.proximal_resolve(y, eps);
    const double residual = std::abs(space.distance(xnext, y) - pair.separation());
    const double step = space.distance(xn, xnext);
    trace.points.push_back(xnext);
    trace.steps.push_back(step);
    trace.proximal_residuals.push_back(residual);
    if (n == 0) {
      d01 = step;
      if (k_known) {
        const double denom = 1.0 - k;
        trace.apriori_bounds.push_back(d01 / denom);  // n = 0
      }
    }
    if (k_known)
      trace.apriori_bounds.push_back(std::pow(k, static_cast<double>(n + 1)) / (1.0 - k) * d01);

    if (trace.steps.size() >= 2) {
      const double prev = trace.steps[trace.steps.size() - 2];
      if (prev > 1e-300) {
        const double ratio = step / prev;
        recent_ratios.push_back(ratio);
        if (recent_ratios.size() > kRunningEstimateWindow) recent_ratios.pop_front();
        running_k = *std::max_element(recent_ratios.begin(), recent_ratios.end());
        if (k_known && !declared_k_contradicted && step > k * prev + eps) {
          declared_k_contradicted = true;
          warnings.push_back("measured step ratio " + std::to_string(ratio) +
                             " exceeds the declared constant " + std::to_string(k) +
                             " at step " + std::to_string(n + 1));
        }
        if (ratio >= 1.0 - 1e-12) {
          if (++nondecreasing_run >= kNonContractionWindow - 1)
            throw NotAContractionError(
                "step sizes have not decreased over the last " +
                    std::to_string(kNonContractionWindow) +
                    " steps (latest ratio " + std::to_string(ratio) +
                    "): the map is not a proximal contraction on this orbit",
                ratio, static_cast<std::size_t>(n + 1), std::move(trace));
        } else {
          nondecreasing_run = 0;
        }
      }
    }

    const bool stop = k_known ? (k / (1.0 - k) * step <= criterion.epsilon_stop)
                              : (step <= criterion.epsilon_stop);
    if (stop) return finish(n + 1);
  }
  throw IterationNonConvergence(
      "no convergence within " + std::to_string(criterion.max_iterations) + " iterations",
      std::move(trace));
}

std::vector<std::size_t> brute_force_bpp(const ProximalMap& map) {
  const ProximalPair& pair = map.pair();
  if (!pair.is_finite_pair())
    throw UnsupportedConfigError("exhaustive enumeration applies to finite spaces only");
  std::vector<std::size_t> out;
  for (std::size_t i : pair.indices_a()) {
    const Point x = Point::finite(i);
    const double gap = pair.space().distance(x, map.apply(x));
    if (std::abs(gap - pair.separation()) <= map.eps()) out.push_back(i);
  }
  return out;
}

ContractionEstimate estimate_k(const ProximalMap& map, int samples, std::uint64_t seed) {
  if (samples < 2) throw InvalidArgumentError("contraction estimation needs samples >= 2");
  const ProximalPair& pair = map.pair();
  const MetricSpace& space = pair.space();
  const double eps = map.eps();

  std::vector<Point> pool;
  if (pair.is_finite_pair()) {
    std::vector<std::size_t> a0 = pair.enumerate_A0();
    if (a0.size() > static_cast<std::size_t>(samples)) {
      std::mt19937_64 rng(seed);
      std::shuffle(a0.begin(), a0.end(), rng);
      a0.resize(static_cast<std::size_t>(samples));
      std::sort(a0.begin(), a0.end());
    }
    for (std::size_t i : a0) pool.push_back(Point::finite(i));
  } else {
    // draw batches from A and keep the proximal ones
    std::uint64_t batch_seed = seed;
    for (int round = 0; round < 64 && pool.size() < static_cast<std::size_t>(samples); ++round) {
      for (Vec& v : pair.set_a().sample(samples, batch_seed)) {
        Point p = Point::euclidean(std::move(v));
        if (pair.in_A0(p, eps)) {
          pool.push_back(std::move(p));
          if (pool.size() >= static_cast<std::size_t>(samples)) break;
        }
      }
      batch_seed = batch_seed * 6364136223846793005ULL + 1442695040888963407ULL;
    }
  }
  // drop exact duplicates so the ratio is well defined
  std::vector<Point> distinct;
  for (const Point& p : pool) {
    bool dup = false;
    for (const Point& q : distinct)
      if (space.distance(p, q) <= 1e-10) {
        dup = true;
        break;
      }
    if (!dup) distinct.push_back(p);
  }
  if (distinct.size() < 2)
    throw InsufficientSamplesError("fewer than 2 distinct points of A0 were found");

  std::vector<Point> resolved;
  resolved.reserve(distinct.size());
  for (const Point& p : distinct) resolved.push_back(pair.proximal_resolve(map.apply(p), eps));

  ContractionEstimate est;
  est.sample_count = static_cast<int>(distinct.size());
  est.worst_x = distinct[0];
  est.worst_y = distinct[1];
  for (std::size_t i = 0; i < distinct.size(); ++i)
    for (std::size_t j = i + 1; j < distinct.size(); ++j) {
      const double dxy = space.distance(distinct[i], distinct[j]);
      if (dxy <= 1e-10) continue;
      const double ratio = space.distance(resolved[i], resolved[j]) / dxy;
      if (ratio > est.k_hat) {
        est.k_hat = ratio;
        est.worst_x = distinct[i];
        est.worst_y = distinct[j];
      }
    }
  est.admissible = est.k_hat < 1.0 - kAdmissibleMargin;
  return est;
}

double finite_contraction_constant(const ProximalMap& map) {
  const ProximalPair& pair = map.pair();
  if (!pair.is_finite_pair())
    throw UnsupportedConfigError("the exact contraction constant needs a finite space");
  const MetricSpace& space = pair.space();
  const double eps = map.eps();
  const auto& a_idx = pair.indices_a();

  // realizers[x] = all u in A with d(u, Tx) = d(A,B) within eps
  std::vector<std::vector<std::size_t>> realizers(a_idx.size());
  for (std::size_t xi = 0; xi < a_idx.size(); ++xi) {
    const Point tx = map.apply(Point::finite(a_idx[xi]));
    for (std::size_t u : a_idx)
      if (std::abs(space.distance(Point::finite(u), tx) - pair.separation()) <= eps)
        realizers[xi].push_back(u);
  }
  double k = 0.0;
  for (std::size_t xi = 0; xi < a_idx.size(); ++xi)
    for (std::size_t yi = xi; yi < a_idx.size(); ++yi) {
      const double dxy =
          space.distances()(a_idx[xi], a_idx[yi]);
      for (std::size_t u : realizers[xi])
        for (std::size_t v : realizers[yi]) {
          const double duv = space.distances()(u, v);
          if (dxy <= 1e-12) {
            if (duv > 1e-12) return kInf;  // distinct realizers at zero distance
            continue;
          }
          k = std::max(k, duv / dxy);
        }
    }
  return k;
}

namespace {

// rethrow the known engine errors with the start index named, preserving type
[[noreturn]] void rethrow_tagged(std::size_t start_index) {
  const std::string tag = "start #" + std::to_string(start_index) + ": ";
  try {
    throw;
  } catch (const ResolutionFailureError& e) {
    throw ResolutionFailureError(tag + e.what(), e.violating_point, e.achieved, e.expected);
  } catch (const NotAContractionError& e) {
    throw NotAContractionError(tag + e.what(), e.last_ratio, e.at_step, e.trace);
  } catch (const IterationNonConvergence& e) {
    throw IterationNonConvergence(tag + e.what(), e.trace);
  } catch (const Error& e) {
    throw Error(tag + e.what());
  }
}

}  // namespace

UniquenessReport verify_uniqueness(const ProximalMap& map, const std::vector<Point>& starts,
                                   const ConvergenceCriterion& criterion) {
  if (starts.empty()) throw InvalidArgumentError("uniqueness check needs at least one start");
  UniquenessReport report;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    try {
      report.limits.push_back(iterate(map, starts[i], criterion).result.point);
    } catch (...) {
      rethrow_tagged(i);
    }
  }
  const MetricSpace& space = map.pair().space();
  for (std::size_t i = 0; i < report.limits.size(); ++i)
    for (std::size_t j = i + 1; j < report.limits.size(); ++j)
      report.spread = std::max(report.spread, space.distance(report.limits[i], report.limits[j]));
  report.unique = report.spread <= 10.0 * criterion.epsilon_stop;
  return report;
}

BoundLedgerReport check_bound_ledger(const MetricSpace& space, const IterationTrace& trace,
                                     double k, double eps) {
  if (!(k >= 0.0 && k < 1.0))
    throw InvalidArgumentError("bound ledger needs a constant in [0, 1), got " +
                               std::to_string(k));
  BoundLedgerReport report;
  const std::size_t n_points = trace.points.size();
  if (n_points < 2) return report;  // vacuous
  const double d01 = space.distance(trace.points[0], trace.points[1]);
  const double denom = 1.0 - k;
  for (std::size_t m = 0; m + 1 < n_points; ++m) {
    const double bound = std::pow(k, static_cast<double>(m)) / denom * d01 + eps;
    for (std::size_t n = m + 1; n < n_points; ++n) {
      ++report.pairs_checked;
      const double lhs = space.distance(trace.points[m], trace.points[n]);
      if (lhs > bound)
        report.violations.push_back({BoundViolation::Kind::Pairwise, m, n, lhs, bound});
    }
  }
  for (std::size_t m = 1; m + 1 < n_points; ++m) {
    const double lhs = space.distance(trace.points[m], trace.points[m + 1]);
    const double bound = std::pow(k, static_cast<double>(m)) * d01 + eps;
    ++report.pairs_checked;
    if (lhs > bound)
      report.violations.push_back({BoundViolation::Kind::Consecutive, m, m + 1, lhs, bound});
  }
  return report;
}

}  // namespace proxima
