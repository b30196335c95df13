#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "proxima/pair_geometry.hpp"

namespace proxima {

/// Non-self map T: A -> B over a ProximalPair, with an optional declared
/// contraction constant. The callable must accept any point of A.
class ProximalMap {
 public:
  ProximalMap(ProximalPair pair, std::function<Point(const Point&)> map,
              std::optional<double> declared_k = {}, double eps = 1e-8);

  /// T(x) = M x + t on coordinates; keeps the affine data for reporting.
  static ProximalMap affine(ProximalPair pair, Matrix m, Vec t,
                            std::optional<double> declared_k = {}, double eps = 1e-8);
  /// Index table over a finite space: T(i) = table[i].
  static ProximalMap table(ProximalPair pair, std::vector<std::size_t> table,
                           std::optional<double> declared_k = {}, double eps = 1e-8);

  Point apply(const Point& x) const { return map_(x); }
  const ProximalPair& pair() const { return pair_; }
  std::optional<double> declared_k() const { return declared_k_; }
  double eps() const { return eps_; }

  const std::optional<std::pair<Matrix, Vec>>& affine_form() const { return affine_; }
  const std::optional<std::vector<std::size_t>>& table_form() const { return table_; }

  /// Samples A0 and checks the range conditions T(x) in B and T(x) in B0;
  /// returns the first violating point found, if any.
  struct RangeCheck {
    int samples_checked = 0;
    std::optional<Point> outside_b;
    std::optional<Point> outside_b0;
    bool ok() const { return !outside_b && !outside_b0; }
  };
  RangeCheck verify_range(int samples, std::uint64_t seed) const;

 private:
  ProximalPair pair_;
  std::function<Point(const Point&)> map_;
  std::optional<double> declared_k_;
  double eps_;
  std::optional<std::pair<Matrix, Vec>> affine_;
  std::optional<std::vector<std::size_t>> table_;
};

/// Record of one run: the sequence, step distances, proximal residuals
/// |d(x_{n+1}, T x_n) - d(A,B)|, and the geometric a-priori bounds when a
/// contraction constant is declared.
struct IterationTrace {
  std::vector<Point> points;
  std::vector<double> steps;
  std::vector<double> proximal_residuals;
  std::vector<double> apriori_bounds;  // k^n/(1-k) * d(x0,x1), indexed by n; empty if k unknown
  std::optional<double> k_for_bounds;
};

struct BppCertificate {
  double k_used = 0.0;
  bool k_declared = false;       // false: k_used is a sampled estimate, not a certificate
  double apriori_bound = 0.0;    // k^N/(1-k) * d(x0,x1)
  double aposteriori_bound = 0.0;  // k/(1-k) * d(x_{N-1}, x_N)
  std::vector<std::string> warnings;
};

struct BppResult {
  Point point;
  double final_gap = 0.0;  // |d(x, Tx) - d(A,B)|
  int iterations = 0;
  BppCertificate certificate;
};

struct IterateOutput {
  IterationTrace trace;
  BppResult result;
};

/// The iteration exhausted max_iterations; carries the partial trace.
struct IterationNonConvergence : Error {
  IterationNonConvergence(std::string msg, IterationTrace trace)
      : Error(std::move(msg)), trace(std::move(trace)) {}
  IterationTrace trace;
};

/// Step sizes failed to decrease over a sustained window: the map is not
/// behaving like a proximal contraction.
struct NotAContractionError : Error {
  NotAContractionError(std::string msg, double ratio, std::size_t step, IterationTrace trace)
      : Error(std::move(msg)), last_ratio(ratio), at_step(step), trace(std::move(trace)) {}
  double last_ratio;
  std::size_t at_step;
  IterationTrace trace;
};

struct InsufficientSamplesError : Error {
  using Error::Error;
};

/// Builds the proximal sequence x_{n+1} = resolve(T x_n) from x0 and stops on
/// the a-posteriori criterion k/(1-k)*step <= epsilon_stop when k is declared
/// (plain step <= epsilon_stop otherwise, with a warning in the certificate).
/// x0 must lie in A0 within the map tolerance.
IterateOutput iterate(const ProximalMap& map, const Point& x0,
                      const ConvergenceCriterion& criterion = {});

/// Exhaustive oracle over a finite space: all a in A whose gap d(a, Ta)
/// matches the pair separation within the map tolerance.
std::vector<std::size_t> brute_force_bpp(const ProximalMap& map);

struct ContractionEstimate {
  double k_hat = 0.0;
  int sample_count = 0;
  Point worst_x;
  Point worst_y;
  bool admissible = false;  // k_hat < 1 - 1e-6
};

/// Sampled lower bound on the contraction constant: the max over sampled A0
/// pairs (x, y) of d(resolve(Tx), resolve(Ty)) / d(x, y).
ContractionEstimate estimate_k(const ProximalMap& map, int samples, std::uint64_t seed);

/// Exact contraction constant of a finite-space map: the max ratio
/// d(u,v)/d(x,y) over all quadruples with d(u,Tx) = d(v,Ty) = d(A,B) within
/// the map tolerance. Returns +infinity when distinct u, v realize the
/// separation from the same x (no finite constant exists).
double finite_contraction_constant(const ProximalMap& map);

struct UniquenessReport {
  bool unique = false;
  double spread = 0.0;  // max pairwise distance of the limits
  std::vector<Point> limits;
};

/// Runs iterate from every start and measures the spread of the limits;
/// unique iff spread <= 10 * epsilon_stop. Errors from a run are rethrown
/// with the start index named.
UniquenessReport verify_uniqueness(const ProximalMap& map, const std::vector<Point>& starts,
                                   const ConvergenceCriterion& criterion = {});

struct BoundViolation {
  enum class Kind { Pairwise, Consecutive };
  Kind kind;
  std::size_t m = 0, n = 0;
  double lhs = 0.0, bound = 0.0;
};

struct BoundLedgerReport {
  std::vector<BoundViolation> violations;
  std::size_t pairs_checked = 0;
  bool ok() const { return violations.empty(); }
};

/// Audits a trace against the geometric estimates implied by a constant k:
/// d(x_m, x_n) <= k^m/(1-k) * d(x0,x1) + eps for all m < n, and
/// d(x_m, x_{m+1}) <= k^m * d(x0,x1) + eps for all m >= 1. Requires k in
/// [0,1). Distances are recomputed from the points, not read off the trace.
BoundLedgerReport check_bound_ledger(const MetricSpace& space, const IterationTrace& trace,
                                     double k, double eps = 1e-10);

}  // namespace proxima
