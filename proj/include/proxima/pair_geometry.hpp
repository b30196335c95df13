#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proxima/convex_sets.hpp"
#include "proxima/metric.hpp"

namespace proxima {

enum class Side { A, B };

enum class SeparationMethod { ClosedForm, AlternatingProjections, Exhaustive };

std::string to_string(SeparationMethod m);

/// Alternating projections hit the sweep cap; best bracket is
/// [0, best_gap] since the separation is a nonnegative infimum.
struct SeparationNonConvergence : Error {
  SeparationNonConvergence(std::string msg, double best_gap)
      : Error(std::move(msg)), best_gap(best_gap) {}
  double best_gap;
};

/// The resolver could not realize the pair separation from the given point:
/// numerically the point is not proximal on the B side.
struct ResolutionFailureError : Error {
  ResolutionFailureError(std::string msg, Point violating, double achieved, double expected)
      : Error(std::move(msg)),
        violating_point(std::move(violating)),
        achieved(achieved),
        expected(expected) {}
  Point violating_point;
  double achieved;
  double expected;
};

struct PointSetDistance {
  double distance;
  Point nearest;
};

/// d(x, S) with a witness: projection for convex sets, enumeration for
/// finite index subsets.
PointSetDistance point_set_distance(const MetricSpace& space, const Point& x, const ConvexSet& s);
PointSetDistance point_set_distance(const MetricSpace& space, const Point& x,
                                    std::span<const std::size_t> s);

struct PairOptions {
  double eps = 1e-8;        // proximal membership tolerance
  double ap_tol = 1e-12;    // alternating-projections gap stabilization
  int ap_max_iters = 10000;
  std::optional<SeparationMethod> force_method;  // testing hook
};

class ProximalPair;

/// Membership view of A0 (or B0): the points of one side realizing the pair
/// separation against the other side, up to the view tolerance.
class ProximalSubsetView {
 public:
  ProximalSubsetView(const ProximalPair& parent, Side side, double eps)
      : parent_(&parent), side_(side), eps_(eps) {}
  bool contains(const Point& x) const;
  /// Finite pairs only; exact enumeration.
  std::vector<std::size_t> enumerate() const;
  Side side() const { return side_; }
  double eps() const { return eps_; }

 private:
  const ProximalPair* parent_;
  Side side_;
  double eps_;
};

/// A pair (A, B) in a common ambient space with its separation d(A,B)
/// computed and certified at construction. Convex pairs require the 2-norm
/// ambient metric (projection realizes nearest points only there); finite
/// pairs are index subsets of a finite space. Immutable; queries are pure.
class ProximalPair {
 public:
  static ProximalPair convex(MetricSpace space, ConvexSet a, ConvexSet b, PairOptions opts = {});
  static ProximalPair finite(MetricSpace space, std::vector<std::size_t> a,
                             std::vector<std::size_t> b, PairOptions opts = {});

  const MetricSpace& space() const { return space_; }
  bool is_finite_pair() const { return !convex_a_.has_value(); }
  const ConvexSet& set_a() const;
  const ConvexSet& set_b() const;
  const std::vector<std::size_t>& indices_a() const;
  const std::vector<std::size_t>& indices_b() const;
  const ConvexSet& set(Side s) const { return s == Side::A ? set_a() : set_b(); }
  const std::vector<std::size_t>& indices(Side s) const {
    return s == Side::A ? indices_a() : indices_b();
  }

  double separation() const { return separation_; }
  const Point& witness_a() const { return witness_a_.value(); }
  const Point& witness_b() const { return witness_b_.value(); }
  SeparationMethod method() const { return method_; }
  double eps() const { return opts_.eps; }

  bool contains(Side s, const Point& x, double eps) const;
  PointSetDistance distance_to_side(const Point& x, Side s) const;

  bool in_A0(const Point& x, double eps) const;
  bool in_B0(const Point& y, double eps) const;
  ProximalSubsetView A0(std::optional<double> eps = {}) const;
  ProximalSubsetView B0(std::optional<double> eps = {}) const;

  /// Produces u in A with d(u, y) = separation (within eps): metric
  /// projection onto A for convex pairs, lowest-index argmin for finite
  /// pairs. Throws ResolutionFailureError when y is not proximal on the B
  /// side, i.e. no point of A realizes the separation from y.
  Point proximal_resolve(const Point& y, std::optional<double> eps = {}) const;

  /// Exact proximal subsets by enumeration; finite pairs only.
  std::vector<std::size_t> enumerate_A0() const;
  std::vector<std::size_t> enumerate_B0() const;

 private:
  ProximalPair(MetricSpace space, PairOptions opts) : space_(std::move(space)), opts_(opts) {}
  void compute_separation_convex();
  void compute_separation_finite();

  MetricSpace space_;
  PairOptions opts_;
  std::optional<ConvexSet> convex_a_, convex_b_;
  std::vector<std::size_t> idx_a_, idx_b_;
  double separation_ = 0.0;
  std::optional<Point> witness_a_, witness_b_;
  SeparationMethod method_ = SeparationMethod::ClosedForm;
};

}  // namespace proxima
