#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxima/linalg.hpp"

namespace proxima {

class ConvexSet;

/// Axis-aligned box [lower, upper]; bounds may be infinite on either side
/// (lower_i in [-inf, inf), upper_i in (-inf, inf]).
struct Box {
  Vec lower;
  Vec upper;
};

struct Ball {
  Vec center;
  double radius;
};

/// {x : <normal, x> = offset}
struct Hyperplane {
  Vec normal;
  double offset;
};

/// {x : <normal, x> <= offset}
struct Halfspace {
  Vec normal;
  double offset;
};

/// {x : Ax = c}; stored row-orthonormalized so projection is closed-form.
struct AffineSet {
  Matrix a;
  Vec c;
};

/// {x : x >= 0, sum x = scale}
struct Simplex {
  std::size_t dim;
  double scale;
};

/// The one non-convex member of the catalog; projection is nearest-point
/// enumeration with lowest-index tie-break.
struct FinitePointSet {
  std::vector<Vec> points;
};

struct Intersection {
  std::vector<ConvexSet> members;
};

/// The projection target together with the realized distance. iterations is
/// 0 for closed-form kinds and the sweep count for Dykstra.
struct ProjectionResult {
  Vec point;
  double distance = 0.0;
  int iterations = 0;
};

/// Dykstra stopped without a stable iterate; carries the best iterate found.
struct ProjectionNonConvergence : Error {
  ProjectionNonConvergence(std::string msg, Vec best, double change)
      : Error(std::move(msg)), best_iterate(std::move(best)), last_change(change) {}
  Vec best_iterate;
  double last_change;
};

/// Dykstra stabilized on a point that violates some member: the effective
/// intersection is empty.
struct InfeasibleIntersectionError : Error {
  InfeasibleIntersectionError(std::string msg, double residual)
      : Error(std::move(msg)), residual(residual) {}
  double residual;
};

// The tolerance applies to the successive-iterate distance and to the sweep
// change of the correction vectors; both must settle. 1e-12 keeps the
// projection error an order below the 1e-10 idempotence audit.
struct DykstraOptions {
  double tolerance = 1e-12;
  int max_sweeps = 10000;
};

/// A nonempty closed set from the fixed catalog, with exact 2-norm metric
/// projection (Dykstra for intersections). Immutable; projection is pure.
class ConvexSet {
 public:
  using Kind =
      std::variant<Box, Ball, Hyperplane, Halfspace, AffineSet, Simplex, FinitePointSet, Intersection>;

  explicit ConvexSet(Kind kind, DykstraOptions dykstra = {});

  static ConvexSet box(Vec lower, Vec upper);
  static ConvexSet ball(Vec center, double radius);
  static ConvexSet hyperplane(Vec normal, double offset);
  static ConvexSet halfspace(Vec normal, double offset);
  static ConvexSet affine(Matrix a, Vec c);
  static ConvexSet simplex(std::size_t dim, double scale);
  static ConvexSet finite_points(std::vector<Vec> points);
  static ConvexSet intersection(std::vector<ConvexSet> members, DykstraOptions dykstra = {});
  /// All of R^n, as a box with infinite bounds.
  static ConvexSet whole_space(std::size_t dim);

  const Kind& kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  bool convex() const { return convex_; }
  std::string kind_name() const;

  /// Nearest point in the 2-norm. Projection of a member point returns the
  /// point unchanged.
  ProjectionResult project(const Vec& x) const;

  /// True iff x lies within distance eps of the set.
  bool contains(const Vec& x, double eps) const;

  /// Exact distance where closed-form, projection distance otherwise.
  double distance_to(const Vec& x) const;

  /// Deterministic pseudo-random points lying in the set.
  std::vector<Vec> sample(int count, std::uint64_t seed) const;

 private:
  void require_dim(const Vec& x) const;

  Kind kind_;
  std::size_t dim_ = 0;
  bool convex_ = true;
  DykstraOptions dykstra_;
};

/// Sort-and-threshold simplex projection: exact in finitely many operations.
Vec project_simplex(const Vec& x, double scale);

}  // namespace proxima
