#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "proxima/linalg.hpp"

namespace proxima {

/// A point of a metric space: either a coordinate vector (Euclidean spaces)
/// or an index into a finite space's distance matrix. All coordinates must
/// be finite; points are immutable.
class Point {
 public:
  /// Default state is a 0-dimensional coordinate point; no space accepts it.
  Point() : rep_(Vec{}) {}

  static Point euclidean(Vec coords);
  static Point finite(std::size_t index);

  bool is_euclidean() const { return std::holds_alternative<Vec>(rep_); }
  bool is_index() const { return !is_euclidean(); }

  const Vec& coords() const;
  std::size_t index() const;
  std::size_t dim() const { return coords().size(); }

  friend bool operator==(const Point& a, const Point& b) { return a.rep_ == b.rep_; }
  friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

  std::string describe() const;

 private:
  explicit Point(std::variant<Vec, std::size_t> rep) : rep_(std::move(rep)) {}
  std::variant<Vec, std::size_t> rep_;
};

/// Report of the first metric-axiom failure found in a candidate distance
/// matrix. Absent report means the matrix is a genuine metric.
struct MetricViolation {
  enum class Kind { NotSquare, NegativeEntry, NonzeroDiagonal, Asymmetry, Triangle };
  Kind kind;
  std::size_t i = 0, j = 0, k = 0;  // offending indices (i,k,j for triangle: d(i,j) > d(i,k)+d(k,j))
  double lhs = 0.0, rhs = 0.0;
  std::string describe() const;
};

/// Checks zero diagonal, symmetry, nonnegativity and the triangle inequality
/// (O(n^3), small slack for rounded input). Empty optional means valid.
std::optional<MetricViolation> validate_metric(const Matrix& m);

/// Ambient space: a p-norm space R^n (p in [1, inf]) or a finite space
/// given by a validated distance matrix. Immutable; all queries are pure.
class MetricSpace {
 public:
  static MetricSpace euclidean(std::size_t dim, double p = 2.0);
  static MetricSpace finite(Matrix distances);
  /// Whitespace-separated rows, one matrix row per line.
  static MetricSpace finite_from_file(const std::string& path);

  bool is_euclidean() const { return std::holds_alternative<EuclideanData>(rep_); }
  bool is_finite() const { return !is_euclidean(); }

  /// Euclidean dimension, or the number of points of a finite space.
  std::size_t size() const;
  double norm_order() const;
  const Matrix& distances() const;

  double distance(const Point& x, const Point& y) const;
  /// Throws DimensionMismatchError when the point does not belong here.
  void require_member(const Point& x) const;

 private:
  struct EuclideanData {
    std::size_t dim;
    double p;
  };
  struct FiniteData {
    Matrix d;
  };
  explicit MetricSpace(std::variant<EuclideanData, FiniteData> rep) : rep_(std::move(rep)) {}
  std::variant<EuclideanData, FiniteData> rep_;
};

/// Stopping policy shared by the iteration engines.
struct ConvergenceCriterion {
  double epsilon_stop = 1e-8;
  int max_iterations = 100000;
  void validate() const;
};

/// True iff all pairwise distances among the last `window` trace entries
/// are <= eps. Requires 2 <= window <= trace length.
bool is_cauchy_tail(const MetricSpace& space, const std::vector<Point>& trace,
                    std::size_t window, double eps);

}  // namespace proxima
