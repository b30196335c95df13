#include "proxima/metric.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace proxima {

Point Point::euclidean(Vec coords) {
  for (double v : coords)
    if (!std::isfinite(v))
      throw InvalidArgumentError("point has non-finite coordinate");
  return Point(std::variant<Vec, std::size_t>(std::in_place_index<0>, std::move(coords)));
}

Point Point::finite(std::size_t index) {
  return Point(std::variant<Vec, std::size_t>(std::in_place_index<1>, index));
}

const Vec& Point::coords() const {
  if (!is_euclidean()) throw DimensionMismatchError("index point has no coordinates");
  return std::get<Vec>(rep_);
}

std::size_t Point::index() const {
  if (is_euclidean()) throw DimensionMismatchError("coordinate point has no index");
  return std::get<std::size_t>(rep_);
}

std::string Point::describe() const {
  std::ostringstream os;
  if (is_euclidean()) {
    os << "(";
    const Vec& c = coords();
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) os << ", ";
      os << c[i];
    }
    os << ")";
  } else {
    os << "#" << index();
  }
  return os.str();
}

std::string MetricViolation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::NotSquare:
      os << "matrix is not square";
      break;
    case Kind::NegativeEntry:
      os << "negative entry d(" << i << "," << j << ") = " << lhs;
      break;
    case Kind::NonzeroDiagonal:
      os << "nonzero diagonal d(" << i << "," << i << ") = " << lhs;
      break;
    case Kind::Asymmetry:
      os << "asymmetric entries d(" << i << "," << j << ") = " << lhs << " vs d(" << j << "," << i
         << ") = " << rhs;
      break;
    case Kind::Triangle:
      os << "triangle inequality fails for (" << i << "," << k << "," << j << "): d(" << i << ","
         << j << ") = " << lhs << " > " << rhs << " = d(" << i << "," << k << ") + d(" << k << ","
         << j << ")";
      break;
  }
  return os.str();
}

std::optional<MetricViolation> validate_metric(const Matrix& m) {
  using Kind = MetricViolation::Kind;
  if (!m.square()) return MetricViolation{Kind::NotSquare};
  const std::size_t n = m.rows;
  double scale = 0.0;
  for (double v : m.data) scale = std::max(scale, std::abs(v));
  const double slack = 1e-12 * std::max(1.0, scale);
  for (std::size_t i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) return MetricViolation{Kind::NonzeroDiagonal, i, i, 0, m(i, i)};
    for (std::size_t j = 0; j < n; ++j) {
      if (m(i, j) < 0.0) return MetricViolation{Kind::NegativeEntry, i, j, 0, m(i, j)};
      if (m(i, j) != m(j, i))
        return MetricViolation{Kind::Asymmetry, i, j, 0, m(i, j), m(j, i)};
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j)
        if (m(i, j) > m(i, k) + m(k, j) + slack)
          return MetricViolation{Kind::Triangle, i, j, k, m(i, j), m(i, k) + m(k, j)};
  return std::nullopt;
}

MetricSpace MetricSpace::euclidean(std::size_t dim, double p) {
  if (dim == 0) throw InvalidArgumentError("euclidean space needs dimension >= 1");
  if (!(p >= 1.0)) throw InvalidArgumentError("norm order p must satisfy p >= 1");
  return MetricSpace(std::variant<EuclideanData, FiniteData>(
      std::in_place_index<0>, EuclideanData{dim, p}));
}

MetricSpace MetricSpace::finite(Matrix distances) {
  if (const auto v = validate_metric(distances))
    throw InvalidArgumentError("distance matrix is not a metric: " + v->describe());
  if (distances.rows == 0) throw InvalidArgumentError("finite space needs at least one point");
  return MetricSpace(std::variant<EuclideanData, FiniteData>(
      std::in_place_index<1>, FiniteData{std::move(distances)}));
}

MetricSpace MetricSpace::finite_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open distance matrix file: " + path);
  std::vector<Vec> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    Vec row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) throw ConfigError("malformed number in matrix file: " + path);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix file is empty: " + path);
  return finite(Matrix::from_rows(rows));
}

std::size_t MetricSpace::size() const {
  if (is_euclidean()) return std::get<EuclideanData>(rep_).dim;
  return std::get<FiniteData>(rep_).d.rows;
}

double MetricSpace::norm_order() const {
  if (!is_euclidean()) throw DimensionMismatchError("finite space has no norm order");
  return std::get<EuclideanData>(rep_).p;
}

const Matrix& MetricSpace::distances() const {
  if (is_euclidean()) throw DimensionMismatchError("euclidean space has no distance matrix");
  return std::get<FiniteData>(rep_).d;
}

void MetricSpace::require_member(const Point& x) const {
  if (is_euclidean()) {
    if (!x.is_euclidean())
      throw DimensionMismatchError("index point used in a euclidean space");
    if (x.dim() != size())
      throw DimensionMismatchError("point dimension " + std::to_string(x.dim()) +
                                   " does not match space dimension " + std::to_string(size()));
  } else {
    if (!x.is_index()) throw DimensionMismatchError("coordinate point used in a finite space");
    if (x.index() >= size())
      throw DimensionMismatchError("point index " + std::to_string(x.index()) +
                                   " out of range for " + std::to_string(size()) + " points");
  }
}

double MetricSpace::distance(const Point& x, const Point& y) const {
  require_member(x);
  require_member(y);
  if (is_euclidean()) {
    const Vec& a = x.coords();
    const Vec& b = y.coords();
    Vec diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return norm_p(diff, norm_order());
  }
  return distances()(x.index(), y.index());
}

void ConvergenceCriterion::validate() const {
  if (!(epsilon_stop > 0.0)) throw InvalidArgumentError("epsilon_stop must be > 0");
  if (max_iterations < 1) throw InvalidArgumentError("max_iterations must be >= 1");
}

bool is_cauchy_tail(const MetricSpace& space, const std::vector<Point>& trace,
                    std::size_t window, double eps) {
  if (window < 2) throw InvalidArgumentError("cauchy window must be >= 2");
  if (window > trace.size())
    throw InvalidArgumentError("cauchy window exceeds trace length");
  const std::size_t start = trace.size() - window;
  for (std::size_t i = start; i < trace.size(); ++i)
    for (std::size_t j = i + 1; j < trace.size(); ++j)
      if (space.distance(trace[i], trace[j]) > eps) return false;
  return true;
}

}  // namespace proxima
