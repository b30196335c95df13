#include "proxima/convex_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace proxima {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Vec& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidArgumentError(std::string(what) + " must be finite");
}

double box_distance(const Box& b, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double gap = std::max({0.0, b.lower[i] - x[i], x[i] - b.upper[i]});
    s += gap * gap;
  }
  return std::sqrt(s);
}

// Dykstra's scheme with per-member corrections. The primal iterate alone is
// not a stopping certificate: it can plateau (near-zero movement, possibly
// at a feasible but suboptimal point) while the dual corrections keep
// drifting. Convergence holds when the primal iterate AND every correction
// vector have settled. On an empty intersection the corrections grow by the
// gap vector each sweep, so they never settle while the iterate stalls.
ProjectionResult project_dykstra(const std::vector<ConvexSet>& members, const Vec& x,
                                 const DykstraOptions& opts) {
  const std::size_t m = members.size();
  Vec y = x;
  std::vector<Vec> corrections(m, Vec(x.size(), 0.0));
  const double scale = std::max(1.0, norm2(x));
  const double feasibility_tol = 100.0 * opts.tolerance * scale;
  auto residual_of = [&](const Vec& p) {
    double r = 0.0;
    for (const ConvexSet& s : members) r = std::max(r, s.distance_to(p));
    return r;
  };
  double change = kInf;
  double correction_change = kInf;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    const Vec before = y;
    correction_change = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      Vec z = add(y, corrections[i]);
      Vec pz = members[i].project(z).point;
      Vec next_corr = sub(z, pz);
      correction_change += dist2(next_corr, corrections[i]);
      corrections[i] = std::move(next_corr);
      y = std::move(pz);
    }
    change = dist2(y, before);
    if (change <= opts.tolerance && correction_change <= opts.tolerance * scale) {
      ProjectionResult r;
      r.point = std::move(y);
      r.iterations = sweep;
      return r;
    }
  }
  const double residual = residual_of(y);
  if (change <= opts.tolerance && residual > feasibility_tol)
    throw InfeasibleIntersectionError(
        "intersection is empty: the iterate stalled with a member residual of " +
            std::to_string(residual),
        residual);
  throw ProjectionNonConvergence(
      "dykstra did not stabilize within " + std::to_string(opts.max_sweeps) + " sweeps",
      std::move(y), change);
}

}  // namespace

Vec project_simplex(const Vec& x, double scale) {
  const std::size_t n = x.size();
  Vec u = x;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double tau = 0.0;
  double prefix = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    prefix += u[j];
    const double t = (prefix - scale) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) tau = t;
  }
  Vec p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::max(x[i] - tau, 0.0);
  return p;
}

ConvexSet::ConvexSet(Kind kind, DykstraOptions dykstra)
    : kind_(std::move(kind)), dykstra_(dykstra) {
  std::visit(
      [&](auto&& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (k.lower.size() != k.upper.size() || k.lower.empty())
            throw InvalidArgumentError("box bounds must be nonempty and equal length");
          for (std::size_t i = 0; i < k.lower.size(); ++i) {
            if (std::isnan(k.lower[i]) || std::isnan(k.upper[i]))
              throw InvalidArgumentError("box bounds must not be NaN");
            if (k.lower[i] == kInf || k.upper[i] == -kInf || k.lower[i] > k.upper[i])
              throw InvalidArgumentError("box is empty: lower > upper");
          }
          dim_ = k.lower.size();
        } else if constexpr (std::is_same_v<T, Ball>) {
          require_finite(k.center, "ball center");
          if (k.center.empty()) throw InvalidArgumentError("ball center must be nonempty");
          if (!(k.radius >= 0.0) || !std::isfinite(k.radius))
            throw InvalidArgumentError("ball radius must be finite and >= 0");
          dim_ = k.center.size();
        } else if constexpr (std::is_same_v<T, Hyperplane> || std::is_same_v<T, Halfspace>) {
          require_finite(k.normal, "normal");
          if (!std::isfinite(k.offset)) throw InvalidArgumentError("offset must be finite");
          if (norm2(k.normal) == 0.0) throw InvalidArgumentError("normal must be nonzero");
          dim_ = k.normal.size();
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          if (k.a.rows == 0 || k.a.cols == 0)
            throw InvalidArgumentError("affine set needs a nonempty constraint matrix");
          require_finite(k.a.data, "affine matrix");
          require_finite(k.c, "affine offset");
          dim_ = k.a.cols;
          // throws when the system is inconsistent (empty set); redundant
          // rows are dropped and the remainder stored orthonormalized
          OrthonormalRows on = orthonormalize_rows(k.a, k.c);
          if (on.q.empty())
            throw InvalidArgumentError("affine set has no effective constraints");
          k.a = Matrix::from_rows(on.q);
          k.c = std::move(on.d);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          if (k.dim == 0) throw InvalidArgumentError("simplex dimension must be >= 1");
          if (!(k.scale > 0.0) || !std::isfinite(k.scale))
            throw InvalidArgumentError("simplex scale must be finite and > 0");
          dim_ = k.dim;
        } else if constexpr (std::is_same_v<T, FinitePointSet>) {
          if (k.points.empty()) throw InvalidArgumentError("finite point set must be nonempty");
          dim_ = k.points.front().size();
          for (const Vec& p : k.points) {
            if (p.size() != dim_)
              throw InvalidArgumentError("finite point set has inconsistent dimensions");
            require_finite(p, "finite point set member");
          }
          convex_ = false;
        } else if constexpr (std::is_same_v<T, Intersection>) {
          if (k.members.empty())
            throw InvalidArgumentError("intersection needs at least one member");
          dim_ = k.members.front().dim();
          for (const ConvexSet& m : k.members) {
            if (m.dim() != dim_)
              throw InvalidArgumentError("intersection members have inconsistent dimensions");
            if (!m.convex())
              throw InvalidArgumentError("intersection members must be convex");
          }
        }
      },
      kind_);
}

ConvexSet ConvexSet::box(Vec lower, Vec upper) {
  return ConvexSet(Box{std::move(lower), std::move(upper)});
}
ConvexSet ConvexSet::ball(Vec center, double radius) {
  return ConvexSet(Ball{std::move(center), radius});
}
ConvexSet ConvexSet::hyperplane(Vec normal, double offset) {
  return ConvexSet(Hyperplane{std::move(normal), offset});
}
ConvexSet ConvexSet::halfspace(Vec normal, double offset) {
  return ConvexSet(Halfspace{std::move(normal), offset});
}
ConvexSet ConvexSet::affine(Matrix a, Vec c) {
  return ConvexSet(AffineSet{std::move(a), std::move(c)});
}
ConvexSet ConvexSet::simplex(std::size_t dim, double scale) {
  return ConvexSet(Simplex{dim, scale});
}
ConvexSet ConvexSet::finite_points(std::vector<Vec> points) {
  return ConvexSet(FinitePointSet{std::move(points)});
}
ConvexSet ConvexSet::intersection(std::vector<ConvexSet> members, DykstraOptions dykstra) {
  return ConvexSet(Intersection{std::move(members)}, dykstra);
}
ConvexSet ConvexSet::whole_space(std::size_t dim) {
  return box(Vec(dim, -kInf), Vec(dim, kInf));
}

std::string ConvexSet::kind_name() const {
  return std::visit(
      [](auto&& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Box>) return "box";
        else if constexpr (std::is_same_v<T, Ball>) return "ball";
        else if constexpr (std::is_same_v<T, Hyperplane>) return "hyperplane";
        else if constexpr (std::is_same_v<T, Halfspace>) return "halfspace";
        else if constexpr (std::is_same_v<T, AffineSet>) return "affine";
        else if constexpr (std::is_same_v<T, Simplex>) return "simplex";
        else if constexpr (std::is_same_v<T, FinitePointSet>) return "points";
        else return "intersection";
      },
      kind_);
}

void ConvexSet::require_dim(const Vec& x) const {
  if (x.size() != dim_)
    throw DimensionMismatchError("point dimension " + std::to_string(x.size()) +
                                 " does not match set dimension " + std::to_string(dim_));
}

ProjectionResult ConvexSet::project(const Vec& x) const {
  require_dim(x);
  require_finite(x, "projection input");
  ProjectionResult r;
  std::visit(
      [&](auto&& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Box>) {
          Vec p(x.size());
          for (std::size_t i = 0; i < x.size(); ++i)
            p[i] = std::min(std::max(x[i], k.lower[i]), k.upper[i]);
          r.point = std::move(p);
        } else if constexpr (std::is_same_v<T, Ball>) {
          const Vec diff = sub(x, k.center);
          const double d = norm2(diff);
          if (d <= k.radius) {
            r.point = x;
          } else {
            r.point = add(k.center, scale(diff, k.radius / d));
          }
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          const double res = dot(k.normal, x) - k.offset;
          const double nn = dot(k.normal, k.normal);
          r.point = sub(x, scale(k.normal, res / nn));
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          const double res = dot(k.normal, x) - k.offset;
          if (res <= 0.0) {
            r.point = x;
          } else {
            const double nn = dot(k.normal, k.normal);
            r.point = sub(x, scale(k.normal, res / nn));
          }
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          // rows of k.a are orthonormal after construction
          Vec p = x;
          for (std::size_t i = 0; i < k.a.rows; ++i) {
            const double res = dot(k.a.row(i), p) - k.c[i];
            for (std::size_t j = 0; j < p.size(); ++j) p[j] -= res * k.a(i, j);
          }
          r.point = std::move(p);
        } else if constexpr (std::is_same_v<T, Simplex>) {
          r.point = project_simplex(x, k.scale);
        } else if constexpr (std::is_same_v<T, FinitePointSet>) {
          std::size_t best = 0;
          double best_d = dist2(x, k.points[0]);
          for (std::size_t i = 1; i < k.points.size(); ++i) {
            const double d = dist2(x, k.points[i]);
            if (d < best_d) {  // strict: lowest index wins ties
              best_d = d;
              best = i;
            }
          }
          r.point = k.points[best];
        } else if constexpr (std::is_same_v<T, Intersection>) {
          r = project_dykstra(k.members, x, dykstra_);
        }
      },
      kind_);
  r.distance = dist2(x, r.point);
  return r;
}

bool ConvexSet::contains(const Vec& x, double eps) const {
  require_dim(x);
  return std::visit(
      [&](auto&& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Box>) {
          return box_distance(k, x) <= eps;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, dist2(x, k.center) - k.radius) <= eps;
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          return std::abs(dot(k.normal, x) - k.offset) / norm2(k.normal) <= eps;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return std::max(0.0, dot(k.normal, x) - k.offset) / norm2(k.normal) <= eps;
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          double s = 0.0;
          for (std::size_t i = 0; i < k.a.rows; ++i) {
            const double res = dot(k.a.row(i), x) - k.c[i];
            s += res * res;
          }
          return std::sqrt(s) <= eps;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return dist2(x, project_simplex(x, k.scale)) <= eps;
        } else if constexpr (std::is_same_v<T, FinitePointSet>) {
          for (const Vec& p : k.points)
            if (dist2(x, p) <= eps) return true;
          return false;
        } else {
          // all members holding exactly means the point is in the
          // intersection, no Dykstra run needed
          bool all_exact = true;
          for (const ConvexSet& m : k.members)
            if (!m.contains(x, 1e-14 * std::max(1.0, norm2(x)))) {
              all_exact = false;
              break;
            }
          if (all_exact) return true;
          return project(x).distance <= eps;
        }
      },
      kind_);
}

double ConvexSet::distance_to(const Vec& x) const {
  require_dim(x);
  return std::visit(
      [&](auto&& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Box>) {
          return box_distance(k, x);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, dist2(x, k.center) - k.radius);
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          return std::abs(dot(k.normal, x) - k.offset) / norm2(k.normal);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return std::max(0.0, dot(k.normal, x) - k.offset) / norm2(k.normal);
        } else if constexpr (std::is_same_v<T, AffineSet>) {
          double s = 0.0;
          for (std::size_t i = 0; i < k.a.rows; ++i) {
            const double res = dot(k.a.row(i), x) - k.c[i];
            s += res * res;
          }
          return std::sqrt(s);
        } else {
          return project(x).distance;
        }
      },
      kind_);
}

std::vector<Vec> ConvexSet::sample(int count, std::uint64_t seed) const {
  if (count < 1) throw InvalidArgumentError("sample count must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  std::visit(
      [&](auto&& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, Box>) {
          for (int s = 0; s < count; ++s) {
            Vec p(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
              const double lo = k.lower[i], hi = k.upper[i];
              if (std::isfinite(lo) && std::isfinite(hi)) {
                p[i] = lo + (hi - lo) * unif(rng);
              } else if (std::isfinite(lo)) {
                p[i] = lo + std::abs(gauss(rng)) * (1.0 + std::abs(lo));
              } else if (std::isfinite(hi)) {
                p[i] = hi - std::abs(gauss(rng)) * (1.0 + std::abs(hi));
              } else {
                p[i] = gauss(rng) * 2.0;
              }
            }
            out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, Ball>) {
          for (int s = 0; s < count; ++s) {
            Vec dir(dim_);
            for (auto& v : dir) v = gauss(rng);
            const double n = norm2(dir);
            const double rad = k.radius * std::pow(unif(rng), 1.0 / static_cast<double>(dim_));
            Vec p = k.center;
            if (n > 0.0)
              for (std::size_t i = 0; i < dim_; ++i) p[i] += dir[i] / n * rad;
            out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, Simplex>) {
          for (int s = 0; s < count; ++s) {
            Vec p(dim_);
            double total = 0.0;
            for (auto& v : p) {
              v = expo(rng);
              total += v;
            }
            for (auto& v : p) v = v / total * k.scale;
            out.push_back(std::move(p));
          }
        } else if constexpr (std::is_same_v<T, FinitePointSet>) {
          for (int s = 0; s < count; ++s)
            out.push_back(k.points[static_cast<std::size_t>(s) % k.points.size()]);
        } else {
          // hyperplane, halfspace, affine, intersection: gaussian cloud
          // projected into the set
          for (int s = 0; s < count; ++s) {
            Vec z(dim_);
            for (auto& v : z) v = gauss(rng) * 2.0;
            out.push_back(project(z).point);
          }
        }
      },
      kind_);
  return out;
}

}  // namespace proxima
