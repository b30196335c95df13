#pragma once

// Shared generators and independent oracles for the test suites. Oracles
// here must not call the library code paths they are used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "proxima/bpp_engine.hpp"
#include "proxima/metric.hpp"
#include "proxima/vi_solver.hpp"

namespace support {

using proxima::ConvergenceCriterion;
using proxima::Matrix;
using proxima::Vec;

inline double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// finite-space instance generators

struct FiniteInstance {
  Matrix dist;
  std::vector<std::size_t> a;
  std::vector<std::size_t> b;
  std::vector<std::size_t> table;  // T over all indices; identity off A
};

inline Matrix metric_from_plane_points(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t n = pts.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      m(i, j) = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
  return m;
}

// Two parallel rows y = 0 and y = 1 with x-coordinates on an integer grid;
// shared columns realize the separation 1 with ties, so proximal subsets
// have several elements.
inline FiniteInstance two_line_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> grid(0, 9);
  std::uniform_int_distribution<int> count(2, 5);
  auto draw_columns = [&](int c) {
    std::vector<int> cols;
    while (static_cast<int>(cols.size()) < c) {
      const int x = grid(rng);
      if (std::find(cols.begin(), cols.end(), x) == cols.end()) cols.push_back(x);
    }
    return cols;
  };
  std::vector<int> cols_a = draw_columns(count(rng));
  std::vector<int> cols_b = draw_columns(count(rng));
  cols_b[0] = cols_a[0];  // at least one shared column
  if (cols_a.size() > 1 && cols_b.size() > 1 && rng() % 2 == 0)
    cols_b[1] = cols_a[1];  // often two, so proximal subsets have pairs
  std::sort(cols_b.begin(), cols_b.end());
  cols_b.erase(std::unique(cols_b.begin(), cols_b.end()), cols_b.end());

  FiniteInstance inst;
  std::vector<std::array<double, 2>> pts;
  for (int x : cols_a) {
    inst.a.push_back(pts.size());
    pts.push_back({static_cast<double>(x), 0.0});
  }
  for (int x : cols_b) {
    inst.b.push_back(pts.size());
    pts.push_back({static_cast<double>(x), 1.0});
  }
  inst.dist = metric_from_plane_points(pts);
  return inst;
}

inline FiniteInstance embedded_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(4, 12);
  std::uniform_real_distribution<double> coord(0.0, 5.0);
  const int n = size(rng);
  std::vector<std::array<double, 2>> pts;
  for (int i = 0; i < n; ++i) pts.push_back({coord(rng), coord(rng)});
  FiniteInstance inst;
  inst.dist = metric_from_plane_points(pts);
  // random split with a possible small overlap
  std::vector<std::size_t> perm(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t na = 1 + rng() % static_cast<std::size_t>(n - 1);
  inst.a.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(na));
  inst.b.assign(perm.begin() + static_cast<std::ptrdiff_t>(na), perm.end());
  if (inst.b.empty()) inst.b.push_back(perm[0]);
  if (rng() % 4 == 0) inst.b.push_back(inst.a[0]);  // overlapping pair
  return inst;
}

// Quarter-step edge weights closed under shortest paths: a metric with many
// repeated distances.
inline FiniteInstance quantized_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> size(4, 10);
  std::uniform_int_distribution<int> w(1, 12);
  const std::size_t n = static_cast<std::size_t>(size(rng));
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m(i, j) = m(j, i) = 0.25 * w(rng);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = std::min(m(i, j), m(i, k) + m(k, j));
  FiniteInstance inst;
  inst.dist = std::move(m);
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t na = 1 + rng() % (n - 1);
  inst.a.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(na));
  inst.b.assign(perm.begin() + static_cast<std::ptrdiff_t>(na), perm.end());
  if (inst.b.empty()) inst.b.push_back(perm[0]);
  return inst;
}

// Fills inst.table with a random map A -> B, biased so points realizing the
// separation tend to map to points that realize it back.
inline void attach_random_map(FiniteInstance& inst, std::mt19937_64& rng) {
  const std::size_t n = inst.dist.rows;
  double sep = std::numeric_limits<double>::infinity();
  for (std::size_t i : inst.a)
    for (std::size_t j : inst.b) sep = std::min(sep, inst.dist(i, j));
  std::vector<std::size_t> b0;
  for (std::size_t j : inst.b) {
    double dj = std::numeric_limits<double>::infinity();
    for (std::size_t i : inst.a) dj = std::min(dj, inst.dist(i, j));
    if (dj <= sep + 1e-12) b0.push_back(j);
  }
  inst.table.resize(n);
  for (std::size_t i = 0; i < n; ++i) inst.table[i] = i;
  for (std::size_t i : inst.a) {
    double di = std::numeric_limits<double>::infinity();
    for (std::size_t j : inst.b) di = std::min(di, inst.dist(i, j));
    const bool in_a0 = di <= sep + 1e-12;
    if (in_a0 && !b0.empty() && rng() % 10 < 8) {
      inst.table[i] = b0[rng() % b0.size()];
    } else {
      inst.table[i] = inst.b[rng() % inst.b.size()];
    }
  }
}

inline FiniteInstance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FiniteInstance inst;
  switch (rng() % 3) {
    case 0: inst = two_line_instance(rng); break;
    case 1: inst = embedded_instance(rng); break;
    default: inst = quantized_instance(rng); break;
  }
  attach_random_map(inst, rng);
  return inst;
}

// ---------------------------------------------------------------------------
// direct Picard loop, same stopping rule as the engine

inline std::vector<Vec> picard_loop(const Matrix& m, const Vec& t, Vec x0, double k,
                                    const ConvergenceCriterion& criterion) {
  std::vector<Vec> trace{std::move(x0)};
  for (int n = 0; n < criterion.max_iterations; ++n) {
    const Vec& xn = trace.back();
    Vec next = proxima::matvec(m, xn);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += t[i];
    const double step = dist2(xn, next);
    trace.push_back(std::move(next));
    if (k / (1.0 - k) * step <= criterion.epsilon_stop) break;
  }
  return trace;
}

// ---------------------------------------------------------------------------
// simplex oracle: composition grid plus pattern-search refinement over the
// exchange directions e_i - e_j

inline Vec simplex_oracle(const Vec& target, double s) {
  const std::size_t n = target.size();
  // enumerate compositions of N into n parts
  const int N = n <= 3 ? 24 : 14;
  Vec best(n, s / static_cast<double>(n));
  double best_d = dist2(best, target);
  std::vector<int> comp(n, 0);
  comp[0] = N;
  auto consider = [&](const std::vector<int>& c) {
    Vec x(n);
    for (std::size_t i = 0; i < n; ++i)
      x[i] = s * static_cast<double>(c[i]) / static_cast<double>(N);
    const double d = dist2(x, target);
    if (d < best_d) {
      best_d = d;
      best = std::move(x);
    }
  };
  // odometer over compositions
  while (true) {
    consider(comp);
    // next composition in colex order
    std::size_t i = 0;
    while (i + 1 < n && comp[i] == 0) ++i;
    if (i + 1 >= n) break;
    const int head = comp[i];
    comp[i] = 0;
    comp[0] = head - 1;
    comp[i + 1] += 1;
  }
  // refinement: moves delta * (e_i - e_j), clipped at x_j >= 0
  double delta = s / static_cast<double>(N);
  while (delta > 1e-11) {
    bool improved = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || best[j] <= 0.0) continue;
        const double step = std::min(delta, best[j]);
        Vec cand = best;
        cand[i] += step;
        cand[j] -= step;
        const double d = dist2(cand, target);
        if (d < best_d) {
          best_d = d;
          best = std::move(cand);
          improved = true;
        }
      }
    if (!improved) delta *= 0.5;
  }
  return best;
}

// ---------------------------------------------------------------------------
// exact nearest point of a 2-D box-and-halfspace polygon: candidates are the
// query itself, the clamped query and grid-seeded line searches along every
// feasible boundary segment

struct Segment {
  Vec p0;
  Vec dir;  // unit
  double t_lo, t_hi;
};

inline std::optional<Vec> polygon_project_box_halfspace(const Vec& lower, const Vec& upper,
                                                        const Vec& normal, double offset,
                                                        const Vec& x) {
  const double nn = std::hypot(normal[0], normal[1]);
  auto feasible = [&](const Vec& p, double tol) {
    return p[0] >= lower[0] - tol && p[0] <= upper[0] + tol && p[1] >= lower[1] - tol &&
           p[1] <= upper[1] + tol &&
           (normal[0] * p[0] + normal[1] * p[1] - offset) / nn <= tol;
  };
  std::vector<Segment> segments;
  // four box edges
  auto add_edge = [&](Vec p0, Vec dir, double len) {
    segments.push_back({std::move(p0), std::move(dir), 0.0, len});
  };
  add_edge({lower[0], lower[1]}, {1, 0}, upper[0] - lower[0]);
  add_edge({lower[0], upper[1]}, {1, 0}, upper[0] - lower[0]);
  add_edge({lower[0], lower[1]}, {0, 1}, upper[1] - lower[1]);
  add_edge({upper[0], lower[1]}, {0, 1}, upper[1] - lower[1]);
  // halfspace boundary line through its foot from the origin
  {
    const Vec base{normal[0] * offset / (nn * nn), normal[1] * offset / (nn * nn)};
    const Vec dir{-normal[1] / nn, normal[0] / nn};
    segments.push_back({base, dir, -1e6, 1e6});
  }
  double best_d = std::numeric_limits<double>::infinity();
  Vec best;
  auto consider = [&](const Vec& p) {
    if (!feasible(p, 1e-9)) return;
    const double d = dist2(p, x);
    if (d < best_d) {
      best_d = d;
      best = p;
    }
  };
  consider(x);
  consider({std::clamp(x[0], lower[0], upper[0]), std::clamp(x[1], lower[1], upper[1])});
  for (const Segment& seg : segments) {
    // clip the parameter range to the feasible polygon
    double lo = seg.t_lo, hi = seg.t_hi;
    // clip against box
    for (int c = 0; c < 2; ++c) {
      const double p0c = seg.p0[c], dc = seg.dir[c];
      if (std::abs(dc) < 1e-15) {
        if (p0c < lower[c] - 1e-12 || p0c > upper[c] + 1e-12) lo = 1.0, hi = 0.0;
      } else {
        double t1 = (lower[c] - p0c) / dc, t2 = (upper[c] - p0c) / dc;
        if (t1 > t2) std::swap(t1, t2);
        lo = std::max(lo, t1);
        hi = std::min(hi, t2);
      }
    }
    // clip against halfspace
    {
      const double v0 = normal[0] * seg.p0[0] + normal[1] * seg.p0[1] - offset;
      const double dv = normal[0] * seg.dir[0] + normal[1] * seg.dir[1];
      if (std::abs(dv) < 1e-15) {
        if (v0 > 1e-12) lo = 1.0, hi = 0.0;
      } else if (dv > 0) {
        hi = std::min(hi, -v0 / dv);
      } else {
        lo = std::max(lo, -v0 / dv);
      }
    }
    if (lo > hi) continue;
    auto point_at = [&](double t) {
      return Vec{seg.p0[0] + t * seg.dir[0], seg.p0[1] + t * seg.dir[1]};
    };
    // grid seed then ternary refinement; the distance along a segment is
    // unimodal
    double gl = lo, gh = hi;
    const int kGrid = 512;
    double bt = lo, bd = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= kGrid; ++g) {
      const double t = lo + (hi - lo) * static_cast<double>(g) / kGrid;
      const double d = dist2(point_at(t), x);
      if (d < bd) {
        bd = d;
        bt = t;
      }
    }
    gl = std::max(lo, bt - (hi - lo) / kGrid);
    gh = std::min(hi, bt + (hi - lo) / kGrid);
    for (int it = 0; it < 200; ++it) {
      const double m1 = gl + (gh - gl) / 3.0, m2 = gh - (gh - gl) / 3.0;
      if (dist2(point_at(m1), x) < dist2(point_at(m2), x))
        gh = m2;
      else
        gl = m1;
    }
    consider(point_at(0.5 * (gl + gh)));
    consider(point_at(lo));
    consider(point_at(hi));
  }
  if (!std::isfinite(best_d)) return std::nullopt;
  return best;
}

}  // namespace support
