#include "proxima/pair_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proxima {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool parallel_normals(const Vec& a, const Vec& b) {
  const double na = norm2(a), nb = norm2(b);
  return std::abs(std::abs(dot(a, b)) - na * nb) <= 1e-12 * na * nb;
}

struct ClosedFormSeparation {
  double value;
  Vec witness_a;
  Vec witness_b;
};

// Closed forms exist for parallel hyperplanes, ball pairs and box pairs.
std::optional<ClosedFormSeparation> closed_form_separation(const ConvexSet& a,
                                                           const ConvexSet& b) {
  const auto* ha = std::get_if<Hyperplane>(&a.kind());
  const auto* hb = std::get_if<Hyperplane>(&b.kind());
  if (ha && hb) {
    if (!parallel_normals(ha->normal, hb->normal)) return std::nullopt;
    // rewrite plane B in terms of plane A's normal: <n_a, x> = offset_b / c
    const double c = dot(ha->normal, hb->normal) / dot(ha->normal, ha->normal);
    const double na = norm2(ha->normal);
    const double value = std::abs(ha->offset - hb->offset / c) / na;
    const Vec base = scale(ha->normal, ha->offset / (na * na));
    return ClosedFormSeparation{value, base, b.project(base).point};
  }
  const auto* ba = std::get_if<Ball>(&a.kind());
  const auto* bb = std::get_if<Ball>(&b.kind());
  if (ba && bb) {
    const double d = dist2(ba->center, bb->center);
    const double value = std::max(0.0, d - ba->radius - bb->radius);
    Vec wa, wb;
    if (value > 0.0) {
      const Vec u = scale(sub(bb->center, ba->center), 1.0 / d);
      wa = add(ba->center, scale(u, ba->radius));
      wb = sub(bb->center, scale(u, bb->radius));
    } else if (d <= ba->radius - bb->radius) {
      wa = wb = bb->center;  // B nested in A
    } else if (d <= bb->radius - ba->radius) {
      wa = wb = ba->center;  // A nested in B
    } else {
      // overlapping: a common point on the center segment
      const Vec u = scale(sub(bb->center, ba->center), 1.0 / d);
      wa = wb = add(ba->center, scale(u, 0.5 * (d + ba->radius - bb->radius)));
    }
    return ClosedFormSeparation{value, std::move(wa), std::move(wb)};
  }
  const auto* xa = std::get_if<Box>(&a.kind());
  const auto* xb = std::get_if<Box>(&b.kind());
  if (xa && xb) {
    double s = 0.0;
    Vec wa(a.dim()), wb(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
      if (xb->lower[i] > xa->upper[i]) {
        wa[i] = xa->upper[i];
        wb[i] = xb->lower[i];
      } else if (xa->lower[i] > xb->upper[i]) {
        wa[i] = xa->lower[i];
        wb[i] = xb->upper[i];
      } else {
        // overlapping coordinate ranges: any common value
        const double t = std::max(xa->lower[i], xb->lower[i]);
        wa[i] = std::isfinite(t) ? t : std::min(xa->upper[i], xb->upper[i]);
        if (!std::isfinite(wa[i])) wa[i] = 0.0;  // both ranges unbounded below
        wb[i] = wa[i];
      }
      const double gap = wb[i] - wa[i] > 0 ? wb[i] - wa[i] : wa[i] - wb[i];
      s += gap * gap;
    }
    return ClosedFormSeparation{std::sqrt(s), std::move(wa), std::move(wb)};
  }
  return std::nullopt;
}

}  // namespace

std::string to_string(SeparationMethod m) {
  switch (m) {
    case SeparationMethod::ClosedForm: return "closed-form";
    case SeparationMethod::AlternatingProjections: return "alternating-projections";
    case SeparationMethod::Exhaustive: return "exhaustive";
  }
  return "?";
}

PointSetDistance point_set_distance(const MetricSpace& space, const Point& x,
                                    const ConvexSet& s) {
  space.require_member(x);
  if (!space.is_euclidean())
    throw DimensionMismatchError("convex sets live in euclidean spaces");
  if (space.norm_order() != 2.0)
    throw UnsupportedConfigError(
        "nearest-point queries against convex sets require the 2-norm ambient metric "
        "(configured p = " +
        std::to_string(space.norm_order()) + ")");
  ProjectionResult pr = s.project(x.coords());
  return PointSetDistance{pr.distance, Point::euclidean(std::move(pr.point))};
}

PointSetDistance point_set_distance(const MetricSpace& space, const Point& x,
                                    std::span<const std::size_t> s) {
  space.require_member(x);
  if (!space.is_finite())
    throw DimensionMismatchError("index subsets live in finite spaces");
  if (s.empty()) throw InvalidArgumentError("index subset must be nonempty");
  std::size_t best = s[0];
  double best_d = space.distance(x, Point::finite(s[0]));
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double d = space.distance(x, Point::finite(s[i]));
    if (d < best_d) {
      best_d = d;
      best = s[i];
    }
  }
  return PointSetDistance{best_d, Point::finite(best)};
}

bool ProximalSubsetView::contains(const Point& x) const {
  return side_ == Side::A ? parent_->in_A0(x, eps_) : parent_->in_B0(x, eps_);
}

std::vector<std::size_t> ProximalSubsetView::enumerate() const {
  return side_ == Side::A ? parent_->enumerate_A0() : parent_->enumerate_B0();
}

ProximalPair ProximalPair::convex(MetricSpace space, ConvexSet a, ConvexSet b,
                                  PairOptions opts) {
  if (!space.is_euclidean())
    throw InvalidArgumentError("convex pair needs a euclidean ambient space");
  if (space.norm_order() != 2.0)
    throw UnsupportedConfigError(
        "proximal resolution of convex pairs is supported only for the 2-norm ambient "
        "metric (configured p = " +
        std::to_string(space.norm_order()) + ")");
  if (a.dim() != space.size() || b.dim() != space.size())
    throw DimensionMismatchError("set dimensions do not match the ambient space");
  ProximalPair pair(std::move(space), opts);
  pair.convex_a_ = std::move(a);
  pair.convex_b_ = std::move(b);
  pair.compute_separation_convex();
  return pair;
}

ProximalPair ProximalPair::finite(MetricSpace space, std::vector<std::size_t> a,
                                  std::vector<std::size_t> b, PairOptions opts) {
  if (!space.is_finite()) throw InvalidArgumentError("finite pair needs a finite space");
  if (a.empty() || b.empty()) throw InvalidArgumentError("pair sides must be nonempty");
  const std::size_t n = space.size();
  for (std::size_t i : a)
    if (i >= n) throw DimensionMismatchError("A index out of range");
  for (std::size_t i : b)
    if (i >= n) throw DimensionMismatchError("B index out of range");
  auto canonicalize = [](std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  canonicalize(a);
  canonicalize(b);
  ProximalPair pair(std::move(space), opts);
  pair.idx_a_ = std::move(a);
  pair.idx_b_ = std::move(b);
  pair.compute_separation_finite();
  return pair;
}

const ConvexSet& ProximalPair::set_a() const {
  if (!convex_a_) throw UnsupportedConfigError("finite pair has no convex sets");
  return *convex_a_;
}
const ConvexSet& ProximalPair::set_b() const {
  if (!convex_b_) throw UnsupportedConfigError("finite pair has no convex sets");
  return *convex_b_;
}
const std::vector<std::size_t>& ProximalPair::indices_a() const {
  if (convex_a_) throw UnsupportedConfigError("convex pair has no index subsets");
  return idx_a_;
}
const std::vector<std::size_t>& ProximalPair::indices_b() const {
  if (convex_a_) throw UnsupportedConfigError("convex pair has no index subsets");
  return idx_b_;
}

void ProximalPair::compute_separation_convex() {
  const ConvexSet& a = *convex_a_;
  const ConvexSet& b = *convex_b_;
  const SeparationMethod forced =
      opts_.force_method.value_or(SeparationMethod::ClosedForm);
  if (opts_.force_method && forced == SeparationMethod::Exhaustive)
    throw InvalidArgumentError("exhaustive separation applies to finite pairs only");

  if (!opts_.force_method || forced == SeparationMethod::ClosedForm) {
    if (auto cf = closed_form_separation(a, b)) {
      separation_ = cf->value;
      method_ = SeparationMethod::ClosedForm;
      // polish witnesses by projection so the certificate holds to ap_tol
      Vec wa = cf->witness_a, wb = cf->witness_b;
      for (int i = 0; i < 64; ++i) {
        if (std::abs(dist2(wa, wb) - separation_) <= opts_.ap_tol * std::max(1.0, separation_))
          break;
        wa = a.project(wb).point;
        wb = b.project(wa).point;
      }
      witness_a_ = Point::euclidean(std::move(wa));
      witness_b_ = Point::euclidean(std::move(wb));
      return;
    }
    if (opts_.force_method)
      throw InvalidArgumentError("no closed-form separation for kinds " + a.kind_name() +
                                 "/" + b.kind_name());
  }

  // alternating projections a -> P_B(a) -> P_A(P_B(a)); the gap sequence is
  // nonincreasing, stabilization is the stopping certificate
  Vec wa = a.project(Vec(a.dim(), 0.0)).point;
  Vec wb = b.project(wa).point;
  double gap = dist2(wa, wb);
  bool stabilized = false;
  for (int it = 0; it < opts_.ap_max_iters; ++it) {
    const Vec next_a = a.project(wb).point;
    const Vec next_b = b.project(next_a).point;
    const double next_gap = dist2(next_a, next_b);
    wa = next_a;
    wb = next_b;
    if (std::abs(gap - next_gap) <= opts_.ap_tol) {
      gap = next_gap;
      stabilized = true;
      break;
    }
    gap = next_gap;
  }
  if (!stabilized)
    throw SeparationNonConvergence(
        "alternating projections did not stabilize within " +
            std::to_string(opts_.ap_max_iters) + " iterations; best gap " +
            std::to_string(gap),
        gap);
  separation_ = gap;
  method_ = SeparationMethod::AlternatingProjections;
  witness_a_ = Point::euclidean(std::move(wa));
  witness_b_ = Point::euclidean(std::move(wb));
}

void ProximalPair::compute_separation_finite() {
  double best = kInf;
  std::size_t best_a = idx_a_[0], best_b = idx_b_[0];
  for (std::size_t i : idx_a_)
    for (std::size_t j : idx_b_) {
      const double d = space_.distances()(i, j);
      if (d < best) {
        best = d;
        best_a = i;
        best_b = j;
      }
    }
  separation_ = best;
  method_ = SeparationMethod::Exhaustive;
  witness_a_ = Point::finite(best_a);
  witness_b_ = Point::finite(best_b);
}

bool ProximalPair::contains(Side s, const Point& x, double eps) const {
  space_.require_member(x);
  if (is_finite_pair()) {
    const auto& idx = indices(s);
    return std::binary_search(idx.begin(), idx.end(), x.index());
  }
  return set(s).contains(x.coords(), eps);
}

PointSetDistance ProximalPair::distance_to_side(const Point& x, Side s) const {
  if (is_finite_pair()) return point_set_distance(space_, x, std::span(indices(s)));
  return point_set_distance(space_, x, set(s));
}

bool ProximalPair::in_A0(const Point& x, double eps) const {
  if (!contains(Side::A, x, eps)) return false;
  return distance_to_side(x, Side::B).distance <= separation_ + eps;
}

bool ProximalPair::in_B0(const Point& y, double eps) const {
  if (!contains(Side::B, y, eps)) return false;
  return distance_to_side(y, Side::A).distance <= separation_ + eps;
}

ProximalSubsetView ProximalPair::A0(std::optional<double> eps) const {
  return ProximalSubsetView(*this, Side::A, eps.value_or(opts_.eps));
}
ProximalSubsetView ProximalPair::B0(std::optional<double> eps) const {
  return ProximalSubsetView(*this, Side::B, eps.value_or(opts_.eps));
}

Point ProximalPair::proximal_resolve(const Point& y, std::optional<double> eps_opt) const {
  const double eps = eps_opt.value_or(opts_.eps);
  space_.require_member(y);
  if (!contains(Side::B, y, eps))
    throw ResolutionFailureError(
        "proximal resolution failed: iterate " + y.describe() + " is not in B",
        y, kInf, separation_);
  const PointSetDistance nearest = distance_to_side(y, Side::A);
  if (std::abs(nearest.distance - separation_) > eps)
    throw ResolutionFailureError(
        "proximal resolution failed: d(A, " + y.describe() + ") = " +
            std::to_string(nearest.distance) + " but the pair separation is " +
            std::to_string(separation_) +
            "; the map leaves the proximal subset (T(A0) is not contained in B0)",
        y, nearest.distance, separation_);
  return nearest.nearest;
}

std::vector<std::size_t> ProximalPair::enumerate_A0() const {
  if (!is_finite_pair())
    throw UnsupportedConfigError("proximal subsets are enumerable only for finite pairs");
  std::vector<std::size_t> out;
  for (std::size_t i : idx_a_) {
    const Point x = Point::finite(i);
    if (distance_to_side(x, Side::B).distance <= separation_ + opts_.eps) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> ProximalPair::enumerate_B0() const {
  if (!is_finite_pair())
    throw UnsupportedConfigError("proximal subsets are enumerable only for finite pairs");
  std::vector<std::size_t> out;
  for (std::size_t j : idx_b_) {
    const Point y = Point::finite(j);
    if (distance_to_side(y, Side::A).distance <= separation_ + opts_.eps) out.push_back(j);
  }
  return out;
}

}  // namespace proxima
