#include "proxima/vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace proxima {

namespace {

constexpr double kDivergenceRadius = 1e12;

}  // namespace

Operator Operator::affine(Matrix m, Vec b, std::optional<double> lipschitz,
                          std::optional<double> monotonicity) {
  if (!m.square() || m.rows == 0) throw InvalidArgumentError("operator matrix must be square");
  if (b.size() != m.rows) throw DimensionMismatchError("operator offset length mismatch");
  Operator op;
  op.dim_ = m.rows;
  if (lipschitz && !(*lipschitz > 0.0))
    throw InvalidArgumentError("Lipschitz constant must be > 0");
  op.lipschitz_ = lipschitz ? lipschitz : std::optional<double>(spectral_norm(m));
  if (monotonicity) {
    op.monotonicity_ = monotonicity;
  } else {
    // smallest eigenvalue of the symmetric part, kept only when positive
    Matrix sym(m.rows, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
      for (std::size_t j = 0; j < m.rows; ++j) sym(i, j) = 0.5 * (m(i, j) + m(j, i));
    const double eta = sym_lambda_min(sym);
    if (eta > 0.0) op.monotonicity_ = eta;
  }
  if (op.monotonicity_ && op.lipschitz_ && *op.monotonicity_ > *op.lipschitz_ + 1e-12)
    throw InvalidArgumentError("strong-monotonicity modulus cannot exceed the Lipschitz constant");
  // captured by value so copies of the operator stay self-contained
  op.fn_ = [m, b](const Vec& u) {
    Vec r = matvec(m, u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
  };
  op.affine_m_ = std::move(m);
  op.affine_b_ = std::move(b);
  return op;
}

Operator Operator::callable(std::size_t dim, std::function<Vec(const Vec&)> fn,
                            std::optional<double> lipschitz,
                            std::optional<double> monotonicity) {
  if (dim == 0) throw InvalidArgumentError("operator dimension must be >= 1");
  if (!fn) throw InvalidArgumentError("operator needs a callable");
  Operator op;
  op.dim_ = dim;
  op.fn_ = std::move(fn);
  if (lipschitz && !(*lipschitz > 0.0))
    throw InvalidArgumentError("Lipschitz constant must be > 0");
  op.lipschitz_ = lipschitz;
  op.monotonicity_ = monotonicity;
  if (op.monotonicity_ && op.lipschitz_ && *op.monotonicity_ > *op.lipschitz_ + 1e-12)
    throw InvalidArgumentError("strong-monotonicity modulus cannot exceed the Lipschitz constant");
  return op;
}

Vec Operator::apply(const Vec& u) const {
  if (u.size() != dim_) throw DimensionMismatchError("operator input dimension mismatch");
  return fn_(u);
}

const Matrix& Operator::matrix() const {
  if (!affine_m_) throw UnsupportedConfigError("callable operator has no matrix");
  return *affine_m_;
}
const Vec& Operator::offset() const {
  if (!affine_b_) throw UnsupportedConfigError("callable operator has no offset");
  return *affine_b_;
}

Operator Operator::with_estimated_metadata(int samples, std::uint64_t seed) const {
  if (samples < 2) throw InvalidArgumentError("metadata estimation needs samples >= 2");
  Operator op = *this;
  if (op.lipschitz_ && op.monotonicity_) return op;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double l_hat = 0.0;
  double eta_hat = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vec u(dim_), v(dim_);
    for (auto& x : u) x = gauss(rng) * 2.0;
    for (auto& x : v) x = gauss(rng) * 2.0;
    const Vec du = sub(u, v);
    const double n = norm2(du);
    if (n <= 1e-12) continue;
    const Vec ds = sub(apply(u), apply(v));
    l_hat = std::max(l_hat, norm2(ds) / n);
    eta_hat = std::min(eta_hat, dot(ds, du) / (n * n));
  }
  if (!op.lipschitz_ && l_hat > 0.0) op.lipschitz_ = l_hat;
  if (!op.monotonicity_ && std::isfinite(eta_hat) && eta_hat > 0.0) op.monotonicity_ = eta_hat;
  op.estimated_ = true;
  return op;
}

LambdaChoice choose_lambda(const Operator& s) {
  const std::optional<double> l = s.lipschitz();
  const std::optional<double> eta = s.monotonicity();
  if (!l || !(*l > 0.0))
    throw CannotCertifyError("no Lipschitz constant available for the operator");
  if (!eta || !(*eta > 0.0))
    throw CannotCertifyError(
        "no positive strong-monotonicity modulus available: cannot certify a contraction");
  LambdaChoice c;
  c.lambda = *eta / (*l * *l);
  const double ratio = *eta / *l;
  c.predicted_k = std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
  c.certified = !s.metadata_estimated();
  return c;
}

std::optional<LambdaChoice> lambda_factor(const Operator& s, double lambda) {
  const std::optional<double> l = s.lipschitz();
  const std::optional<double> eta = s.monotonicity();
  if (!l || !eta || !(*eta > 0.0)) return std::nullopt;
  const double k2 = 1.0 - 2.0 * lambda * *eta + lambda * lambda * *l * *l;
  if (k2 >= 1.0) return std::nullopt;
  LambdaChoice c;
  c.lambda = lambda;
  c.predicted_k = std::sqrt(std::max(0.0, k2));
  c.certified = !s.metadata_estimated();
  return c;
}

VIResult solve_vi(const VIProblem& problem, const Vec& u0, const ConvergenceCriterion& criterion) {
  const std::size_t dim = problem.k.dim();
  if (problem.s.dim() != dim)
    throw DimensionMismatchError("operator and feasible set dimensions differ");
  if (u0.size() != dim) throw DimensionMismatchError("start dimension mismatch");

  std::vector<std::string> warnings;
  LambdaChoice choice;
  bool have_factor = false;
  if (problem.lambda) {
    if (!(*problem.lambda > 0.0)) throw InvalidArgumentError("step size lambda must be > 0");
    if (auto f = lambda_factor(problem.s, *problem.lambda)) {
      choice = *f;
      have_factor = true;
    } else {
      choice.lambda = *problem.lambda;
      choice.certified = false;
      warnings.push_back(
          "user-supplied lambda without a contraction factor: run is uncertified");
    }
  } else {
    choice = choose_lambda(problem.s);  // throws CannotCertifyError without metadata
    have_factor = true;
  }
  if (have_factor && problem.s.metadata_estimated())
    warnings.push_back("operator metadata is estimated from samples, not certified");

  const MetricSpace space = MetricSpace::euclidean(dim, 2.0);
  ProximalPair pair = ProximalPair::convex(space, problem.k, problem.k);

  const double lambda = choice.lambda;
  const Operator& s = problem.s;
  const ConvexSet& k_set = problem.k;
  auto step_map = [lambda, &s, &k_set](const Point& p) {
    const Vec& u = p.coords();
    if (norm2(u) > kDivergenceRadius)
      throw DivergenceError(
          "iterates left the 1e12 ball: the step size is too large for this operator "
          "(try a smaller lambda)",
          u);
    Vec z = s.apply(u);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = u[i] - lambda * z[i];
    return Point::euclidean(k_set.project(z).point);
  };

  std::optional<double> declared_k;
  if (have_factor && choice.predicted_k < 1.0) declared_k = choice.predicted_k;

  ProximalMap map(std::move(pair), step_map, declared_k);

  Vec start = u0;
  if (!problem.k.contains(start, map.eps())) start = problem.k.project(start).point;

  IterateOutput out = iterate(map, Point::euclidean(start), criterion);

  VIResult result;
  result.solution = out.result.point;
  result.iterations = out.result.iterations;
  result.lambda = lambda;
  result.k_used = out.result.certificate.k_used;
  result.certified = choice.certified && declared_k.has_value();
  result.trace = std::move(out.trace);
  result.warnings = std::move(warnings);
  for (const std::string& w : out.result.certificate.warnings) result.warnings.push_back(w);
  const Vec& u_star = result.solution.coords();
  Vec z = s.apply(u_star);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = u_star[i] - lambda * z[i];
  result.natural_residual = dist2(u_star, problem.k.project(z).point);
  return result;
}

ViResidualReport vi_residual(const VIProblem& problem, const Vec& u, int probe_count,
                             std::uint64_t seed) {
  const std::size_t dim = problem.k.dim();
  if (u.size() != dim) throw DimensionMismatchError("point dimension mismatch");
  if (probe_count < 1) throw InvalidArgumentError("probe count must be >= 1");
  const double lambda = problem.lambda.value_or(1.0);
  ViResidualReport report;
  const Vec su = problem.s.apply(u);
  Vec shifted(dim);
  for (std::size_t i = 0; i < dim; ++i) shifted[i] = u[i] - lambda * su[i];
  report.natural_residual = dist2(u, problem.k.project(shifted).point);
  report.worst_probe_violation = std::numeric_limits<double>::infinity();
  for (const Vec& v : problem.k.sample(probe_count, seed)) {
    const double violation = dot(su, sub(v, u));
    report.worst_probe_violation = std::min(report.worst_probe_violation, violation);
  }
  return report;
}

}  // namespace proxima
