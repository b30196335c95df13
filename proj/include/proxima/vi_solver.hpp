#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "proxima/bpp_engine.hpp"
#include "proxima/convex_sets.hpp"

namespace proxima {

/// No certified step size or contraction factor can be produced because the
/// Lipschitz constant or strong-monotonicity modulus is missing or invalid.
struct CannotCertifyError : Error {
  using Error::Error;
};

/// Iterates left the 1e12 guard ball: the step size is too large for this
/// operator.
struct DivergenceError : Error {
  DivergenceError(std::string msg, Vec iterate) : Error(std::move(msg)), iterate(std::move(iterate)) {}
  Vec iterate;
};

/// The operator S of the inequality <Su, v - u> >= 0. Affine operators carry
/// certified Lipschitz / strong-monotonicity metadata (computed from the
/// matrix when not given); callables can at best carry sampled estimates.
class Operator {
 public:
  static Operator affine(Matrix m, Vec b, std::optional<double> lipschitz = {},
                         std::optional<double> monotonicity = {});
  static Operator callable(std::size_t dim, std::function<Vec(const Vec&)> fn,
                           std::optional<double> lipschitz = {},
                           std::optional<double> monotonicity = {});

  Vec apply(const Vec& u) const;
  std::size_t dim() const { return dim_; }
  bool is_affine() const { return affine_m_.has_value(); }
  const Matrix& matrix() const;
  const Vec& offset() const;

  std::optional<double> lipschitz() const { return lipschitz_; }
  std::optional<double> monotonicity() const { return monotonicity_; }
  /// True when the metadata came from sampled difference quotients.
  bool metadata_estimated() const { return estimated_; }

  /// Returns a copy whose missing metadata is filled with sampled
  /// difference-quotient estimates (marked as estimates, not certificates).
  Operator with_estimated_metadata(int samples, std::uint64_t seed) const;

 private:
  Operator() = default;
  std::size_t dim_ = 0;
  std::function<Vec(const Vec&)> fn_;
  std::optional<Matrix> affine_m_;
  std::optional<Vec> affine_b_;
  std::optional<double> lipschitz_;
  std::optional<double> monotonicity_;
  bool estimated_ = false;
};

struct LambdaChoice {
  double lambda = 0.0;
  double predicted_k = 0.0;
  bool certified = false;  // false when built from estimated metadata
};

/// Step size lambda = eta / L^2 minimizing the contraction factor
/// sqrt(1 - 2*lambda*eta + lambda^2*L^2) of I - lambda*S; the projection is
/// nonexpansive so the factor carries over to P_K(I - lambda S).
LambdaChoice choose_lambda(const Operator& s);

/// Contraction factor of I - lambda*S for a given lambda, when metadata
/// allows it and the factor is < 1.
std::optional<LambdaChoice> lambda_factor(const Operator& s, double lambda);

struct VIProblem {
  ConvexSet k;
  Operator s;
  std::optional<double> lambda;  // empty = choose automatically
};

struct VIResult {
  Point solution;
  double natural_residual = 0.0;  // ||u - P_K(u - lambda S u)||
  int iterations = 0;
  double lambda = 0.0;
  double k_used = 0.0;
  bool certified = false;
  IterationTrace trace;
  std::vector<std::string> warnings;
};

/// Projected fixed-point iteration u_{n+1} = P_K(u_n - lambda S u_n), run as
/// the proximal iteration on the degenerate pair A = B = K. Starts outside K
/// are projected onto K first. Iterates beyond the 1e12 ball raise
/// DivergenceError.
VIResult solve_vi(const VIProblem& problem, const Vec& u0,
                  const ConvergenceCriterion& criterion = {});

struct ViResidualReport {
  double natural_residual = 0.0;
  double worst_probe_violation = 0.0;  // min over sampled v in K of <Su, v - u>
};

/// Checks both directions of the fixed-point characterization at u: the
/// natural residual and the worst sampled inequality violation. The residual
/// uses the problem's lambda; the characterization holds for any positive
/// value, so an unset lambda defaults to 1.
ViResidualReport vi_residual(const VIProblem& problem, const Vec& u, int probe_count,
                             std::uint64_t seed);

}  // namespace proxima
