#include "proxima/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace proxima {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(const std::vector<Vec>& row_list) {
  if (row_list.empty()) return {};
  Matrix m(row_list.size(), row_list.front().size());
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (row_list[i].size() != m.cols)
      throw InvalidArgumentError("matrix rows have inconsistent lengths");
    std::copy(row_list[i].begin(), row_list[i].end(), m.data.begin() + static_cast<std::ptrdiff_t>(i * m.cols));
  }
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatchError("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

double dist2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatchError("dist2: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm_p(std::span<const double> a, double p) {
  if (!(p >= 1.0)) throw InvalidArgumentError("norm_p: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double v : a) s += std::abs(v);
    return s;
  }
  if (p == 2.0) return norm2(a);
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double v : a) s += std::pow(std::abs(v) / m, p);
  return m * std::pow(s, 1.0 / p);
}

Vec add(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("add: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

Vec sub(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw DimensionMismatchError("sub: length mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vec scale(const Vec& a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

Vec matvec(const Matrix& m, const Vec& x) {
  if (m.cols != x.size()) throw DimensionMismatchError("matvec: dimension mismatch");
  Vec r(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows) throw DimensionMismatchError("matmul: dimension mismatch");
  Matrix r(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

namespace {

// Power iteration for the largest eigenvalue of a PSD matrix given as a
// matvec callback. The start vector is deterministic and unlikely to be
// orthogonal to the dominant eigenspace.
template <typename MatVec>
double psd_lambda_max(std::size_t n, MatVec&& mv, double tol) {
  if (n == 0) return 0.0;
  Vec v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + static_cast<double>(i) / static_cast<double>(n + 1);
  double nv = norm2(v);
  for (auto& x : v) x /= nv;
  double lambda = 0.0;
  constexpr int kMaxIters = 50000;
  for (int it = 0; it < kMaxIters; ++it) {
    Vec w = mv(v);
    const double nw = norm2(w);
    if (nw == 0.0) return 0.0;  // v in the kernel and nothing larger found
    const double next = dot(v, w);  // Rayleigh quotient (v normalized)
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next)) && it > 2)
      return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

double spectral_norm(const Matrix& m, double tol) {
  if (m.rows == 0 || m.cols == 0) return 0.0;
  const Matrix mt = transpose(m);
  auto mv = [&](const Vec& v) { return matvec(mt, matvec(m, v)); };
  const double l = psd_lambda_max(m.cols, mv, tol);
  return std::sqrt(std::max(0.0, l));
}

double sym_lambda_min(const Matrix& sym, double tol) {
  if (!sym.square()) throw DimensionMismatchError("sym_lambda_min: matrix not square");
  const std::size_t n = sym.rows;
  if (n == 0) return 0.0;
  // Gershgorin upper bound for lambda_max, then power-iterate g*I - sym.
  double g = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) r += std::abs(sym(i, j));
    g = std::max(g, sym(i, i) + r);
  }
  auto mv = [&](const Vec& v) {
    Vec w = matvec(sym, v);
    for (std::size_t i = 0; i < n; ++i) w[i] = g * v[i] - w[i];
    return w;
  };
  const double mu = psd_lambda_max(n, mv, tol);
  return g - mu;
}

OrthonormalRows orthonormalize_rows(const Matrix& a, const Vec& c) {
  if (a.rows != c.size())
    throw DimensionMismatchError("orthonormalize_rows: offset length mismatch");
  OrthonormalRows out;
  double scale_a = 0.0, scale_c = 0.0;
  for (double v : a.data) scale_a = std::max(scale_a, std::abs(v));
  for (double v : c) scale_c = std::max(scale_c, std::abs(v));
  const double drop_tol = 1e-12 * std::max(1.0, scale_a);
  const double consistency_tol = 1e-9 * std::max({1.0, scale_a, scale_c});
  for (std::size_t i = 0; i < a.rows; ++i) {
    Vec r(a.row(i).begin(), a.row(i).end());
    double off = c[i];
    // two Gram-Schmidt passes for numerical orthogonality
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < out.q.size(); ++j) {
        const double coef = dot(r, out.q[j]);
        for (std::size_t k = 0; k < r.size(); ++k) r[k] -= coef * out.q[j][k];
        off -= coef * out.d[j];
      }
    }
    const double nr = norm2(r);
    if (nr <= drop_tol) {
      if (std::abs(off) > consistency_tol)
        throw InvalidArgumentError("affine set is empty: inconsistent equality constraints");
      continue;  // redundant row
    }
    for (auto& v : r) v /= nr;
    out.q.push_back(std::move(r));
    out.d.push_back(off / nr);
  }
  return out;
}

}  // namespace proxima
