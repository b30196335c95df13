#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "proxima/errors.hpp"

namespace proxima {

using Vec = std::vector<double>;

/// Dense row-major matrix. Small problems only; no view machinery.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(const std::vector<Vec>& row_list);

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data).subspan(i * cols, cols);
  }

  bool square() const { return rows == cols; }
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double dist2(std::span<const double> a, std::span<const double> b);

/// p-norm for p in [1, inf]; scaled to avoid overflow for large p.
double norm_p(std::span<const double> a, double p);

Vec add(const Vec& a, const Vec& b);
Vec sub(const Vec& a, const Vec& b);
Vec scale(const Vec& a, double s);

Vec matvec(const Matrix& m, const Vec& x);
Matrix transpose(const Matrix& m);
Matrix matmul(const Matrix& a, const Matrix& b);

/// Largest singular value of m, by power iteration on m^T m.
/// Deterministic start vector; |lambda| change below tol stops.
double spectral_norm(const Matrix& m, double tol = 1e-10);

/// Smallest eigenvalue of a symmetric matrix, via a Gershgorin shift and
/// power iteration on the resulting PSD complement.
double sym_lambda_min(const Matrix& sym, double tol = 1e-10);

/// Row-orthonormalized representation of a consistent linear system Ax = c.
/// Redundant rows are dropped; an inconsistent redundant row means the
/// solution set is empty and construction must fail upstream.
struct OrthonormalRows {
  std::vector<Vec> q;  // orthonormal rows
  Vec d;               // transformed offsets, projection is x - sum q_i (q_i.x - d_i)
};

/// Throws InvalidArgumentError when the system is inconsistent (empty set).
OrthonormalRows orthonormalize_rows(const Matrix& a, const Vec& c);

}  // namespace proxima
