#pragma once

#include <cstddef>
#include <vector>

namespace dpg {

using Vec = std::vector<double>;

// Dense row-major matrix.  Also used for the n x d stack of agent states.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), a(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return a[i * cols + j];
  }

  double* row(std::size_t i) { return a.data() + i * cols; }
  const double* row(std::size_t i) const { return a.data() + i * cols; }

  Vec row_vec(std::size_t i) const {
    return Vec(a.begin() + static_cast<long>(i * cols),
               a.begin() + static_cast<long>((i + 1) * cols));
  }

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);              // Euclidean norm
double sq_norm(const Vec& x);            // squared Euclidean norm
Vec sub(const Vec& x, const Vec& y);     // x - y
void axpy(double a, const Vec& x, Vec& y);  // y += a x

Vec matvec(const Mat& m, const Vec& x);

// Mean of the rows of an n x d matrix.
Vec row_mean(const Mat& x);

// Frobenius-squared distance of every row from a common point.
double sq_dist_rows(const Mat& x, const Vec& p);

// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
// returned sorted descending.  Off-diagonal norm is driven below tol.
// Throws NoConvergence if the sweep cap is exceeded.
Vec jacobi_eigenvalues(Mat m, double tol = 1e-12, int max_sweeps = 100);

}  // namespace dpg
