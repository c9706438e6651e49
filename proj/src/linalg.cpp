#include "dpg/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "dpg/errors.hpp"

namespace dpg {

double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double sq_norm(const Vec& x) { return dot(x, x); }

double norm2(const Vec& x) { return std::sqrt(sq_norm(x)); }

Vec sub(const Vec& x, const Vec& y) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

Vec matvec(const Mat& m, const Vec& x) {
  if (x.size() != m.cols) throw DimensionMismatch("matvec: size mismatch");
  Vec r(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* p = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += p[j] * x[j];
    r[i] = s;
  }
  return r;
}

Vec row_mean(const Mat& x) {
  Vec m(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) m[j] += x(i, j);
  for (double& v : m) v /= static_cast<double>(x.rows);
  return m;
}

double sq_dist_rows(const Mat& x, const Vec& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i)
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = x(i, j) - p[j];
      s += d * d;
    }
  return s;
}

namespace {

double offdiag_sq(const Mat& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = i + 1; j < m.cols; ++j) s += 2.0 * m(i, j) * m(i, j);
  return s;
}

}  // namespace

Vec jacobi_eigenvalues(Mat m, double tol, int max_sweeps) {
  const std::size_t n = m.rows;
  if (n != m.cols) throw DimensionMismatch("jacobi: matrix not square");
  if (n == 1) return {m(0, 0)};

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (std::sqrt(offdiag_sq(m)) < tol) {
      Vec ev(n);
      for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
      std::sort(ev.begin(), ev.end(), std::greater<double>());
      return ev;
    }
    for (std::size_t p = 0; p < n - 1; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // rotate rows/columns p and q
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
      }
    }
  }
  throw NoConvergence("jacobi: sweep cap exceeded");
}

}  // namespace dpg
