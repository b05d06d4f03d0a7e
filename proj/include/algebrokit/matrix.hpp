#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace algebrokit {

// Small dense row-major matrix; all matrices in this toolkit are desk scale
// (representation dimension or 2m for cotangent forms).
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  Mat operator*(const Mat& o) const {
    if (cols != o.rows) throw std::invalid_argument("Mat: shape mismatch in product");
    Mat out(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const double v = (*this)(i, k);
        if (v == 0.0) continue;
        for (std::size_t j = 0; j < o.cols; ++j) out(i, j) += v * o(k, j);
      }
    return out;
  }

  Mat operator+(const Mat& o) const {
    Mat out = *this;
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] += o.a[i];
    return out;
  }

  Mat operator-(const Mat& o) const {
    Mat out = *this;
    for (std::size_t i = 0; i < a.size(); ++i) out.a[i] -= o.a[i];
    return out;
  }

  Mat scaled(double c) const {
    Mat out = *this;
    for (double& v : out.a) v *= c;
    return out;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
  }
};

inline double max_abs_diff(const Mat& x, const Mat& y) { return (x - y).max_abs(); }

// Gauss-Jordan inverse with partial pivoting.
inline Mat inverse(Mat m) {
  if (m.rows != m.cols) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = m.rows;
  Mat inv = Mat::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m(r, col)) > std::fabs(m(piv, col))) piv = r;
    if (m(piv, col) == 0.0) throw std::runtime_error("inverse: singular matrix");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const double d = m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m(r, col);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

inline double determinant(Mat m) {
  if (m.rows != m.cols) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t n = m.rows;
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(m(r, col)) > std::fabs(m(piv, col))) piv = r;
    if (m(piv, col) == 0.0) return 0.0;
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(col, j));
      det = -det;
    }
    det *= m(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m(r, col) / m(col, col);
      for (std::size_t j = col; j < n; ++j) m(r, j) -= f * m(col, j);
    }
  }
  return det;
}

}  // namespace algebrokit
