#include "oracles.hpp"

#include <cmath>

namespace oracles {

using algebrokit::Mat;

std::vector<double> vector_field_commutator(const VectorField& V, const VectorField& W,
                                            std::span<const double> point, double h) {
  const std::size_t n = point.size();
  std::vector<double> out(n, 0.0);
  const auto v0 = V(point), w0 = W(point);
  std::vector<double> q(point.begin(), point.end());
  for (std::size_t j = 0; j < n; ++j) {
    const double x = q[j];
    q[j] = x + h;
    const auto wp = W(q), vp = V(q);
    q[j] = x - h;
    const auto wm = W(q), vm = V(q);
    q[j] = x;
    for (std::size_t i = 0; i < n; ++i) {
      const double dW = (wp[i] - wm[i]) / (2 * h);
      const double dV = (vp[i] - vm[i]) / (2 * h);
      out[i] += v0[j] * dW - w0[j] * dV;
    }
  }
  return out;
}

Mat expm(const Mat& M) {
  // scale so the norm is small, Taylor to machine precision, square back
  double norm = 0.0;
  for (double v : M.a) norm = std::max(norm, std::fabs(v));
  int squarings = 0;
  Mat A = M;
  while (norm > 0.25) {
    A = A.scaled(0.5);
    norm *= 0.5;
    ++squarings;
  }
  Mat result = Mat::identity(M.rows);
  Mat term = Mat::identity(M.rows);
  for (int k = 1; k <= 24; ++k) {
    term = (term * A).scaled(1.0 / k);
    result = result + term;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

Mat rotation3(std::size_t axis, double angle) {
  const std::size_t u = (axis + 1) % 3, v = (axis + 2) % 3;
  Mat R = Mat::identity(3);
  R(u, u) = std::cos(angle);
  R(v, v) = std::cos(angle);
  R(u, v) = -std::sin(angle);
  R(v, u) = std::sin(angle);
  return R;
}

std::vector<Mat> so3_generators() {
  std::vector<Mat> J(3, Mat(3, 3));
  // (J_k)_{ij} = -eps_{kij}
  const int eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                            {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                            {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) J[k](i, j) = -eps[k][i][j];
  return J;
}

std::vector<Mat> sl2_generators() {
  Mat H(2, 2), E(2, 2), F(2, 2);
  H(0, 0) = 1;
  H(1, 1) = -1;
  E(0, 1) = 1;
  F(1, 0) = 1;
  return {H, E, F};
}

std::vector<std::vector<std::vector<double>>> epsilon3() {
  std::vector<std::vector<std::vector<double>>> f(
      3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  f[0][1][2] = 1;
  f[1][2][0] = 1;
  f[2][0][1] = 1;
  f[1][0][2] = -1;
  f[2][1][0] = -1;
  f[0][2][1] = -1;
  return f;
}

std::vector<std::vector<std::vector<double>>> sl2_constants() {
  std::vector<std::vector<std::vector<double>>> f(
      3, std::vector<std::vector<double>>(3, std::vector<double>(3, 0.0)));
  // basis order (H, E, F): [H,E] = 2E, [H,F] = -2F, [E,F] = H
  f[0][1][1] = 2;
  f[1][0][1] = -2;
  f[0][2][2] = -2;
  f[2][0][2] = 2;
  f[1][2][0] = 1;
  f[2][1][0] = -1;
  return f;
}

}  // namespace oracles
