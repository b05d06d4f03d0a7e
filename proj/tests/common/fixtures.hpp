#pragma once

// Golden charts shared by the unit and acceptance suites.

#include <vector>

#include "algebrokit/algebroid.hpp"
#include "algebrokit/poisson.hpp"

namespace fixtures {

using namespace algebrokit;

inline std::vector<std::vector<ScalarField>> zero_matrix(std::size_t m,
                                                         const std::vector<std::string>& vars) {
  std::vector<std::vector<ScalarField>> out(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i].push_back(constant_field(0.0, vars));
  return out;
}

inline std::vector<std::vector<std::vector<ScalarField>>> zero_cube(
    std::size_t m, const std::vector<std::string>& vars) {
  std::vector<std::vector<std::vector<ScalarField>>> out(m,
                                                         std::vector<std::vector<ScalarField>>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) out[i][j].push_back(constant_field(0.0, vars));
  return out;
}

inline void set_antisym(std::vector<std::vector<ScalarField>>& pi, std::size_t i,
                        std::size_t j, ScalarField f) {
  pi[j][i] = (-1.0) * f;
  pi[i][j] = std::move(f);
}

// phi_{ijk} = f on all six permutations with signs (0-based indices).
inline void set_twist(std::vector<std::vector<std::vector<ScalarField>>>& phi, std::size_t i,
                      std::size_t j, std::size_t k, const ScalarField& f) {
  const ScalarField neg = (-1.0) * f;
  phi[i][j][k] = f;
  phi[j][k][i] = f;
  phi[k][i][j] = f;
  phi[j][i][k] = neg;
  phi[i][k][j] = neg;
  phi[k][j][i] = neg;
}

inline std::vector<std::string> xnames(std::size_t m) {
  std::vector<std::string> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = "x" + std::to_string(i + 1);
  return v;
}

// Linear so(3)* chart: {x1,x2} = x3 cyclic.
inline PoissonChart so3_star(double lo = -2.0, double hi = 2.0) {
  const auto vars = xnames(3);
  auto pi = zero_matrix(3, vars);
  set_antisym(pi, 0, 1, parse_expr("x3", vars));
  set_antisym(pi, 0, 2, parse_expr("-x2", vars));
  set_antisym(pi, 1, 2, parse_expr("x1", vars));
  return make_poisson(std::move(pi), {}, unit_box(3, lo, hi), vars);
}

// Canonical symplectic R^4 with {x1,x3} = 1, {x2,x4} = 1.
inline PoissonChart canonical_r4() {
  const auto vars = xnames(4);
  auto pi = zero_matrix(4, vars);
  set_antisym(pi, 0, 2, parse_expr("1", vars));
  set_antisym(pi, 1, 3, parse_expr("1", vars));
  return make_poisson(std::move(pi), {}, unit_box(4), vars);
}

// The same chart with coordinates reordered to (x2, x4, x1, x3), so that the
// originally symplectically-paired (x1, x3) are the trailing transversal pair.
inline PoissonChart canonical_r4_reordered() {
  const auto vars = std::vector<std::string>{"y1", "y2", "y3", "y4"};
  auto pi = zero_matrix(4, vars);
  set_antisym(pi, 0, 1, parse_expr("1", vars));  // {x2, x4}
  set_antisym(pi, 2, 3, parse_expr("1", vars));  // {x1, x3}
  return make_poisson(std::move(pi), {}, unit_box(4), vars);
}

// Nondegenerate twisted oracle: omega = dx1^dx2 + (1+x1) dx3^dx4,
// pi = -inverse(omega), phi = d(omega) (phi_{134} = 1).
inline PoissonChart twisted_oracle() {
  const auto vars = xnames(4);
  auto pi = zero_matrix(4, vars);
  set_antisym(pi, 0, 1, parse_expr("1", vars));
  set_antisym(pi, 2, 3, parse_expr("1/(1 + x1)", vars));
  auto phi = zero_cube(4, vars);
  set_twist(phi, 0, 2, 3, parse_expr("1", vars));
  return make_poisson(std::move(pi), std::move(phi), unit_box(4, -0.5, 0.5), vars);
}

// Same bivector with an explicitly zero twist (twisted code paths active).
inline PoissonChart twisted_oracle_zero_twist() {
  const auto vars = xnames(4);
  auto pi = zero_matrix(4, vars);
  set_antisym(pi, 0, 1, parse_expr("1", vars));
  set_antisym(pi, 2, 3, parse_expr("1/(1 + x1)", vars));
  return make_poisson(std::move(pi), zero_cube(4, vars), unit_box(4, -0.5, 0.5), vars);
}

// Untwisted view of the oracle bivector (no twist stored at all).
inline PoissonChart twisted_oracle_untwisted_view() {
  const auto vars = xnames(4);
  auto pi = zero_matrix(4, vars);
  set_antisym(pi, 0, 1, parse_expr("1", vars));
  set_antisym(pi, 2, 3, parse_expr("1/(1 + x1)", vars));
  return make_poisson(std::move(pi), {}, unit_box(4, -0.5, 0.5), vars);
}

// Cotangent algebroid of so(3)* written directly from expressions:
// anchor rho^{mu i} = pi^{mu i} = eps_{mu i sigma} x^sigma, structure
// f^{mu nu}_k = eps_{mu nu k} (constants).  Paths over it genuinely move.
inline AlgebroidChart so3_star_cotangent(double lo = -2.0, double hi = 2.0) {
  const auto vars = xnames(3);
  std::vector<std::vector<ScalarField>> anchor(3);
  const char* entries[3][3] = {{"0", "x3", "-x2"}, {"-x3", "0", "x1"}, {"x2", "-x1", "0"}};
  for (std::size_t mu = 0; mu < 3; ++mu)
    for (std::size_t i = 0; i < 3; ++i)
      anchor[mu].push_back(parse_expr(entries[mu][i], vars));
  std::vector<std::vector<std::vector<ScalarField>>> f(
      3, std::vector<std::vector<ScalarField>>(3));
  const double eps[3][3][3] = {{{0, 0, 0}, {0, 0, 1}, {0, -1, 0}},
                               {{0, 0, -1}, {0, 0, 0}, {1, 0, 0}},
                               {{0, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c)
        f[a][b].push_back(constant_field(eps[a][b][c], vars));
  return make_algebroid(3, 3, std::move(anchor), std::move(f), unit_box(3, lo, hi));
}

}  // namespace fixtures
