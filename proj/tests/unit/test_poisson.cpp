#include <doctest.h>

#include <cmath>
#include <random>

#include "algebrokit/poisson.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace algebrokit;

namespace {

// Pointwise omega matrix of the twisted oracle and its negated inverse.
Mat oracle_omega(std::span<const double> x) {
  Mat w(4, 4);
  w(0, 1) = 1.0;
  w(1, 0) = -1.0;
  w(2, 3) = 1.0 + x[0];
  w(3, 2) = -(1.0 + x[0]);
  return w;
}

}  // namespace

TEST_CASE("poisson bracket basics") {
  auto P = fixtures::so3_star(-6, 6);
  const auto vars = P.variables();
  auto f = parse_expr("x1*x2 + sin(x3)", vars);
  const std::vector<double> p = {0.3, -0.2, 0.9};
  CHECK(std::fabs(poisson_bracket(P, f, f, p)) < 1e-12);

  // canonical R^2
  const auto v2 = fixtures::xnames(2);
  auto pi2 = fixtures::zero_matrix(2, v2);
  fixtures::set_antisym(pi2, 0, 1, parse_expr("1", v2));
  auto C = make_poisson(std::move(pi2), {}, unit_box(2), v2);
  CHECK(poisson_bracket(C, parse_expr("x1", v2), parse_expr("x2", v2),
                        std::vector<double>{0.2, 0.4}) == doctest::Approx(1.0).epsilon(1e-12));

  // so(3)*: {x1, x2} = x3 evaluated at (0,0,5)
  CHECK(poisson_bracket(P, parse_expr("x1", vars), parse_expr("x2", vars),
                        std::vector<double>{0, 0, 5}) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("bracket/bivector consistency on coordinate pairs") {
  auto P = fixtures::so3_star();
  const auto vars = P.variables();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> p = {unit(rng), unit(rng), unit(rng)};
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        const double br = poisson_bracket(P, coordinate_field(i, vars),
                                          coordinate_field(j, vars), p);
        CHECK(std::fabs(br - P.bivector(i, j).eval(p)) < 1e-12);
      }
  }
}

TEST_CASE("derivation property of the bracket") {
  auto P = fixtures::so3_star();
  const auto vars = P.variables();
  auto f = parse_expr("x1^2 - x3", vars);
  auto g = parse_expr("x2 + x3^2", vars);
  auto h = parse_expr("x1*x2", vars);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    const std::vector<double> p = {unit(rng), unit(rng), unit(rng)};
    const double lhs = poisson_bracket(P, f, g * h, p);
    const double rhs = g.eval(p) * poisson_bracket(P, f, h, p) +
                       poisson_bracket(P, f, g, p) * h.eval(p);
    CHECK(std::fabs(lhs - rhs) < 1e-8);
  }
}

TEST_CASE("check_jacobi on constant and linear bivectors") {
  const auto v4 = fixtures::xnames(4);
  auto pi = fixtures::zero_matrix(4, v4);
  fixtures::set_antisym(pi, 0, 1, parse_expr("2", v4));
  fixtures::set_antisym(pi, 0, 3, parse_expr("-0.5", v4));
  fixtures::set_antisym(pi, 1, 2, parse_expr("1", v4));
  auto C = make_poisson(std::move(pi), {}, unit_box(4), v4);
  CHECK(check_jacobi(C, 1e-12).passed());

  CHECK(check_jacobi(fixtures::so3_star(), 1e-9).passed());
}

TEST_CASE("twisted oracle: pi expressions equal -inverse(omega) pointwise") {
  auto P = fixtures::twisted_oracle();
  const auto pts = halton_points(P.chart_box(), 16);
  for (const auto& x : pts) {
    const Mat want = inverse(oracle_omega(x)).scaled(-1.0);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::fabs(P.bivector(i, j).eval(x) - want(i, j)) < 1e-12);
  }
}

TEST_CASE("twisted Jacobi passes exactly where untwisted fails") {
  auto P = fixtures::twisted_oracle();
  auto report = check_jacobi(P, 1e-7);
  CHECK(report.passed());

  auto U = fixtures::twisted_oracle_untwisted_view();
  auto plain = check_jacobi(U, 1e-7);
  CHECK_FALSE(plain.passed());
  CHECK(plain.value_of("jacobi_max") > 0.1);
}

TEST_CASE("twist validation rejects non-closed 3-forms") {
  const auto vars = fixtures::xnames(4);
  auto pi = fixtures::zero_matrix(4, vars);
  fixtures::set_antisym(pi, 0, 1, parse_expr("1", vars));
  fixtures::set_antisym(pi, 2, 3, parse_expr("1", vars));
  auto phi = fixtures::zero_cube(4, vars);
  fixtures::set_twist(phi, 0, 1, 2, parse_expr("x4^2", vars));  // d(phi) != 0
  CHECK_THROWS_AS(make_poisson(std::move(pi), std::move(phi), unit_box(4), vars), Error);
}

TEST_CASE("dualize: zero algebroid and tangent algebroid") {
  auto Z = dualize(zero_algebroid(2, 2, unit_box(2)));
  const auto pts = halton_points(Z.chart_box(), 8);
  for (const auto& p : pts)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(Z.bivector(i, j).eval(p) == 0.0);

  auto T = dualize(tangent_algebroid(2, unit_box(2)));
  // {al^mu, b^i} = delta^{mu i}, everything else zero
  for (const auto& p : pts) {
    for (std::size_t mu = 0; mu < 2; ++mu)
      for (std::size_t i = 0; i < 2; ++i)
        CHECK(T.bivector(2 + mu, i).eval(p) == (mu == i ? 1.0 : 0.0));
    CHECK(T.bivector(0, 1).eval(p) == 0.0);
    CHECK(T.bivector(2, 3).eval(p) == 0.0);
  }
  CHECK(check_jacobi(T, 1e-10).passed());
}

TEST_CASE("dualize(so3) is the linear Poisson structure and satisfies Jacobi") {
  auto A = lie_algebra(oracles::epsilon3());
  auto P = dualize(A);
  CHECK(P.dim() == 4);
  CHECK(check_jacobi(P, 1e-9).passed());

  // bracket table at random points
  const auto vars = P.variables();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(-0.9, 0.9);
  const auto eps = oracles::epsilon3();
  auto casimir = parse_expr("al1^2 + al2^2 + al3^2", vars);
  for (int k = 0; k < 20; ++k) {
    const std::vector<double> p = {unit(rng), unit(rng), unit(rng), unit(rng)};
    for (std::size_t mu = 0; mu < 3; ++mu) {
      CHECK(std::fabs(poisson_bracket(P, coordinate_field(1 + mu, vars),
                                      coordinate_field(0, vars), p)) < 1e-8);
      for (std::size_t nu = 0; nu < 3; ++nu) {
        double want = 0.0;
        for (std::size_t sig = 0; sig < 3; ++sig) want += eps[mu][nu][sig] * p[1 + sig];
        const double got = poisson_bracket(P, coordinate_field(1 + mu, vars),
                                           coordinate_field(1 + nu, vars), p);
        CHECK(std::fabs(got - want) < 1e-8);
      }
      // Casimir: {|al|^2, al^mu} = 0
      CHECK(std::fabs(poisson_bracket(P, casimir, coordinate_field(1 + mu, vars), p)) < 1e-8);
    }
  }
}

TEST_CASE("dualize bracket table: linear-in-alpha functions act through the anchor") {
  auto A = fixtures::so3_star_cotangent();  // nonzero anchor makes this nontrivial
  auto P = dualize(A);
  const auto vars = P.variables();
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto G = parse_expr("x1^2 + x2*x3", A.base_variables());
  auto G_lifted = parse_expr("x1^2 + x2*x3", vars);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> p(6);
    for (auto& v : p) v = unit(rng);
    std::vector<double> c = {unit(rng), unit(rng), unit(rng)};
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g*al1 + %.17g*al2 + %.17g*al3", c[0], c[1], c[2]);
    auto F = parse_expr(buf, vars);
    // (rho_* F)(G) with F = c_mu e^mu
    SectionValue sec;
    for (double cv : c) sec.coefficients.push_back(constant_field(cv, A.base_variables()));
    const std::vector<double> base(p.begin(), p.begin() + 3);
    const double want = anchor_derivative(A, sec, G, base);
    const double got = poisson_bracket(P, F, G_lifted, p);
    CHECK(std::fabs(got - want) < 1e-8);
  }
}

TEST_CASE("cotangent algebroid of constant and linear charts") {
  auto C = fixtures::canonical_r4();
  auto TC = cotangent_algebroid(C);
  const std::vector<double> p = {0.1, 0.2, 0.3, 0.4};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      CHECK(std::fabs(TC.anchor(a, b).eval(p) - C.bivector(a, b).eval(p)) < 1e-12);
      for (std::size_t c = 0; c < 4; ++c)
        CHECK(std::fabs(TC.structure(a, b, c).eval(p)) < 1e-12);
    }
  CHECK(check_axioms(TC, 1e-10).passed());

  auto S = cotangent_algebroid(fixtures::so3_star());
  const std::vector<double> q = {0.5, -0.3, 0.8};
  const auto eps = oracles::epsilon3();
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b)
      for (std::size_t c = 0; c < 3; ++c)
        CHECK(std::fabs(S.structure(a, b, c).eval(q) - eps[a][b][c]) < 1e-10);
  CHECK(check_axioms(S, 1e-8).passed());
}

TEST_CASE("twisted cotangent algebroid of the oracle passes the axioms") {
  auto A = cotangent_algebroid(fixtures::twisted_oracle());
  auto report = check_axioms(A, 1e-6);
  CHECK(report.passed());
}

TEST_CASE("cotangent algebroid precondition rejects a twisted chart violating Jacobi") {
  const auto vars = fixtures::xnames(4);
  auto pi = fixtures::zero_matrix(4, vars);
  fixtures::set_antisym(pi, 0, 1, parse_expr("1", vars));
  fixtures::set_antisym(pi, 2, 3, parse_expr("1/(1 + x1)", vars));
  auto phi = fixtures::zero_cube(4, vars);
  fixtures::set_twist(phi, 0, 2, 3, parse_expr("2", vars));  // wrong scale: not d(omega)
  auto P = make_poisson(std::move(pi), std::move(phi), unit_box(4, -0.5, 0.5), vars);
  CHECK_THROWS_AS(cotangent_algebroid(P), Error);
}

TEST_CASE("twisted Koszul bracket") {
  auto P = fixtures::so3_star();
  const auto vars = P.variables();
  const std::vector<double> p = {0.4, -0.2, 0.7};

  // untwisted coordinate pair: components d_k pi^{rs} = eps_{rsk}
  const auto eps = oracles::epsilon3();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t s = 0; s < 3; ++s) {
      const auto br = twisted_koszul_bracket(P, coordinate_field(r, vars),
                                             coordinate_field(s, vars), p);
      for (std::size_t k = 0; k < 3; ++k) CHECK(std::fabs(br[k] - eps[r][s][k]) < 1e-8);
    }

  // antisymmetry under swap
  auto f = parse_expr("x1*x3", vars);
  auto g = parse_expr("x2 - x3^2", vars);
  const auto fg = twisted_koszul_bracket(P, f, g, p);
  const auto gf = twisted_koszul_bracket(P, g, f, p);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::fabs(fg[k] + gf[k]) < 1e-8);

  // twisted oracle: coordinate pair (x3, x4) matches the twisted cotangent
  // structure functions
  auto T = fixtures::twisted_oracle();
  auto TA = cotangent_algebroid(T);
  const std::vector<double> q = {0.2, -0.1, 0.3, 0.1};
  const auto tv = T.variables();
  const auto br =
      twisted_koszul_bracket(T, coordinate_field(2, tv), coordinate_field(3, tv), q);
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(std::fabs(br[k] - TA.structure(2, 3, k).eval(q)) < 1e-6);
}

TEST_CASE("twisted cotangent form") {
  auto P = fixtures::twisted_oracle();
  const std::size_t m = 4;

  // p = 0: canonical block matrix exactly
  CotangentPoint origin{{0, 0, 0, 0}, {0, 0, 0, 0}};
  const Mat w0 = twisted_cotangent_form(P, origin);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      CHECK(w0(i, j) == 0.0);
      CHECK(w0(m + i, m + j) == 0.0);
      CHECK(w0(i, m + j) == (i == j ? -1.0 : 0.0));
      CHECK(w0(m + i, j) == (i == j ? 1.0 : 0.0));
    }

  // phi = 0: canonical at any point
  auto Z = fixtures::twisted_oracle_zero_twist();
  CotangentPoint pt{{0.1, 0.2, -0.3, 0.4}, {1.0, -2.0, 0.5, 0.0}};
  const Mat wz = twisted_cotangent_form(Z, pt);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) CHECK(wz(i, j) == 0.0);

  // x-x block entries p_i pi^{ij} phi_{jkl} at x = 0, p = e_3
  CotangentPoint e3{{0, 0, 0, 0}, {0, 0, 1, 0}};
  const Mat w = twisted_cotangent_form(P, e3);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) {
      double want = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        want += P.bivector(2, j).eval(e3.base) * P.twist(j, k, l).eval(e3.base);
      CHECK(std::fabs(w(k, l) - want) < 1e-14);
    }
}

TEST_CASE("path-space twisted form") {
  auto P = fixtures::twisted_oracle();
  const std::size_t N = 40, m = 4;
  PathGrid path;
  PathVariation v1, v2;
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> unit(-0.4, 0.4);
  path.X.assign(N + 1, std::vector<double>(m));
  path.eta.assign(N + 1, std::vector<double>(m));
  v1.xi.assign(N + 1, std::vector<double>(m));
  v1.e.assign(N + 1, std::vector<double>(m));
  v2.xi.assign(N + 1, std::vector<double>(m));
  v2.e.assign(N + 1, std::vector<double>(m));
  for (std::size_t k = 0; k <= N; ++k)
    for (std::size_t i = 0; i < m; ++i) {
      path.X[k][i] = unit(rng);
      path.eta[k][i] = unit(rng);
      v1.xi[k][i] = unit(rng);
      v1.e[k][i] = unit(rng);
      v2.xi[k][i] = unit(rng);
      v2.e[k][i] = unit(rng);
    }

  // antisymmetry: identical variations pair to ~0
  CHECK(std::fabs(pathspace_twist_form(P, path, v1, v1)) < 1e-12);

  // eta = 0 kills the correction: twisted equals untwisted value
  auto U = fixtures::twisted_oracle_untwisted_view();
  PathGrid flat = path;
  for (auto& row : flat.eta)
    for (double& v : row) v = 0.0;
  CHECK(std::fabs(pathspace_twist_form(P, flat, v1, v2) -
                  pathspace_twist_form(U, flat, v1, v2)) < 1e-15);

  // no twist stored: reduces to the canonical pairing integral
  double direct = 0.0;
  {
    std::vector<double> integrand(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
      double val = 0.0;
      for (std::size_t i = 0; i < m; ++i)
        val += v1.e[k][i] * v2.xi[k][i] - v2.e[k][i] * v1.xi[k][i];
      integrand[k] = val;
    }
    direct = 0.5 * (integrand.front() + integrand.back());
    for (std::size_t k = 1; k < N; ++k) direct += integrand[k];
    direct /= N;
  }
  CHECK(std::fabs(pathspace_twist_form(U, path, v1, v2) - direct) < 1e-15);
}

TEST_CASE("zero twist arrays reproduce untwisted results to machine precision") {
  auto Z = fixtures::twisted_oracle_zero_twist();
  auto U = fixtures::twisted_oracle_untwisted_view();
  const auto pts = halton_points(Z.chart_box(), 16);

  auto rz = check_jacobi(Z, 1e300, 16);
  auto ru = check_jacobi(U, 1e300, 16);
  CHECK(std::fabs(rz.value_of("twisted_jacobi_max") - ru.value_of("jacobi_max")) < 1e-12);

  const auto vars = Z.variables();
  auto f = parse_expr("x1*x4 - x2", vars);
  auto g = parse_expr("x3 + x2^2", vars);
  for (const auto& p : pts) {
    const auto kz = twisted_koszul_bracket(Z, f, g, p);
    const auto ku = twisted_koszul_bracket(U, f, g, p);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::fabs(kz[k] - ku[k]) < 1e-12);
  }

  // cotangent algebroid needs an honestly Poisson bivector: compare on
  // so(3)* with and without zero twist arrays
  auto so3z = [] {
    const auto vars = fixtures::xnames(3);
    auto pi = fixtures::zero_matrix(3, vars);
    fixtures::set_antisym(pi, 0, 1, parse_expr("x3", vars));
    fixtures::set_antisym(pi, 0, 2, parse_expr("-x2", vars));
    fixtures::set_antisym(pi, 1, 2, parse_expr("x1", vars));
    return make_poisson(std::move(pi), fixtures::zero_cube(3, vars), unit_box(3, -2, 2), vars);
  }();
  auto so3u = fixtures::so3_star();
  auto az = cotangent_algebroid(so3z);
  auto au = cotangent_algebroid(so3u);
  const auto pts3 = halton_points(so3u.chart_box(), 16);
  for (const auto& p : pts3)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t c = 0; c < 3; ++c)
          CHECK(std::fabs(az.structure(a, b, c).eval(p) - au.structure(a, b, c).eval(p)) <
                1e-12);
}
