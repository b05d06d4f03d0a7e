#include "algebrokit/algebroid.hpp"

#include <cmath>
#include <stdexcept>

namespace algebrokit {

namespace {

std::vector<std::string> base_names(std::size_t n) {
  std::vector<std::string> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = "b" + std::to_string(i + 1);
  return v;
}

}  // namespace

const ScalarField& AlgebroidChart::anchor(std::size_t mu, std::size_t i) const {
  return anchor_.at(mu).at(i);
}

const ScalarField& AlgebroidChart::structure(std::size_t mu, std::size_t nu,
                                             std::size_t sigma) const {
  return structure_.at(mu).at(nu).at(sigma);
}

AlgebroidChart make_algebroid(std::size_t base_dim, std::size_t rank,
                              std::vector<std::vector<ScalarField>> anchor,
                              std::vector<std::vector<std::vector<ScalarField>>> structure,
                              Box chart_box, ChartKind kind, double fd_step) {
  if (base_dim == 0 || rank == 0) throw Error("make_algebroid: base_dim and rank must be positive");
  if (chart_box.dim() != base_dim) throw Error("make_algebroid: chart_box dimension mismatch");
  if (anchor.size() != rank) throw Error("make_algebroid: anchor must have `rank` rows");
  for (const auto& row : anchor)
    if (row.size() != base_dim) throw Error("make_algebroid: anchor row length must be base_dim");
  if (structure.size() != rank) throw Error("make_algebroid: structure must be rank^3");
  for (const auto& plane : structure) {
    if (plane.size() != rank) throw Error("make_algebroid: structure must be rank^3");
    for (const auto& row : plane)
      if (row.size() != rank) throw Error("make_algebroid: structure must be rank^3");
  }

  AlgebroidChart A;
  A.n_ = base_dim;
  A.r_ = rank;
  A.vars_ = anchor.empty() || anchor[0].empty() || anchor[0][0].arity() != base_dim
                ? base_names(base_dim)
                : anchor[0][0].variables();
  for (const auto& row : anchor)
    for (const auto& f : row)
      if (f.arity() != base_dim) throw Error("make_algebroid: anchor field arity mismatch");
  for (const auto& plane : structure)
    for (const auto& row : plane)
      for (const auto& f : row)
        if (f.arity() != base_dim) throw Error("make_algebroid: structure field arity mismatch");
  A.anchor_ = std::move(anchor);
  A.structure_ = std::move(structure);
  A.box_ = std::move(chart_box);
  A.kind_ = kind;
  A.fd_step_ = fd_step;

  const auto pts = halton_points(A.box_, 32);
  for (const auto& p : pts)
    for (std::size_t mu = 0; mu < rank; ++mu)
      for (std::size_t nu = 0; nu < rank; ++nu)
        for (std::size_t sig = 0; sig < rank; ++sig) {
          const double v = A.structure_[mu][nu][sig].eval(p) + A.structure_[nu][mu][sig].eval(p);
          if (std::fabs(v) > 1e-12)
            throw Error("make_algebroid: structure functions are not antisymmetric in the "
                        "upper index pair (violation " + std::to_string(v) + ")");
        }
  return A;
}

SectionValue constant_section(const AlgebroidChart& A, std::size_t mu) {
  if (mu >= A.rank()) throw Error("constant_section: index out of range");
  SectionValue X;
  for (std::size_t k = 0; k < A.rank(); ++k)
    X.coefficients.push_back(constant_field(k == mu ? 1.0 : 0.0, A.base_variables()));
  return X;
}

std::vector<double> anchor_apply(const AlgebroidChart& A, const SectionValue& X,
                                 std::span<const double> point) {
  if (X.coefficients.size() != A.rank()) throw Error("anchor_apply: section rank mismatch");
  std::vector<double> out(A.base_dim(), 0.0);
  for (std::size_t mu = 0; mu < A.rank(); ++mu) {
    const double xmu = X.coefficients[mu].eval(point);
    if (xmu == 0.0) continue;
    for (std::size_t i = 0; i < A.base_dim(); ++i)
      out[i] += xmu * A.anchor(mu, i).eval(point);
  }
  return out;
}

double anchor_derivative(const AlgebroidChart& A, const SectionValue& X, const ScalarField& g,
                         std::span<const double> point) {
  const auto v = anchor_apply(A, X, point);
  double out = 0.0;
  for (std::size_t i = 0; i < A.base_dim(); ++i) {
    if (v[i] == 0.0) continue;
    out += v[i] * partial(g, i, point, A.fd_step());
  }
  return out;
}

std::vector<double> bracket_sections(const AlgebroidChart& A, const SectionValue& X,
                                     const SectionValue& Y, std::span<const double> point) {
  if (X.coefficients.size() != A.rank() || Y.coefficients.size() != A.rank())
    throw Error("bracket_sections: section rank mismatch");
  const std::size_t r = A.rank();
  std::vector<double> xv(r), yv(r);
  for (std::size_t mu = 0; mu < r; ++mu) {
    xv[mu] = X.coefficients[mu].eval(point);
    yv[mu] = Y.coefficients[mu].eval(point);
  }
  std::vector<double> out(r, 0.0);
  for (std::size_t sig = 0; sig < r; ++sig) {
    double acc = 0.0;
    for (std::size_t mu = 0; mu < r; ++mu) {
      if (xv[mu] == 0.0) continue;
      for (std::size_t nu = 0; nu < r; ++nu) {
        if (yv[nu] == 0.0) continue;
        acc += xv[mu] * yv[nu] * A.structure(mu, nu, sig).eval(point);
      }
    }
    acc += anchor_derivative(A, X, Y.coefficients[sig], point);
    acc -= anchor_derivative(A, Y, X.coefficients[sig], point);
    out[sig] = acc;
  }
  return out;
}

CheckReport check_axioms(const AlgebroidChart& A,
                         std::span<const std::vector<double>> sample_points, double tol) {
  CheckReport report;
  report.name = "check_axioms";
  const std::size_t n = A.base_dim(), r = A.rank();
  const double h = A.fd_step();
  double jac_max = 0.0, anchor_max = 0.0;
  std::size_t skipped = 0;

  for (std::size_t k = 0; k < sample_points.size(); ++k) {
    const auto& p = sample_points[k];
    try {
      // cache rho, f, and their partials at p
      std::vector<std::vector<double>> rho(r, std::vector<double>(n));
      for (std::size_t mu = 0; mu < r; ++mu)
        for (std::size_t i = 0; i < n; ++i) rho[mu][i] = A.anchor(mu, i).eval(p);
      std::vector<double> f(r * r * r);
      auto F = [&](std::size_t a, std::size_t b, std::size_t c) -> double& {
        return f[(a * r + b) * r + c];
      };
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
          for (std::size_t c = 0; c < r; ++c) F(a, b, c) = A.structure(a, b, c).eval(p);
      std::vector<double> df(n * r * r * r);  // d_j f^{ab}_c
      auto dF = [&](std::size_t j, std::size_t a, std::size_t b, std::size_t c) -> double& {
        return df[((j * r + a) * r + b) * r + c];
      };
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t a = 0; a < r; ++a)
          for (std::size_t b = 0; b < r; ++b)
            for (std::size_t c = 0; c < r; ++c)
              dF(j, a, b, c) = partial(A.structure(a, b, c), j, p, h);
      std::vector<double> drho(n * r * n);  // d_j rho^{mu i}
      auto dR = [&](std::size_t j, std::size_t mu, std::size_t i) -> double& {
        return drho[(j * r + mu) * n + i];
      };
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t mu = 0; mu < r; ++mu)
          for (std::size_t i = 0; i < n; ++i) dR(j, mu, i) = partial(A.anchor(mu, i), j, p, h);

      // [[e^a, e^b], e^c]^tau = f^{ab}_s f^{sc}_tau - rho^{cj} d_j f^{ab}_tau
      auto double_bracket = [&](std::size_t a, std::size_t b, std::size_t c,
                                std::size_t tau) {
        double acc = 0.0;
        for (std::size_t s = 0; s < r; ++s) acc += F(a, b, s) * F(s, c, tau);
        for (std::size_t j = 0; j < n; ++j) acc -= rho[c][j] * dF(j, a, b, tau);
        return acc;
      };
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b)
          for (std::size_t c = 0; c < r; ++c)
            for (std::size_t tau = 0; tau < r; ++tau) {
              const double jac = double_bracket(a, b, c, tau) + double_bracket(b, c, a, tau) +
                                 double_bracket(c, a, b, tau);
              jac_max = std::max(jac_max, std::fabs(jac));
            }

      // rho_*[e^mu, e^nu]^i - [rho_* e^mu, rho_* e^nu]^i
      for (std::size_t mu = 0; mu < r; ++mu)
        for (std::size_t nu = 0; nu < r; ++nu)
          for (std::size_t i = 0; i < n; ++i) {
            double lhs = 0.0;
            for (std::size_t s = 0; s < r; ++s) lhs += F(mu, nu, s) * rho[s][i];
            double comm = 0.0;
            for (std::size_t j = 0; j < n; ++j)
              comm += rho[mu][j] * dR(j, nu, i) - rho[nu][j] * dR(j, mu, i);
            anchor_max = std::max(anchor_max, std::fabs(lhs - comm));
          }
    } catch (const EvalError& e) {
      ++skipped;
      report.note("sample point " + std::to_string(k) + " skipped: " + e.what());
    }
  }

  report.add("jacobi_max", jac_max, tol);
  report.add("anchor_morphism_max", anchor_max, tol);
  if (skipped > 0) report.note(std::to_string(skipped) + " of " +
                               std::to_string(sample_points.size()) + " points skipped");
  return report;
}

CheckReport check_axioms(const AlgebroidChart& A, double tol, std::size_t samples) {
  const auto pts = halton_points(A.chart_box(), samples);
  return check_axioms(A, pts, tol);
}

std::vector<double> algebroid_differential(const AlgebroidChart& A, const ScalarField& f,
                                           std::span<const double> point) {
  std::vector<double> out(A.rank(), 0.0);
  std::vector<double> grad(A.base_dim());
  for (std::size_t i = 0; i < A.base_dim(); ++i) grad[i] = partial(f, i, point, A.fd_step());
  for (std::size_t mu = 0; mu < A.rank(); ++mu)
    for (std::size_t i = 0; i < A.base_dim(); ++i)
      out[mu] += A.anchor(mu, i).eval(point) * grad[i];
  return out;
}

double algebroid_differential(const AlgebroidChart& A, const std::vector<ScalarField>& alpha,
                              const SectionValue& X, const SectionValue& Y,
                              std::span<const double> point) {
  if (alpha.size() != A.rank()) throw Error("algebroid_differential: 1-form rank mismatch");
  auto pairing_field = [&](const SectionValue& Z) {
    ScalarField acc = alpha[0] * Z.coefficients[0];
    for (std::size_t mu = 1; mu < A.rank(); ++mu)
      acc = acc + alpha[mu] * Z.coefficients[mu];
    return acc;
  };
  const ScalarField aY = pairing_field(Y);
  const ScalarField aX = pairing_field(X);
  const auto br = bracket_sections(A, X, Y, point);
  double pairing_bracket = 0.0;
  for (std::size_t mu = 0; mu < A.rank(); ++mu)
    pairing_bracket += alpha[mu].eval(point) * br[mu];
  return anchor_derivative(A, X, aY, point) - anchor_derivative(A, Y, aX, point) -
         pairing_bracket;
}

AlgebroidChart tangent_algebroid(std::size_t n, Box chart_box) {
  const auto vars = base_names(n);
  std::vector<std::vector<ScalarField>> anchor(n);
  for (std::size_t mu = 0; mu < n; ++mu)
    for (std::size_t i = 0; i < n; ++i)
      anchor[mu].push_back(constant_field(mu == i ? 1.0 : 0.0, vars));
  std::vector<std::vector<std::vector<ScalarField>>> structure(
      n, std::vector<std::vector<ScalarField>>(n));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        structure[a][b].push_back(constant_field(0.0, vars));
  return make_algebroid(n, n, std::move(anchor), std::move(structure), std::move(chart_box),
                        ChartKind::tangent);
}

AlgebroidChart lie_algebra(const std::vector<std::vector<std::vector<double>>>& constants,
                           Box base_box) {
  const std::size_t r = constants.size();
  if (base_box.dim() != 1) throw Error("lie_algebra: over-a-point encoding uses a 1-dim base");
  for (const auto& plane : constants) {
    if (plane.size() != r) throw Error("lie_algebra: constants must be r^3");
    for (const auto& row : plane)
      if (row.size() != r) throw Error("lie_algebra: constants must be r^3");
  }
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c)
        if (std::fabs(constants[a][b][c] + constants[b][a][c]) > 1e-12)
          throw Error("lie_algebra: constants are not antisymmetric");
  // Jacobi: f^{ab}_s f^{sc}_t + cyclic = 0
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c)
        for (std::size_t t = 0; t < r; ++t) {
          double acc = 0.0;
          for (std::size_t s = 0; s < r; ++s)
            acc += constants[a][b][s] * constants[s][c][t] +
                   constants[b][c][s] * constants[s][a][t] +
                   constants[c][a][s] * constants[s][b][t];
          if (std::fabs(acc) > 1e-12)
            throw Error("lie_algebra: constants violate the Jacobi identity");
        }

  const auto vars = base_names(1);
  std::vector<std::vector<ScalarField>> anchor(r);
  for (std::size_t mu = 0; mu < r; ++mu) anchor[mu].push_back(constant_field(0.0, vars));
  std::vector<std::vector<std::vector<ScalarField>>> structure(
      r, std::vector<std::vector<ScalarField>>(r));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c)
        structure[a][b].push_back(constant_field(constants[a][b][c], vars));
  return make_algebroid(1, r, std::move(anchor), std::move(structure), std::move(base_box),
                        ChartKind::lie_algebra);
}

AlgebroidChart zero_algebroid(std::size_t n, std::size_t r, Box chart_box) {
  const auto vars = base_names(n);
  std::vector<std::vector<ScalarField>> anchor(r);
  for (std::size_t mu = 0; mu < r; ++mu)
    for (std::size_t i = 0; i < n; ++i) anchor[mu].push_back(constant_field(0.0, vars));
  std::vector<std::vector<std::vector<ScalarField>>> structure(
      r, std::vector<std::vector<ScalarField>>(r));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c)
        structure[a][b].push_back(constant_field(0.0, vars));
  return make_algebroid(n, r, std::move(anchor), std::move(structure), std::move(chart_box),
                        ChartKind::zero);
}

}  // namespace algebrokit
