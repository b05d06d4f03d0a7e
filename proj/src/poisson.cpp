#include "algebrokit/poisson.hpp"

#include <cmath>
#include <memory>

namespace algebrokit {

namespace {

std::vector<std::string> coord_names(std::size_t m) {
  std::vector<std::string> v(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = "x" + std::to_string(i + 1);
  return v;
}

}  // namespace

const ScalarField& PoissonChart::bivector(std::size_t i, std::size_t j) const {
  return bivector_.at(i).at(j);
}

const ScalarField& PoissonChart::twist(std::size_t i, std::size_t j, std::size_t k) const {
  return twist_.at(i).at(j).at(k);
}

PoissonChart make_poisson(std::vector<std::vector<ScalarField>> bivector,
                          std::vector<std::vector<std::vector<ScalarField>>> twist, Box box,
                          std::vector<std::string> variables, double fd_step) {
  const std::size_t m = bivector.size();
  if (m == 0) throw Error("make_poisson: empty bivector");
  for (const auto& row : bivector)
    if (row.size() != m) throw Error("make_poisson: bivector must be m x m");
  if (box.dim() != m) throw Error("make_poisson: chart_box dimension mismatch");
  if (!twist.empty()) {
    if (twist.size() != m) throw Error("make_poisson: twist must be m^3");
    for (const auto& plane : twist) {
      if (plane.size() != m) throw Error("make_poisson: twist must be m^3");
      for (const auto& row : plane)
        if (row.size() != m) throw Error("make_poisson: twist must be m^3");
    }
  }

  PoissonChart P;
  P.m_ = m;
  P.vars_ = variables.empty() ? coord_names(m) : std::move(variables);
  if (P.vars_.size() != m) throw Error("make_poisson: variable list length mismatch");
  P.bivector_ = std::move(bivector);
  P.twist_ = std::move(twist);
  P.box_ = std::move(box);
  P.fd_step_ = fd_step;

  const auto pts = halton_points(P.box_, 32);
  for (const auto& p : pts) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        const double v = P.bivector_[i][j].eval(p) + P.bivector_[j][i].eval(p);
        if (std::fabs(v) > 1e-12)
          throw Error("make_poisson: bivector is not antisymmetric (violation " +
                      std::to_string(v) + ")");
      }
    if (P.twisted()) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t k = 0; k < m; ++k) {
            const double pij = P.twist_[i][j][k].eval(p);
            if (std::fabs(pij + P.twist_[j][i][k].eval(p)) > 1e-12 ||
                std::fabs(pij + P.twist_[i][k][j].eval(p)) > 1e-12)
              throw Error("make_poisson: twist is not fully antisymmetric");
          }
    }
  }
  if (P.twisted()) {
    // closedness: d phi components d_{[l} phi_{ijk]} at sample points
    double worst = 0.0;
    for (const auto& p : pts)
      for (std::size_t l = 0; l < m; ++l)
        for (std::size_t i = l + 1; i < m; ++i)
          for (std::size_t j = i + 1; j < m; ++j)
            for (std::size_t k = j + 1; k < m; ++k) {
              const double v = partial(P.twist_[i][j][k], l, p, fd_step) -
                               partial(P.twist_[l][j][k], i, p, fd_step) +
                               partial(P.twist_[l][i][k], j, p, fd_step) -
                               partial(P.twist_[l][i][j], k, p, fd_step);
              worst = std::max(worst, std::fabs(v));
            }
    if (worst > 1e-7)
      throw Error("make_poisson: twist 3-form is not closed (d phi residual " +
                  std::to_string(worst) + ")");
  }
  return P;
}

double poisson_bracket(const PoissonChart& P, const ScalarField& f, const ScalarField& g,
                       std::span<const double> point) {
  const std::size_t m = P.dim();
  if (f.arity() != m || g.arity() != m)
    throw Error("poisson_bracket: field arity does not match chart dimension");
  std::vector<double> df(m), dg(m);
  for (std::size_t i = 0; i < m; ++i) {
    df[i] = partial(f, i, point, P.fd_step());
    dg[i] = partial(g, i, point, P.fd_step());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (df[i] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (dg[j] == 0.0) continue;
      acc += P.bivector(i, j).eval(point) * df[i] * dg[j];
    }
  }
  return acc;
}

ScalarField poisson_bracket_field(const PoissonChart& P, const ScalarField& f,
                                  const ScalarField& g) {
  auto chart = std::make_shared<const PoissonChart>(P);
  auto ff = f, gg = g;
  return derived_field("{" + f.source() + ", " + g.source() + "}", P.variables(),
                       [chart, ff, gg](std::span<const double> p) {
                         return poisson_bracket(*chart, ff, gg, p);
                       });
}

CheckReport check_jacobi(const PoissonChart& P,
                         std::span<const std::vector<double>> sample_points, double tol) {
  CheckReport report;
  report.name = "check_jacobi";
  const std::size_t m = P.dim();
  const double h = P.fd_step();
  double worst = 0.0;
  std::size_t skipped = 0;

  for (std::size_t kpt = 0; kpt < sample_points.size(); ++kpt) {
    const auto& p = sample_points[kpt];
    try {
      std::vector<std::vector<double>> pi(m, std::vector<double>(m));
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) pi[i][j] = P.bivector(i, j).eval(p);
      std::vector<double> dpi(m * m * m);  // d_l pi^{jk}
      auto D = [&](std::size_t l, std::size_t j, std::size_t k) -> double& {
        return dpi[(l * m + j) * m + k];
      };
      for (std::size_t l = 0; l < m; ++l)
        for (std::size_t j = 0; j < m; ++j)
          for (std::size_t k = 0; k < m; ++k) D(l, j, k) = partial(P.bivector(j, k), l, p, h);

      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
          for (std::size_t k = j + 1; k < m; ++k) {
            double jac = 0.0;
            for (std::size_t l = 0; l < m; ++l)
              jac += pi[i][l] * D(l, j, k) + pi[j][l] * D(l, k, i) + pi[k][l] * D(l, i, j);
            if (P.twisted()) {
              double contraction = 0.0;
              for (std::size_t a = 0; a < m; ++a)
                for (std::size_t b = 0; b < m; ++b)
                  for (std::size_t c = 0; c < m; ++c) {
                    const double w = pi[i][a] * pi[j][b] * pi[k][c];
                    if (w == 0.0) continue;
                    contraction += w * P.twist(a, b, c).eval(p);
                  }
              jac -= kTwistedJacobiC * contraction;
            }
            worst = std::max(worst, std::fabs(jac));
          }
    } catch (const EvalError& e) {
      ++skipped;
      report.note("sample point " + std::to_string(kpt) + " skipped: " + e.what());
    }
  }
  report.add(P.twisted() ? "twisted_jacobi_max" : "jacobi_max", worst, tol);
  if (skipped > 0)
    report.note(std::to_string(skipped) + " of " + std::to_string(sample_points.size()) +
                " points skipped");
  return report;
}

CheckReport check_jacobi(const PoissonChart& P, double tol, std::size_t samples) {
  const auto pts = halton_points(P.chart_box(), samples);
  return check_jacobi(P, pts, tol);
}

PoissonChart dualize(const AlgebroidChart& A, double alpha_lo, double alpha_hi) {
  const std::size_t n = A.base_dim(), r = A.rank(), m = n + r;
  std::vector<std::string> vars = A.base_variables();
  for (std::size_t mu = 0; mu < r; ++mu) vars.push_back("al" + std::to_string(mu + 1));

  std::vector<std::size_t> embed(n);
  for (std::size_t i = 0; i < n; ++i) embed[i] = i;
  auto lift = [&](const ScalarField& f) { return remap_variables(f, vars, embed); };

  std::vector<std::vector<ScalarField>> pi(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) pi[i].push_back(constant_field(0.0, vars));
  for (std::size_t mu = 0; mu < r; ++mu)
    for (std::size_t i = 0; i < n; ++i) {
      pi[n + mu][i] = lift(A.anchor(mu, i));
      pi[i][n + mu] = (-1.0) * lift(A.anchor(mu, i));
    }
  for (std::size_t mu = 0; mu < r; ++mu)
    for (std::size_t nu = 0; nu < r; ++nu) {
      ScalarField acc = coordinate_field(n, vars) * lift(A.structure(mu, nu, 0));
      for (std::size_t sig = 1; sig < r; ++sig)
        acc = acc + coordinate_field(n + sig, vars) * lift(A.structure(mu, nu, sig));
      pi[n + mu][n + nu] = acc;
    }

  Box box = product_box(A.chart_box(), unit_box(r, alpha_lo, alpha_hi));
  return make_poisson(std::move(pi), {}, std::move(box), std::move(vars), A.fd_step());
}

AlgebroidChart cotangent_algebroid(const PoissonChart& P, double precondition_tol) {
  const std::size_t m = P.dim();
  if (P.twisted()) {
    auto pre = check_jacobi(P, precondition_tol);
    if (!pre.passed())
      throw Error("cotangent_algebroid: twisted Jacobi identity fails (residual " +
                  std::to_string(pre.max_value()) + ")");
  }

  auto chart = std::make_shared<const PoissonChart>(P);
  std::vector<std::vector<ScalarField>> anchor(m);
  for (std::size_t rr = 0; rr < m; ++rr)
    for (std::size_t i = 0; i < m; ++i) anchor[rr].push_back(P.bivector(rr, i));

  std::vector<std::vector<std::vector<ScalarField>>> structure(
      m, std::vector<std::vector<ScalarField>>(m));
  const double h = P.fd_step();
  for (std::size_t rr = 0; rr < m; ++rr)
    for (std::size_t ss = 0; ss < m; ++ss)
      for (std::size_t k = 0; k < m; ++k) {
        std::string label = "d" + P.variables()[k] + " pi(" + std::to_string(rr + 1) + "," +
                            std::to_string(ss + 1) + ")";
        if (P.twisted()) label += " + twist";
        structure[rr][ss].push_back(derived_field(
            label, P.variables(), [chart, rr, ss, k, h](std::span<const double> x) {
              double v = partial(chart->bivector(rr, ss), k, x, h);
              if (chart->twisted()) {
                const std::size_t mm = chart->dim();
                for (std::size_t a = 0; a < mm; ++a) {
                  const double pra = chart->bivector(rr, a).eval(x);
                  if (pra == 0.0) continue;
                  for (std::size_t b = 0; b < mm; ++b) {
                    const double psb = chart->bivector(ss, b).eval(x);
                    if (psb == 0.0) continue;
                    v += pra * psb * chart->twist(a, b, k).eval(x);
                  }
                }
              }
              return v;
            }));
      }
  return make_algebroid(m, m, std::move(anchor), std::move(structure), P.chart_box(),
                        ChartKind::generic, P.fd_step());
}

std::vector<double> twisted_koszul_bracket(const PoissonChart& P, const ScalarField& f,
                                           const ScalarField& g,
                                           std::span<const double> point) {
  const std::size_t m = P.dim();
  const ScalarField fg = poisson_bracket_field(P, f, g);
  std::vector<double> out(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = partial(fg, k, point, P.fd_step());
  if (P.twisted()) {
    std::vector<double> df(m), dg(m);
    for (std::size_t i = 0; i < m; ++i) {
      df[i] = partial(f, i, point, P.fd_step());
      dg[i] = partial(g, i, point, P.fd_step());
    }
    // (pi# df)^a = df_r pi^{ra}
    std::vector<double> hf(m, 0.0), hg(m, 0.0);
    for (std::size_t rr = 0; rr < m; ++rr) {
      if (df[rr] == 0.0 && dg[rr] == 0.0) continue;
      for (std::size_t a = 0; a < m; ++a) {
        const double pra = P.bivector(rr, a).eval(point);
        hf[a] += df[rr] * pra;
        hg[a] += dg[rr] * pra;
      }
    }
    for (std::size_t k = 0; k < m; ++k) {
      double corr = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        if (hf[a] == 0.0) continue;
        for (std::size_t b = 0; b < m; ++b) {
          if (hg[b] == 0.0) continue;
          corr += hf[a] * hg[b] * P.twist(a, b, k).eval(point);
        }
      }
      out[k] += corr;
    }
  }
  return out;
}

Mat twisted_cotangent_form(const PoissonChart& P, const CotangentPoint& point) {
  const std::size_t m = P.dim();
  if (point.base.size() != m || point.momentum.size() != m)
    throw Error("twisted_cotangent_form: point dimension mismatch");
  Mat w(2 * m, 2 * m);
  for (std::size_t i = 0; i < m; ++i) {
    w(i, m + i) = -1.0;  // omega = dp_i ^ dx^i
    w(m + i, i) = 1.0;
  }
  if (P.twisted()) {
    const auto& x = point.base;
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t l = 0; l < m; ++l) {
        double corr = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          if (point.momentum[i] == 0.0) continue;
          for (std::size_t j = 0; j < m; ++j) {
            const double pij = P.bivector(i, j).eval(x);
            if (pij == 0.0) continue;
            corr += point.momentum[i] * pij * P.twist(j, k, l).eval(x);
          }
        }
        w(k, l) += corr;
      }
  }
  return w;
}

double pathspace_twist_form(const PoissonChart& P, const PathGrid& path,
                            const PathVariation& v1, const PathVariation& v2) {
  const std::size_t m = P.dim();
  const std::size_t samples = path.X.size();
  if (samples < 2) throw Error("pathspace_twist_form: need at least two grid samples");
  if (path.eta.size() != samples || v1.xi.size() != samples || v1.e.size() != samples ||
      v2.xi.size() != samples || v2.e.size() != samples)
    throw Error("pathspace_twist_form: grid mismatch");

  std::vector<double> integrand(samples, 0.0);
  for (std::size_t t = 0; t < samples; ++t) {
    if (path.X[t].size() != m || path.eta[t].size() != m || v1.xi[t].size() != m ||
        v1.e[t].size() != m || v2.xi[t].size() != m || v2.e[t].size() != m)
      throw Error("pathspace_twist_form: component dimension mismatch");
    double val = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      val += v1.e[t][i] * v2.xi[t][i] - v2.e[t][i] * v1.xi[t][i];
    if (P.twisted()) {
      const auto& x = path.X[t];
      std::vector<double> hash(m, 0.0);  // (pi# eta)^a = eta_j pi^{ja}
      for (std::size_t j = 0; j < m; ++j) {
        if (path.eta[t][j] == 0.0) continue;
        for (std::size_t a = 0; a < m; ++a)
          hash[a] += path.eta[t][j] * P.bivector(j, a).eval(x);
      }
      double tw = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        if (hash[a] == 0.0) continue;
        for (std::size_t b = 0; b < m; ++b) {
          if (v1.xi[t][b] == 0.0) continue;
          for (std::size_t c = 0; c < m; ++c) {
            if (v2.xi[t][c] == 0.0) continue;
            tw += hash[a] * v1.xi[t][b] * v2.xi[t][c] * P.twist(a, b, c).eval(x);
          }
        }
      }
      val += 0.5 * tw;
    }
    integrand[t] = val;
  }
  const double dt = 1.0 / static_cast<double>(samples - 1);
  double acc = 0.5 * (integrand.front() + integrand.back());
  for (std::size_t t = 1; t + 1 < samples; ++t) acc += integrand[t];
  return acc * dt;
}

}  // namespace algebrokit
