#include "algebrokit/apath.hpp"

#include <cmath>

namespace algebrokit {

namespace {

// First derivative on a uniform grid.  Interior points use 4th-order central
// stencils (offset 5-point at k = 1 and k = N-1).  Edges use either the
// one-sided 2nd-order form (constraint measurement, per the report contract)
// or the one-sided 4th-order form (driver data inside flows).
enum class EdgeOrder { second, fourth };

double grid_derivative(std::span<const double> f, std::size_t k, double h, EdgeOrder edge) {
  const std::size_t N = f.size() - 1;
  if (N < 4) throw Error("grid derivative: need at least 5 samples");
  if (k >= 2 && k + 2 <= N)
    return (f[k - 2] - 8 * f[k - 1] + 8 * f[k + 1] - f[k + 2]) / (12 * h);
  if (k == 1)
    return (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  if (k + 1 == N)
    return (3 * f[N] + 10 * f[N - 1] - 18 * f[N - 2] + 6 * f[N - 3] - f[N - 4]) / (12 * h);
  if (k == 0)
    return edge == EdgeOrder::second
               ? (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
               : (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  return edge == EdgeOrder::second
             ? (3 * f[N] - 4 * f[N - 1] + f[N - 2]) / (2 * h)
             : (25 * f[N] - 48 * f[N - 1] + 36 * f[N - 2] - 16 * f[N - 3] + 3 * f[N - 4]) /
                   (12 * h);
}

// Derivative of one component across the whole grid of row vectors.
std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t j) {
  std::vector<double> out(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) out[k] = rows[k][j];
  return out;
}

void check_grid(const APath& path) {
  if (!path.chart) throw Error("APath: missing chart");
  if (path.X.size() < 5) throw Error("APath: need at least 5 grid samples");
  if (path.a.size() != path.X.size()) throw Error("APath: X and a grids differ");
  for (const auto& row : path.X)
    if (row.size() != path.chart->base_dim()) throw Error("APath: X row dimension mismatch");
  for (const auto& row : path.a)
    if (row.size() != path.chart->rank()) throw Error("APath: a row dimension mismatch");
}

}  // namespace

double HomotopyDriver::profile_factor(double t) const {
  switch (profile) {
    case Profile::none: return 1.0;
    case Profile::quadratic: return t * (1.0 - t);
    case Profile::quartic: {
      const double u = t * (1.0 - t);
      return u * u;
    }
    case Profile::sin_squared: {
      const double s = std::sin(M_PI * t);
      return s * s;
    }
  }
  return 1.0;
}

void HomotopyDriver::eval_b(double t, double s, std::span<double> out) const {
  if (!b) throw Error("HomotopyDriver: b components not set");
  b(t, s, out);
  const double w = profile_factor(t);
  for (double& v : out) v *= w;
  if (t == 0.0 || t == 1.0)
    for (double& v : out) v = 0.0;
}

void HomotopyDriver::eval_beta(double t, double s, std::span<double> out) const {
  if (!beta) {
    for (double& v : out) v = 0.0;
    return;
  }
  beta(t, s, out);
  const double w = profile_factor(t);
  for (double& v : out) v *= w;
  if (t == 0.0 || t == 1.0)
    for (double& v : out) v = 0.0;
}

double constraint_residual(const APath& path) {
  check_grid(path);
  const auto& A = *path.chart;
  const std::size_t N = path.segments(), n = A.base_dim(), r = A.rank();
  const double h = path.dt();
  double worst = 0.0;
  std::vector<std::vector<double>> cols(n);
  for (std::size_t i = 0; i < n; ++i) cols[i] = column(path.X, i);
  for (std::size_t k = 1; k < N; ++k) {
    const auto& x = path.X[k];
    for (std::size_t i = 0; i < n; ++i) {
      double rhs = 0.0;
      for (std::size_t mu = 0; mu < r; ++mu) {
        const double amu = path.a[k][mu];
        if (amu == 0.0) continue;
        rhs += A.anchor(mu, i).eval(x) * amu;
      }
      const double lhs = grid_derivative(cols[i], k, h, EdgeOrder::second);
      worst = std::max(worst, std::fabs(lhs - rhs));
    }
  }
  return worst;
}

CheckReport constraint_residual_report(const APath& path, double tol) {
  CheckReport report;
  report.name = "constraint_residual";
  report.add("interior_max", constraint_residual(path), tol);
  const auto& A = *path.chart;
  const std::size_t N = path.segments(), n = A.base_dim(), r = A.rank();
  const double h = path.dt();
  double endpoint = 0.0;
  for (std::size_t k : {std::size_t{0}, N}) {
    const auto& x = path.X[k];
    for (std::size_t i = 0; i < n; ++i) {
      double rhs = 0.0;
      for (std::size_t mu = 0; mu < r; ++mu)
        rhs += A.anchor(mu, i).eval(x) * path.a[k][mu];
      const auto col = column(path.X, i);
      endpoint = std::max(endpoint,
                          std::fabs(grid_derivative(col, k, h, EdgeOrder::second) - rhs));
    }
  }
  report.add("endpoint_one_sided", endpoint, 1e300);  // diagnostic only
  return report;
}

APath integrate_apath(std::shared_ptr<const AlgebroidChart> chart,
                      std::span<const double> X0, const AProfile& a_profile, std::size_t N) {
  if (!chart) throw Error("integrate_apath: missing chart");
  if (N < 5) throw Error("integrate_apath: N must be at least 5");
  const std::size_t n = chart->base_dim(), r = chart->rank();
  if (X0.size() != n) throw Error("integrate_apath: X0 dimension mismatch");
  if (!chart->chart_box().contains(X0)) throw Error("integrate_apath: X0 outside chart_box");

  const double h = 1.0 / static_cast<double>(N);
  APath path;
  path.chart = chart;
  path.X.assign(N + 1, std::vector<double>(n, 0.0));
  path.a.assign(N + 1, std::vector<double>(r, 0.0));
  path.X[0].assign(X0.begin(), X0.end());

  std::vector<double> av(r);
  auto field = [&](double t, const std::vector<double>& x, std::vector<double>& out) {
    a_profile(t, av);
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = 0.0;
      for (std::size_t mu = 0; mu < r; ++mu) {
        if (av[mu] == 0.0) continue;
        out[i] += chart->anchor(mu, i).eval(x) * av[mu];
      }
    }
  };

  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t k = 0; k < N; ++k) {
    const double t = k * h;
    const auto& x = path.X[k];
    field(t, x, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    field(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    field(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
    field(t + h, tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      path.X[k + 1][i] = x[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (!chart->chart_box().contains(path.X[k + 1]))
      throw Error("integrate_apath: trajectory exits chart_box at t = " +
                  std::to_string((k + 1) * h));
  }
  for (std::size_t k = 0; k <= N; ++k) {
    a_profile(k * h, av);
    path.a[k] = av;
  }
  return path;
}

namespace {

struct PathState {
  std::vector<std::vector<double>> X, a;
};

// Evaluates the restricted foliation field at driver time s.
void restricted_field(const AlgebroidChart& A, const PathState& st,
                      const HomotopyDriver& driver, double s, PathState& out) {
  const std::size_t N = st.X.size() - 1, n = A.base_dim(), r = A.rank();
  const double h = 1.0 / static_cast<double>(N);
  std::vector<std::vector<double>> b(N + 1, std::vector<double>(r));
  for (std::size_t k = 0; k <= N; ++k) driver.eval_b(k * h, s, b[k]);

  out.X.assign(N + 1, std::vector<double>(n, 0.0));
  out.a.assign(N + 1, std::vector<double>(r, 0.0));

  std::vector<std::vector<double>> db(r);
  for (std::size_t mu = 0; mu < r; ++mu) {
    const auto col = column(b, mu);
    db[mu].resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k)
      db[mu][k] = grid_derivative(col, k, h, EdgeOrder::fourth);
  }

  for (std::size_t k = 0; k <= N; ++k) {
    const auto& x = st.X[k];
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t mu = 0; mu < r; ++mu) {
        if (b[k][mu] == 0.0) continue;
        acc -= A.anchor(mu, i).eval(x) * b[k][mu];
      }
      out.X[k][i] = acc;
    }
    for (std::size_t mu = 0; mu < r; ++mu) {
      double acc = -db[mu][k];
      for (std::size_t nu = 0; nu < r; ++nu) {
        const double anu = st.a[k][nu];
        if (anu == 0.0) continue;
        for (std::size_t sig = 0; sig < r; ++sig) {
          if (b[k][sig] == 0.0) continue;
          acc -= A.structure(nu, sig, mu).eval(x) * anu * b[k][sig];
        }
      }
      out.a[k][mu] = acc;
    }
  }
}

void axpy(PathState& y, double c, const PathState& x) {
  for (std::size_t k = 0; k < y.X.size(); ++k) {
    for (std::size_t i = 0; i < y.X[k].size(); ++i) y.X[k][i] += c * x.X[k][i];
    for (std::size_t i = 0; i < y.a[k].size(); ++i) y.a[k][i] += c * x.a[k][i];
  }
}

}  // namespace

FlowResult homotopy_flow(const APath& path, const HomotopyDriver& driver, double tol_in,
                         double abort_threshold) {
  check_grid(path);
  const auto& A = *path.chart;
  const double res_in = constraint_residual(path);
  if (res_in > tol_in)
    throw Error("homotopy_flow: input constraint residual " + std::to_string(res_in) +
                " exceeds tolerance");
  if (driver.s_steps == 0) throw Error("homotopy_flow: driver needs s_steps > 0");

  PathState st{path.X, path.a};
  const double ds = driver.s_length / static_cast<double>(driver.s_steps);
  PathState f1, f2, f3, f4, tmp;
  for (std::size_t step = 0; step < driver.s_steps; ++step) {
    const double s = step * ds;
    restricted_field(A, st, driver, s, f1);
    tmp = st;
    axpy(tmp, 0.5 * ds, f1);
    restricted_field(A, tmp, driver, s + 0.5 * ds, f2);
    tmp = st;
    axpy(tmp, 0.5 * ds, f2);
    restricted_field(A, tmp, driver, s + 0.5 * ds, f3);
    tmp = st;
    axpy(tmp, ds, f3);
    restricted_field(A, tmp, driver, s + ds, f4);
    axpy(st, ds / 6.0, f1);
    axpy(st, ds / 3.0, f2);
    axpy(st, ds / 3.0, f3);
    axpy(st, ds / 6.0, f4);
    for (const auto& x : st.X)
      if (!A.chart_box().contains(x, 1e-9))
        throw Error("homotopy_flow: trajectory exits chart_box at s = " +
                    std::to_string(s + ds));
  }

  FlowResult result;
  result.path.chart = path.chart;
  result.path.X = std::move(st.X);
  result.path.a = std::move(st.a);

  const double res_out = constraint_residual(result.path);
  if (res_out > abort_threshold)
    throw Error("homotopy_flow: constraint drift " + std::to_string(res_out) +
                " exceeds abort threshold");
  double endpoint_drift = 0.0;
  for (std::size_t i = 0; i < A.base_dim(); ++i) {
    endpoint_drift = std::max(endpoint_drift,
                              std::fabs(result.path.X.front()[i] - path.X.front()[i]));
    endpoint_drift = std::max(endpoint_drift,
                              std::fabs(result.path.X.back()[i] - path.X.back()[i]));
  }
  result.report.name = "homotopy_flow";
  result.report.add("residual_before", res_in, tol_in);
  result.report.add("residual_after", res_out, abort_threshold);
  result.report.add("endpoint_drift", endpoint_drift, 0.0);
  return result;
}

FoliationField full_foliation_field(const AlgebroidChart& A, const LiftedState& state,
                                    const std::vector<std::vector<double>>& beta_samples,
                                    const std::vector<std::vector<double>>& b_samples) {
  const std::size_t N = state.X.size() - 1, n = A.base_dim(), r = A.rank();
  if (state.alpha.size() != N + 1 || state.eta.size() != N + 1 || state.a.size() != N + 1 ||
      beta_samples.size() != N + 1 || b_samples.size() != N + 1)
    throw Error("full_foliation_field: arrays must share one grid");
  const double h = 1.0 / static_cast<double>(N);
  const double fd = A.fd_step();

  FoliationField out;
  out.dX.assign(N + 1, std::vector<double>(n, 0.0));
  out.dalpha.assign(N + 1, std::vector<double>(r, 0.0));
  out.deta.assign(N + 1, std::vector<double>(n, 0.0));
  out.da.assign(N + 1, std::vector<double>(r, 0.0));

  std::vector<std::vector<double>> dbeta(n), db(r);
  for (std::size_t i = 0; i < n; ++i) {
    const auto col = column(beta_samples, i);
    dbeta[i].resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k)
      dbeta[i][k] = grid_derivative(col, k, h, EdgeOrder::fourth);
  }
  for (std::size_t mu = 0; mu < r; ++mu) {
    const auto col = column(b_samples, mu);
    db[mu].resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k)
      db[mu][k] = grid_derivative(col, k, h, EdgeOrder::fourth);
  }

  for (std::size_t k = 0; k <= N; ++k) {
    const auto& x = state.X[k];
    const auto& al = state.alpha[k];
    const auto& et = state.eta[k];
    const auto& av = state.a[k];
    const auto& bv = b_samples[k];
    const auto& betav = beta_samples[k];

    std::vector<std::vector<double>> rho(r, std::vector<double>(n));
    for (std::size_t mu = 0; mu < r; ++mu)
      for (std::size_t i = 0; i < n; ++i) rho[mu][i] = A.anchor(mu, i).eval(x);

    // dX^i = -rho^{mu i} b_mu
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t mu = 0; mu < r; ++mu) acc -= rho[mu][i] * bv[mu];
      out.dX[k][i] = acc;
    }
    // dalpha^mu = rho^{mu i} beta_i + alpha^sig f^{mu nu}_sig b_nu
    for (std::size_t mu = 0; mu < r; ++mu) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += rho[mu][i] * betav[i];
      for (std::size_t sig = 0; sig < r; ++sig) {
        if (al[sig] == 0.0) continue;
        for (std::size_t nu = 0; nu < r; ++nu) {
          if (bv[nu] == 0.0) continue;
          acc += al[sig] * A.structure(mu, nu, sig).eval(x) * bv[nu];
        }
      }
      out.dalpha[k][mu] = acc;
    }
    // deta_i = -dbeta_i - alpha^sig d_i f^{mu nu}_sig a_mu b_nu
    //          - d_i rho^{mu j} (a_mu beta_j - eta_j b_mu)
    for (std::size_t i = 0; i < n; ++i) {
      double acc = -dbeta[i][k];
      for (std::size_t sig = 0; sig < r; ++sig) {
        if (al[sig] == 0.0) continue;
        for (std::size_t mu = 0; mu < r; ++mu) {
          if (av[mu] == 0.0) continue;
          for (std::size_t nu = 0; nu < r; ++nu) {
            if (bv[nu] == 0.0) continue;
            acc -= al[sig] * partial(A.structure(mu, nu, sig), i, x, fd) * av[mu] * bv[nu];
          }
        }
      }
      for (std::size_t mu = 0; mu < r; ++mu)
        for (std::size_t j = 0; j < n; ++j) {
          const double w = av[mu] * betav[j] - et[j] * bv[mu];
          if (w == 0.0) continue;
          acc -= partial(A.anchor(mu, j), i, x, fd) * w;
        }
      out.deta[k][i] = acc;
    }
    // da_mu = -db_mu - f^{nu sig}_mu a_nu b_sig
    for (std::size_t mu = 0; mu < r; ++mu) {
      double acc = -db[mu][k];
      for (std::size_t nu = 0; nu < r; ++nu) {
        if (av[nu] == 0.0) continue;
        for (std::size_t sig = 0; sig < r; ++sig) {
          if (bv[sig] == 0.0) continue;
          acc -= A.structure(nu, sig, mu).eval(x) * av[nu] * bv[sig];
        }
      }
      out.da[k][mu] = acc;
    }
  }
  return out;
}

namespace {

void lifted_axpy(LiftedState& y, double c, const FoliationField& f) {
  for (std::size_t k = 0; k < y.X.size(); ++k) {
    for (std::size_t i = 0; i < y.X[k].size(); ++i) y.X[k][i] += c * f.dX[k][i];
    for (std::size_t i = 0; i < y.alpha[k].size(); ++i) y.alpha[k][i] += c * f.dalpha[k][i];
    for (std::size_t i = 0; i < y.eta[k].size(); ++i) y.eta[k][i] += c * f.deta[k][i];
    for (std::size_t i = 0; i < y.a[k].size(); ++i) y.a[k][i] += c * f.da[k][i];
  }
}

double max_abs(const std::vector<std::vector<double>>& rows) {
  double m = 0.0;
  for (const auto& row : rows)
    for (double v : row) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

LiftedFlowResult full_lifted_flow(const AlgebroidChart& A, const LiftedState& initial,
                                  const HomotopyDriver& driver, double tol) {
  const std::size_t N = initial.X.size() - 1, n = A.base_dim(), r = A.rank();
  const double h = 1.0 / static_cast<double>(N);
  const double ds = driver.s_length / static_cast<double>(driver.s_steps);

  auto sample_driver = [&](double s, std::vector<std::vector<double>>& beta,
                           std::vector<std::vector<double>>& b) {
    beta.assign(N + 1, std::vector<double>(n, 0.0));
    b.assign(N + 1, std::vector<double>(r, 0.0));
    for (std::size_t k = 0; k <= N; ++k) {
      driver.eval_beta(k * h, s, beta[k]);
      driver.eval_b(k * h, s, b[k]);
    }
  };

  LiftedState st = initial;
  double alpha_max = max_abs(st.alpha), eta_max = max_abs(st.eta);
  std::vector<std::vector<double>> beta, b;
  for (std::size_t step = 0; step < driver.s_steps; ++step) {
    const double s = step * ds;
    sample_driver(s, beta, b);
    const auto f1 = full_foliation_field(A, st, beta, b);
    LiftedState tmp = st;
    lifted_axpy(tmp, 0.5 * ds, f1);
    sample_driver(s + 0.5 * ds, beta, b);
    const auto f2 = full_foliation_field(A, tmp, beta, b);
    tmp = st;
    lifted_axpy(tmp, 0.5 * ds, f2);
    const auto f3 = full_foliation_field(A, tmp, beta, b);
    tmp = st;
    lifted_axpy(tmp, ds, f3);
    sample_driver(s + ds, beta, b);
    const auto f4 = full_foliation_field(A, tmp, beta, b);
    lifted_axpy(st, ds / 6.0, f1);
    lifted_axpy(st, ds / 3.0, f2);
    lifted_axpy(st, ds / 3.0, f3);
    lifted_axpy(st, ds / 6.0, f4);
    alpha_max = std::max(alpha_max, max_abs(st.alpha));
    eta_max = std::max(eta_max, max_abs(st.eta));
  }

  LiftedFlowResult out;
  out.state = std::move(st);
  out.report.name = "full_lifted_flow";
  out.report.add("alpha_max", alpha_max, tol);
  out.report.add("eta_max", eta_max, tol);
  return out;
}

PoissonFoliationField poisson_foliation_field(const PoissonChart& P,
                                              const std::vector<std::vector<double>>& X,
                                              const std::vector<std::vector<double>>& eta,
                                              const std::vector<std::vector<double>>& C) {
  const std::size_t m = P.dim();
  const std::size_t samples = X.size();
  if (eta.size() != samples || C.size() != samples)
    throw Error("poisson_foliation_field: arrays must share one grid");
  if (samples < 5) throw Error("poisson_foliation_field: need at least 5 samples");
  const std::size_t N = samples - 1;
  const double h = 1.0 / static_cast<double>(N);
  const double fd = P.fd_step();

  PoissonFoliationField out;
  out.dX.assign(samples, std::vector<double>(m, 0.0));
  out.deta.assign(samples, std::vector<double>(m, 0.0));

  std::vector<std::vector<double>> dC(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto col = column(C, i);
    dC[i].resize(samples);
    for (std::size_t k = 0; k <= N; ++k)
      dC[i][k] = grid_derivative(col, k, h, EdgeOrder::fourth);
  }

  for (std::size_t k = 0; k <= N; ++k) {
    const auto& x = X[k];
    std::vector<std::vector<double>> pi(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) pi[i][j] = P.bivector(i, j).eval(x);

    // dX^I = -C_J pi^{JI}
    for (std::size_t I = 0; I < m; ++I) {
      double acc = 0.0;
      for (std::size_t J = 0; J < m; ++J) {
        if (C[k][J] == 0.0) continue;
        acc -= C[k][J] * pi[J][I];
      }
      out.dX[k][I] = acc;
    }
    // deta_I = -dC_I - d_I pi^{RS} eta_R C_S
    for (std::size_t I = 0; I < m; ++I) {
      double acc = -dC[I][k];
      for (std::size_t R = 0; R < m; ++R) {
        if (eta[k][R] == 0.0) continue;
        for (std::size_t S = 0; S < m; ++S) {
          if (C[k][S] == 0.0) continue;
          acc -= partial(P.bivector(R, S), I, x, fd) * eta[k][R] * C[k][S];
        }
      }
      out.deta[k][I] = acc;
    }
  }
  return out;
}

CheckReport membership_L(const std::vector<std::vector<double>>& X,
                         const std::vector<std::vector<double>>& eta,
                         const AdaptedSubmanifold& S, std::size_t ambient_dim, double tol) {
  const std::size_t m = ambient_dim, k = S.codim, tang = m - k;
  CheckReport report;
  report.name = "membership_L";
  double x_trans = 0.0, eta_tang = 0.0;
  for (std::size_t t = 0; t < X.size(); ++t) {
    if (X[t].size() != m || eta[t].size() != m)
      throw Error("membership_L: sample dimension mismatch");
    for (std::size_t mu = tang; mu < m; ++mu)
      x_trans = std::max(x_trans, std::fabs(X[t][mu]));
    for (std::size_t i = 0; i < tang; ++i)
      eta_tang = std::max(eta_tang, std::fabs(eta[t][i]));
  }
  report.add("X_transversal_max", x_trans, tol);
  report.add("eta_tangential_max", eta_tang, tol);
  return report;
}

CotangentFlowResult coiso_restricted_flow(const PoissonChart& P, const AdaptedSubmanifold& S,
                                          const std::vector<std::vector<double>>& X,
                                          const std::vector<std::vector<double>>& eta,
                                          const HomotopyDriver& driver,
                                          double membership_tol) {
  const std::size_t m = P.dim(), k = S.codim, tang = m - k;
  const auto member = membership_L(X, eta, S, m, membership_tol);
  if (!member.passed())
    throw Error("coiso_restricted_flow: path is not in L(C) (residual " +
                std::to_string(member.max_value()) + ")");

  const std::size_t N = X.size() - 1;
  const double h = 1.0 / static_cast<double>(N);
  const double ds = driver.s_length / static_cast<double>(driver.s_steps);

  // Driver has conormal support: tangential components are identically zero.
  auto sample_driver = [&](double s, std::vector<std::vector<double>>& C) {
    C.assign(N + 1, std::vector<double>(m, 0.0));
    std::vector<double> bv(k);
    for (std::size_t t = 0; t <= N; ++t) {
      driver.eval_b(t * h, s, bv);
      for (std::size_t mu = 0; mu < k; ++mu) C[t][tang + mu] = bv[mu];
    }
  };

  std::vector<std::vector<double>> Xs = X, etas = eta;
  std::vector<std::vector<double>> C;
  auto axpy2 = [](std::vector<std::vector<double>>& y, double c,
                  const std::vector<std::vector<double>>& f) {
    for (std::size_t t = 0; t < y.size(); ++t)
      for (std::size_t i = 0; i < y[t].size(); ++i) y[t][i] += c * f[t][i];
  };

  for (std::size_t step = 0; step < driver.s_steps; ++step) {
    const double s = step * ds;
    sample_driver(s, C);
    const auto f1 = poisson_foliation_field(P, Xs, etas, C);
    auto Xt = Xs, Et = etas;
    axpy2(Xt, 0.5 * ds, f1.dX);
    axpy2(Et, 0.5 * ds, f1.deta);
    sample_driver(s + 0.5 * ds, C);
    const auto f2 = poisson_foliation_field(P, Xt, Et, C);
    Xt = Xs;
    Et = etas;
    axpy2(Xt, 0.5 * ds, f2.dX);
    axpy2(Et, 0.5 * ds, f2.deta);
    const auto f3 = poisson_foliation_field(P, Xt, Et, C);
    Xt = Xs;
    Et = etas;
    axpy2(Xt, ds, f3.dX);
    axpy2(Et, ds, f3.deta);
    sample_driver(s + ds, C);
    const auto f4 = poisson_foliation_field(P, Xt, Et, C);
    axpy2(Xs, ds / 6.0, f1.dX);
    axpy2(Xs, ds / 3.0, f2.dX);
    axpy2(Xs, ds / 3.0, f3.dX);
    axpy2(Xs, ds / 6.0, f4.dX);
    axpy2(etas, ds / 6.0, f1.deta);
    axpy2(etas, ds / 3.0, f2.deta);
    axpy2(etas, ds / 3.0, f3.deta);
    axpy2(etas, ds / 6.0, f4.deta);
  }

  CotangentFlowResult out;
  out.X = std::move(Xs);
  out.eta = std::move(etas);
  const auto member_out = membership_L(out.X, out.eta, S, m, membership_tol);
  out.report.name = "coiso_restricted_flow";
  out.report.add("slice_X_transversal_max", member_out.value_of("X_transversal_max"),
                 membership_tol);
  out.report.add("slice_eta_tangential_max", member_out.value_of("eta_tangential_max"),
                 membership_tol);
  return out;
}

APath concat(const APath& p1, const APath& p2) {
  check_grid(p1);
  check_grid(p2);
  if (p1.chart->base_dim() != p2.chart->base_dim() || p1.chart->rank() != p2.chart->rank())
    throw Error("concat: chart shapes differ");
  if (p1.segments() != p2.segments())
    throw Error("concat: paths must share a common grid size");
  const std::size_t n = p1.chart->base_dim();
  for (std::size_t i = 0; i < n; ++i)
    if (std::fabs(p1.X.back()[i] - p2.X.front()[i]) > 1e-9)
      throw Error("concat: paths are not composable (endpoint mismatch in component " +
                  std::to_string(i + 1) + ")");

  const std::size_t N = p1.segments();
  APath out;
  out.chart = p1.chart;
  out.X.reserve(2 * N + 1);
  out.a.reserve(2 * N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    out.X.push_back(p1.X[k]);
    auto row = p1.a[k];
    for (double& v : row) v *= 2.0;
    out.a.push_back(std::move(row));
  }
  for (std::size_t k = 1; k <= N; ++k) {
    out.X.push_back(p2.X[k]);
    auto row = p2.a[k];
    for (double& v : row) v *= 2.0;
    out.a.push_back(std::move(row));
  }
  return out;
}

APath invert(const APath& p) {
  check_grid(p);
  const std::size_t N = p.segments();
  APath out;
  out.chart = p.chart;
  out.X.resize(N + 1);
  out.a.resize(N + 1);
  for (std::size_t k = 0; k <= N; ++k) {
    out.X[k] = p.X[N - k];
    out.a[k] = p.a[N - k];
    for (double& v : out.a[k]) v = -v;
  }
  return out;
}

}  // namespace algebrokit
