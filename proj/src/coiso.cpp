#include "algebrokit/coiso.hpp"

#include <cmath>
#include <random>

namespace algebrokit {

namespace {

void validate(const PoissonChart& P, const AdaptedSubmanifold& S) {
  if (S.codim == 0 || S.codim > P.dim())
    throw Error("adapted submanifold: codim must satisfy 0 < k <= m");
  if (S.ambient && S.ambient->dim() != P.dim())
    throw Error("adapted submanifold: ambient chart dimension mismatch");
}

void require_on_slice(const PoissonChart& P, const AdaptedSubmanifold& S,
                      std::span<const std::vector<double>> pts) {
  const std::size_t m = P.dim(), tang = m - S.codim;
  for (const auto& p : pts) {
    if (p.size() != m) throw Error("sample point dimension mismatch");
    for (std::size_t mu = tang; mu < m; ++mu)
      if (p[mu] != 0.0)
        throw Error("sample point is off C: transversal coordinate " +
                    P.variables()[mu] + " = " + std::to_string(p[mu]));
  }
}

}  // namespace

CheckReport check_coisotropic(const PoissonChart& P, const AdaptedSubmanifold& S,
                              std::span<const std::vector<double>> points_on_C, double tol) {
  validate(P, S);
  require_on_slice(P, S, points_on_C);
  CheckReport report;
  report.name = "check_coisotropic";
  const std::size_t m = P.dim(), tang = m - S.codim;

  double bivector_max = 0.0, horiz_max = 0.0;
  std::size_t skipped = 0;
  for (std::size_t kpt = 0; kpt < points_on_C.size(); ++kpt) {
    const auto& p = points_on_C[kpt];
    try {
      for (std::size_t mu = tang; mu < m; ++mu)
        for (std::size_t nu = mu + 1; nu < m; ++nu)
          bivector_max = std::max(bivector_max, std::fabs(P.bivector(mu, nu).eval(p)));
      if (P.twisted()) {
        for (std::size_t mu = tang; mu < m; ++mu)
          for (std::size_t i = 0; i < tang; ++i)
            for (std::size_t j = i + 1; j < tang; ++j) {
              double acc = 0.0;
              for (std::size_t l = 0; l < m; ++l)
                acc += P.bivector(mu, l).eval(p) * P.twist(l, i, j).eval(p);
              horiz_max = std::max(horiz_max, std::fabs(acc));
            }
      }
    } catch (const EvalError& e) {
      ++skipped;
      report.note("sample point " + std::to_string(kpt) + " skipped: " + e.what());
    }
  }
  report.add("bivector_transversal_max", bivector_max, tol);
  if (P.twisted()) report.add("horizontality_max", horiz_max, tol);
  if (skipped > 0) report.note(std::to_string(skipped) + " points skipped");
  return report;
}

CheckReport check_coisotropic(const PoissonChart& P, const AdaptedSubmanifold& S, double tol,
                              std::size_t samples) {
  const auto pts = halton_points_on_slice(P.chart_box(), S.codim, samples);
  return check_coisotropic(P, S, pts, tol);
}

AlgebroidChart conormal_algebroid(const PoissonChart& P, const AdaptedSubmanifold& S,
                                  double precondition_tol) {
  validate(P, S);
  auto pre = check_coisotropic(P, S, precondition_tol);
  if (!pre.passed())
    throw Error("conormal_algebroid: C is not coisotropic (residual " +
                std::to_string(pre.max_value()) + ")");

  const std::size_t m = P.dim(), k = S.codim, tang = m - k;
  auto chart = std::make_shared<const PoissonChart>(P);
  const double h = P.fd_step();

  std::vector<std::vector<ScalarField>> anchor(k);
  for (std::size_t mu = 0; mu < k; ++mu)
    for (std::size_t i = 0; i < tang; ++i)
      anchor[mu].push_back(restrict_tail(P.bivector(tang + mu, i), tang));

  std::vector<std::vector<std::vector<ScalarField>>> structure(
      k, std::vector<std::vector<ScalarField>>(k));
  for (std::size_t mu = 0; mu < k; ++mu)
    for (std::size_t nu = 0; nu < k; ++nu)
      for (std::size_t lam = 0; lam < k; ++lam) {
        std::string label = "d" + P.variables()[tang + lam] + " pi(" +
                            std::to_string(tang + mu + 1) + "," +
                            std::to_string(tang + nu + 1) + ") |C";
        if (P.twisted()) label += " + twist";
        structure[mu][nu].push_back(derived_field(
            label, std::vector<std::string>(P.variables().begin(), P.variables().begin() + tang),
            [chart, mu, nu, lam, tang, m, h](std::span<const double> b) {
              std::vector<double> x(m, 0.0);
              for (std::size_t i = 0; i < tang; ++i) x[i] = b[i];
              double v = partial(chart->bivector(tang + mu, tang + nu), tang + lam, x, h);
              if (chart->twisted()) {
                for (std::size_t a = 0; a < m; ++a) {
                  const double pa = chart->bivector(tang + mu, a).eval(x);
                  if (pa == 0.0) continue;
                  for (std::size_t bb = 0; bb < m; ++bb) {
                    const double pb = chart->bivector(tang + nu, bb).eval(x);
                    if (pb == 0.0) continue;
                    v += pa * pb * chart->twist(a, bb, tang + lam).eval(x);
                  }
                }
              }
              return v;
            }));
      }

  return make_algebroid(tang, k, std::move(anchor), std::move(structure),
                        head_box(P.chart_box(), tang), ChartKind::generic, P.fd_step());
}

CheckReport check_conormal_lagrangian_twisted(const PoissonChart& P,
                                              const AdaptedSubmanifold& S,
                                              std::span<const std::vector<double>> points_on_C,
                                              double tol, std::size_t momenta_per_point,
                                              std::uint64_t seed) {
  validate(P, S);
  if (!P.twisted()) throw Error("check_conormal_lagrangian_twisted: chart has no twist");
  require_on_slice(P, S, points_on_C);

  const std::size_t m = P.dim(), k = S.codim, tang = m - k;
  CheckReport report;
  report.name = "check_conormal_lagrangian_twisted";

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double lagrangian_max = 0.0;
  for (const auto& x : points_on_C) {
    for (std::size_t draw = 0; draw < momenta_per_point; ++draw) {
      CotangentPoint pt;
      pt.base = x;
      pt.momentum.assign(m, 0.0);
      double norm = 0.0;
      for (std::size_t mu = tang; mu < m; ++mu) {
        pt.momentum[mu] = gauss(rng);
        norm += pt.momentum[mu] * pt.momentum[mu];
      }
      norm = std::sqrt(norm);
      if (norm == 0.0) continue;
      for (std::size_t mu = tang; mu < m; ++mu) pt.momentum[mu] /= norm;

      const Mat w = twisted_cotangent_form(P, pt);
      // T(N*C) basis: tangential d/dx^i and transversal d/dp_mu
      std::vector<std::size_t> basis;
      for (std::size_t i = 0; i < tang; ++i) basis.push_back(i);
      for (std::size_t mu = tang; mu < m; ++mu) basis.push_back(m + mu);
      for (std::size_t a : basis)
        for (std::size_t b : basis)
          lagrangian_max = std::max(lagrangian_max, std::fabs(w(a, b)));
    }
  }
  report.add("lagrangian_max", lagrangian_max, tol);

  const auto coiso = check_coisotropic(P, S, points_on_C, tol);
  const double horiz = coiso.value_of("horizontality_max");
  report.add("horizontality_max", horiz, tol);

  const bool lag_ok = lagrangian_max <= tol, horiz_ok = horiz <= tol;
  report.add("verdict_mismatch", lag_ok == horiz_ok ? 0.0 : 1.0, 0.5);
  report.note(std::string("Lagrangian: ") + (lag_ok ? "yes" : "no") +
              ", horizontal: " + (horiz_ok ? "yes" : "no"));
  return report;
}

}  // namespace algebrokit
