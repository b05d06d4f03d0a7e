#include "algebrokit/groupoid.hpp"

#include <cmath>

namespace algebrokit {

namespace {

double vec_max_diff(std::span<const double> x, std::span<const double> y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::fabs(x[i] - y[i]));
  return m;
}

// 4th-order midpoint interpolation of grid samples at k + 1/2.
double midpoint4(std::span<const double> f, std::size_t k) {
  const std::size_t N = f.size() - 1;
  if (k >= 1 && k + 2 <= N)
    return (-f[k - 1] + 9 * f[k] + 9 * f[k + 1] - f[k + 2]) / 16.0;
  if (k == 0) return (5 * f[0] + 15 * f[1] - 5 * f[2] + f[3]) / 16.0;
  return (5 * f[N] + 15 * f[N - 1] - 5 * f[N - 2] + f[N - 3]) / 16.0;  // k == N-1
}

}  // namespace

MatrixRep make_matrix_rep(const AlgebroidChart& A, std::size_t dim, std::vector<Mat> images,
                          double compat_tol) {
  if (A.kind() != ChartKind::lie_algebra)
    throw Error("make_matrix_rep: chart is not a Lie algebra over a point");
  const std::size_t r = A.rank();
  if (images.size() != r) throw Error("make_matrix_rep: need one image per basis element");
  for (const auto& M : images)
    if (M.rows != dim || M.cols != dim) throw Error("make_matrix_rep: image shape mismatch");

  const auto p = A.chart_box().center();
  for (std::size_t mu = 0; mu < r; ++mu)
    for (std::size_t nu = 0; nu < r; ++nu) {
      Mat comm = images[mu] * images[nu] - images[nu] * images[mu];
      for (std::size_t sig = 0; sig < r; ++sig)
        comm = comm - images[sig].scaled(A.structure(mu, nu, sig).eval(p));
      if (comm.max_abs() > compat_tol)
        throw Error("make_matrix_rep: commutators do not match the structure constants "
                    "(residual " + std::to_string(comm.max_abs()) + ")");
    }
  MatrixRep rep;
  rep.dim = dim;
  rep.images = std::move(images);
  return rep;
}

Mat product_integral(const MatrixRep& rep, const APath& path) {
  if (!path.chart || path.chart->kind() != ChartKind::lie_algebra)
    throw Error("product_integral: path must live over a Lie algebra chart");
  const std::size_t r = path.chart->rank();
  if (rep.images.size() != r) throw Error("product_integral: representation rank mismatch");

  const std::size_t N = path.segments();
  const double h = path.dt();
  const std::size_t d = rep.dim;

  // half-step coefficients by 4th-order interpolation
  std::vector<std::vector<double>> a_half(N, std::vector<double>(r));
  for (std::size_t mu = 0; mu < r; ++mu) {
    std::vector<double> col(N + 1);
    for (std::size_t k = 0; k <= N; ++k) col[k] = path.a[k][mu];
    for (std::size_t k = 0; k < N; ++k) a_half[k][mu] = midpoint4(col, k);
  }

  auto M_of = [&](std::span<const double> av) {
    Mat M(d, d);
    for (std::size_t mu = 0; mu < r; ++mu) {
      if (av[mu] == 0.0) continue;
      for (std::size_t i = 0; i < d * d; ++i) M.a[i] += av[mu] * rep.images[mu].a[i];
    }
    return M;
  };

  Mat U = Mat::identity(d);
  for (std::size_t k = 0; k < N; ++k) {
    const Mat M0 = M_of(path.a[k]);
    const Mat Mh = M_of(a_half[k]);
    const Mat M1 = M_of(path.a[k + 1]);
    const Mat K1 = M0 * U;
    const Mat K2 = Mh * (U + K1.scaled(0.5 * h));
    const Mat K3 = Mh * (U + K2.scaled(0.5 * h));
    const Mat K4 = M1 * (U + K3.scaled(h));
    U = U + (K1 + K2.scaled(2.0) + K3.scaled(2.0) + K4).scaled(h / 6.0);
  }
  return U;
}

GroupoidInvariant pair_invariant(const APath& path, double constraint_tol) {
  if (!path.chart || path.chart->kind() != ChartKind::tangent)
    throw Error("pair_invariant: path must live over a tangent algebroid chart");
  const double res = constraint_residual(path);
  if (res > constraint_tol)
    throw Error("pair_invariant: constraint residual " + std::to_string(res) +
                " exceeds tolerance");
  GroupoidInvariant inv;
  inv.kind = InvariantKind::pair;
  inv.target_base = path.X.front();
  inv.source_base = path.X.back();
  return inv;
}

GroupoidInvariant fiber_integral_invariant(const APath& path, double constancy_tol) {
  if (!path.chart || path.chart->kind() != ChartKind::zero)
    throw Error("fiber_integral_invariant: path must live over a zero algebroid chart");
  const std::size_t N = path.segments();
  double drift = 0.0;
  for (std::size_t k = 0; k <= N; ++k)
    drift = std::max(drift, vec_max_diff(path.X[k], path.X[0]));
  if (drift > constancy_tol)
    throw Error("fiber_integral_invariant: base curve is not constant (drift " +
                std::to_string(drift) + ")");

  const std::size_t r = path.chart->rank();
  const double h = path.dt();
  GroupoidInvariant inv;
  inv.kind = InvariantKind::fiber_integral;
  inv.target_base = path.X.front();
  inv.source_base = path.X.back();
  inv.integral.assign(r, 0.0);
  for (std::size_t mu = 0; mu < r; ++mu) {
    double acc = 0.5 * (path.a[0][mu] + path.a[N][mu]);
    for (std::size_t k = 1; k < N; ++k) acc += path.a[k][mu];
    inv.integral[mu] = acc * h;
  }
  return inv;
}

GroupoidInvariant matrix_invariant(const MatrixRep& rep, const APath& path) {
  GroupoidInvariant inv;
  inv.kind = InvariantKind::matrix;
  inv.target_base = path.X.front();
  inv.source_base = path.X.back();
  inv.value = product_integral(rep, path);
  return inv;
}

GroupoidInvariant invariant_of(const APath& path, InvariantKind kind, const MatrixRep* rep) {
  switch (kind) {
    case InvariantKind::matrix:
      if (!rep) throw Error("invariant_of: matrix variant needs a representation");
      return matrix_invariant(*rep, path);
    case InvariantKind::pair:
      return pair_invariant(path);
    case InvariantKind::fiber_integral:
      return fiber_integral_invariant(path);
  }
  throw Error("invariant_of: unknown variant");
}

GroupoidInvariant compose(const GroupoidInvariant& u, const GroupoidInvariant& v,
                          double composability_tol) {
  if (u.kind != v.kind) throw Error("compose: mixed invariant variants");
  if (vec_max_diff(u.source_base, v.target_base) > composability_tol)
    throw Error("compose: elements are not composable (s(u) != t(v))");
  GroupoidInvariant out;
  out.kind = u.kind;
  out.target_base = u.target_base;
  out.source_base = v.source_base;
  switch (u.kind) {
    case InvariantKind::matrix:
      out.value = v.value * u.value;  // u runs first in time
      break;
    case InvariantKind::pair:
      break;
    case InvariantKind::fiber_integral:
      out.integral.resize(u.integral.size());
      for (std::size_t i = 0; i < u.integral.size(); ++i)
        out.integral[i] = u.integral[i] + v.integral[i];
      break;
  }
  return out;
}

GroupoidInvariant unit_at(const GroupoidInvariant& like, const std::vector<double>& base) {
  GroupoidInvariant out;
  out.kind = like.kind;
  out.target_base = base;
  out.source_base = base;
  switch (like.kind) {
    case InvariantKind::matrix:
      out.value = Mat::identity(like.value.rows);
      break;
    case InvariantKind::pair:
      break;
    case InvariantKind::fiber_integral:
      out.integral.assign(like.integral.size(), 0.0);
      break;
  }
  return out;
}

GroupoidInvariant inverse_of(const GroupoidInvariant& u) {
  GroupoidInvariant out;
  out.kind = u.kind;
  out.target_base = u.source_base;
  out.source_base = u.target_base;
  switch (u.kind) {
    case InvariantKind::matrix:
      out.value = inverse(u.value);
      break;
    case InvariantKind::pair:
      break;
    case InvariantKind::fiber_integral:
      out.integral = u.integral;
      for (double& v : out.integral) v = -v;
      break;
  }
  return out;
}

namespace {

double invariant_diff(const GroupoidInvariant& x, const GroupoidInvariant& y) {
  double m = std::max(vec_max_diff(x.target_base, y.target_base),
                      vec_max_diff(x.source_base, y.source_base));
  if (x.kind == InvariantKind::matrix) m = std::max(m, max_abs_diff(x.value, y.value));
  if (x.kind == InvariantKind::fiber_integral)
    m = std::max(m, vec_max_diff(x.integral, y.integral));
  return m;
}

}  // namespace

CheckReport axiom_suite(const GroupoidInvariant& u, const GroupoidInvariant& v,
                        const GroupoidInvariant& w, double matrix_tol) {
  CheckReport report;
  report.name = "axiom_suite";
  const double tol = u.kind == InvariantKind::matrix ? matrix_tol
                     : u.kind == InvariantKind::fiber_integral ? 1e-12
                                                               : 0.0;

  const auto uv = compose(u, v);
  const auto vw = compose(v, w);
  report.add("source_of_product", vec_max_diff(uv.source_base, v.source_base), tol);
  report.add("target_of_product", vec_max_diff(uv.target_base, u.target_base), tol);
  report.add("left_unit", invariant_diff(compose(unit_at(v, v.target_base), v), v), tol);
  report.add("right_unit", invariant_diff(compose(u, unit_at(u, u.source_base)), u), tol);
  report.add("associativity", invariant_diff(compose(uv, w), compose(u, vw)), tol);
  const auto ui = inverse_of(u);
  report.add("inverse_swaps_source_target",
             std::max(vec_max_diff(ui.source_base, u.target_base),
                      vec_max_diff(ui.target_base, u.source_base)),
             tol);
  report.add("right_inverse", invariant_diff(compose(u, ui), unit_at(u, u.target_base)), tol);
  report.add("left_inverse", invariant_diff(compose(ui, u), unit_at(u, u.source_base)), tol);
  return report;
}

CheckReport homotopy_invariance_harness(const APath& path,
                                        std::span<const HomotopyDriver> drivers,
                                        InvariantKind kind, const MatrixRep* rep,
                                        double tol) {
  CheckReport report;
  report.name = "homotopy_invariance";
  const auto before = invariant_of(path, kind, rep);
  for (std::size_t d = 0; d < drivers.size(); ++d) {
    const auto flowed = homotopy_flow(path, drivers[d]);
    const auto after = invariant_of(flowed.path, kind, rep);
    report.add("driver_" + std::to_string(d + 1) + "_deviation",
               invariant_diff(before, after), tol);
  }
  return report;
}

}  // namespace algebrokit
