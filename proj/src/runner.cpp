#include "algebrokit/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

namespace algebrokit {

using nlohmann::json;

namespace {

json ledger_json(double fd_step) {
  ConventionLedger ledger;
  ledger.fd_step = fd_step;
  return json{{"twisted_jacobi_c", ledger.twisted_jacobi_c},
              {"fd_step", ledger.fd_step},
              {"orientation", ledger.orientation},
              {"product_integral", ledger.product_integral}};
}

json invariant_to_json(const GroupoidInvariant& inv) {
  json j;
  switch (inv.kind) {
    case InvariantKind::matrix: {
      j["variant"] = "matrix";
      json rows = json::array();
      for (std::size_t r = 0; r < inv.value.rows; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < inv.value.cols; ++c) row.push_back(inv.value(r, c));
        rows.push_back(row);
      }
      j["value"] = rows;
      break;
    }
    case InvariantKind::pair:
      j["variant"] = "pair";
      break;
    case InvariantKind::fiber_integral:
      j["variant"] = "fiber_integral";
      j["integral"] = inv.integral;
      break;
  }
  j["target"] = inv.target_base;
  j["source"] = inv.source_base;
  return j;
}

struct JobContext {
  ObjectStore& store;
  const JobDef& job;
  std::uint64_t seed;
  std::string out_dir;

  const json& params() const { return job.params; }

  std::string ref(const char* key) const {
    auto it = job.params.find(key);
    if (it == job.params.end())
      throw ConfigError("job '" + job.name + "': missing parameter '" + key + "'");
    return it->get<std::string>();
  }

  std::shared_ptr<const AlgebroidChart> algebroid(const char* key) const {
    const std::string name = ref(key);
    auto it = store.algebroids.find(name);
    if (it == store.algebroids.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not an algebroid chart");
    return it->second;
  }
  std::shared_ptr<const PoissonChart> poisson(const char* key) const {
    const std::string name = ref(key);
    auto it = store.poissons.find(name);
    if (it == store.poissons.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not a poisson chart");
    return it->second;
  }
  const AdaptedSubmanifold& submanifold(const char* key) const {
    const std::string name = ref(key);
    auto it = store.submanifolds.find(name);
    if (it == store.submanifolds.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not a submanifold");
    return it->second;
  }
  const APath& path(const char* key) const {
    const std::string name = ref(key);
    auto it = store.paths.find(name);
    if (it == store.paths.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not a path");
    return it->second;
  }
  const HomotopyDriver& driver(const char* key) const {
    const std::string name = ref(key);
    auto it = store.drivers.find(name);
    if (it == store.drivers.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not a driver");
    return it->second;
  }
  const ProfileDef& profile(const char* key) const {
    const std::string name = ref(key);
    auto it = store.profiles.find(name);
    if (it == store.profiles.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not an a_profile");
    return it->second;
  }
  std::shared_ptr<const MatrixRep> rep_or_null() const {
    if (!job.params.contains("rep")) return nullptr;
    const std::string name = job.params["rep"].get<std::string>();
    auto it = store.reps.find(name);
    if (it == store.reps.end())
      throw ConfigError("job '" + job.name + "': '" + name + "' is not a matrix_rep");
    return it->second;
  }

  double tol(double fallback) const { return job.params.value("tol", fallback); }
  std::size_t samples() const { return job.params.value("samples", kDefaultSampleCount); }

  void stash(const char* key, const APath& p) const {
    if (job.params.contains(key)) store.paths[job.params[key].get<std::string>()] = p;
  }
};

InvariantKind parse_variant(const std::string& v, const std::string& job_name) {
  if (v == "matrix") return InvariantKind::matrix;
  if (v == "pair") return InvariantKind::pair;
  if (v == "fiber_integral") return InvariantKind::fiber_integral;
  throw ConfigError("job '" + job_name + "': unknown variant '" + v + "'");
}

double default_invariance_tol(InvariantKind kind) {
  switch (kind) {
    case InvariantKind::matrix: return 1e-6;
    case InvariantKind::pair: return 0.0;
    case InvariantKind::fiber_integral: return 1e-9;
  }
  return 0.0;
}

// Componentwise agreement of two algebroid charts at Halton points.
std::pair<double, double> chart_agreement(const AlgebroidChart& got,
                                          const AlgebroidChart& want,
                                          std::size_t samples) {
  if (got.base_dim() != want.base_dim() || got.rank() != want.rank())
    throw Error("compare_to: chart shapes differ");
  const auto pts = halton_points(want.chart_box(), samples);
  double anchor_max = 0.0, structure_max = 0.0;
  for (const auto& p : pts) {
    for (std::size_t mu = 0; mu < got.rank(); ++mu)
      for (std::size_t i = 0; i < got.base_dim(); ++i)
        anchor_max = std::max(anchor_max, std::fabs(got.anchor(mu, i).eval(p) -
                                                    want.anchor(mu, i).eval(p)));
    for (std::size_t a = 0; a < got.rank(); ++a)
      for (std::size_t b = 0; b < got.rank(); ++b)
        for (std::size_t c = 0; c < got.rank(); ++c)
          structure_max = std::max(structure_max, std::fabs(got.structure(a, b, c).eval(p) -
                                                            want.structure(a, b, c).eval(p)));
  }
  return {anchor_max, structure_max};
}

CheckReport run_integrate(const JobContext& ctx) {
  auto chart = ctx.algebroid("algebroid");
  const auto x0 = ctx.params().at("x0").get<std::vector<double>>();
  const std::size_t N = ctx.params().value("N", std::size_t{1000});
  const auto& prof = ctx.profile("a_profile");
  if (prof.components.size() != chart->rank())
    throw ConfigError("job '" + ctx.job.name + "': a_profile rank mismatch");
  APath path = integrate_apath(chart, x0, prof.fn(), N);
  auto report = constraint_residual_report(path, ctx.tol(10.0 / double(N) / double(N)));
  ctx.stash("as", path);
  return report;
}

CheckReport run_homotopy_flow(const JobContext& ctx) {
  const auto& path = ctx.path("path");
  auto result = homotopy_flow(path, ctx.driver("driver"),
                              ctx.params().value("tol_in", 1e-5),
                              ctx.params().value("abort_threshold", 1e-2));
  ctx.stash("as", result.path);
  return result.report;
}

CheckReport run_full_foliation(const JobContext& ctx) {
  auto chart = ctx.algebroid("algebroid");
  const auto& driver = ctx.driver("driver");
  const std::size_t n = chart->base_dim(), r = chart->rank();
  const std::size_t N = ctx.params().value("N", std::size_t{200});

  // auto-vanishing: start at alpha = eta = 0 on an integrated path
  LiftedState state;
  if (ctx.params().contains("path")) {
    const auto& p = ctx.path("path");
    state.X = p.X;
    state.a = p.a;
  } else {
    const auto x0 = ctx.params().at("x0").get<std::vector<double>>();
    const auto& prof = ctx.profile("a_profile");
    APath p = integrate_apath(chart, x0, prof.fn(), N);
    state.X = p.X;
    state.a = p.a;
  }
  const std::size_t samples = state.X.size();
  state.alpha.assign(samples, std::vector<double>(r, 0.0));
  state.eta.assign(samples, std::vector<double>(n, 0.0));

  HomotopyDriver restricted = driver;
  restricted.beta = nullptr;  // auto-vanishing needs beta = 0
  auto lifted = full_lifted_flow(*chart, state, restricted, ctx.tol(1e-10));
  CheckReport report = lifted.report;
  report.name = "full_foliation_test";

  // field consistency against the Poisson-case foliation on dualize(A)
  const PoissonChart dual = dualize(*chart);
  std::mt19937_64 rng(ctx.seed);
  std::uniform_real_distribution<double> unit(-0.5, 0.5);
  const std::size_t Nc = 32;
  LiftedState rnd;
  rnd.X.assign(Nc + 1, std::vector<double>(n));
  rnd.alpha.assign(Nc + 1, std::vector<double>(r));
  rnd.eta.assign(Nc + 1, std::vector<double>(n));
  rnd.a.assign(Nc + 1, std::vector<double>(r));
  std::vector<std::vector<double>> beta(Nc + 1, std::vector<double>(n)),
      b(Nc + 1, std::vector<double>(r));
  const auto box = chart->chart_box();
  for (std::size_t k = 0; k <= Nc; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rg = box.ranges[i];
      rnd.X[k][i] = 0.5 * (rg[0] + rg[1]) + 0.5 * unit(rng) * (rg[1] - rg[0]);
      rnd.eta[k][i] = unit(rng);
      beta[k][i] = unit(rng);
    }
    for (std::size_t mu = 0; mu < r; ++mu) {
      rnd.alpha[k][mu] = unit(rng);
      rnd.a[k][mu] = unit(rng);
      b[k][mu] = unit(rng);
    }
  }
  const auto lifted_field = full_foliation_field(*chart, rnd, beta, b);
  std::vector<std::vector<double>> Xd(Nc + 1, std::vector<double>(n + r)),
      etad(Nc + 1, std::vector<double>(n + r)), Cd(Nc + 1, std::vector<double>(n + r));
  for (std::size_t k = 0; k <= Nc; ++k)
    for (std::size_t i = 0; i < n + r; ++i) {
      Xd[k][i] = i < n ? rnd.X[k][i] : rnd.alpha[k][i - n];
      etad[k][i] = i < n ? rnd.eta[k][i] : rnd.a[k][i - n];
      Cd[k][i] = i < n ? beta[k][i] : b[k][i - n];
    }
  const auto poisson_field = poisson_foliation_field(dual, Xd, etad, Cd);
  double mismatch = 0.0;
  for (std::size_t k = 0; k <= Nc; ++k)
    for (std::size_t i = 0; i < n + r; ++i) {
      const double lifted_dx = i < n ? lifted_field.dX[k][i] : lifted_field.dalpha[k][i - n];
      const double lifted_de = i < n ? lifted_field.deta[k][i] : lifted_field.da[k][i - n];
      mismatch = std::max(mismatch, std::fabs(lifted_dx - poisson_field.dX[k][i]));
      mismatch = std::max(mismatch, std::fabs(lifted_de - poisson_field.deta[k][i]));
    }
  report.add("field_consistency_max", mismatch,
             ctx.params().value("consistency_tol", 1e-8));
  return report;
}

CheckReport run_coiso_flow_identity(const JobContext& ctx) {
  auto chart = ctx.algebroid("algebroid");
  const auto& path = ctx.path("path");
  const auto& driver = ctx.driver("driver");
  const double tol = ctx.tol(1e-8);
  const std::size_t n = chart->base_dim(), r = chart->rank();

  auto dual = std::make_shared<const PoissonChart>(dualize(*chart));
  AdaptedSubmanifold S;
  S.ambient = dual;
  S.codim = r;

  const std::size_t samples = path.X.size();
  std::vector<std::vector<double>> X(samples, std::vector<double>(n + r, 0.0)),
      eta(samples, std::vector<double>(n + r, 0.0));
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < n; ++i) X[k][i] = path.X[k][i];
    for (std::size_t mu = 0; mu < r; ++mu) eta[k][n + mu] = path.a[k][mu];
  }
  auto coiso = coiso_restricted_flow(*dual, S, X, eta, driver);

  auto conormal = std::make_shared<const AlgebroidChart>(conormal_algebroid(*dual, S));
  APath on_conormal = path;
  on_conormal.chart = conormal;
  auto flowed = homotopy_flow(on_conormal, driver);

  double x_agree = 0.0, eta_agree = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t i = 0; i < n; ++i)
      x_agree = std::max(x_agree, std::fabs(coiso.X[k][i] - flowed.path.X[k][i]));
    for (std::size_t mu = 0; mu < r; ++mu)
      eta_agree = std::max(eta_agree, std::fabs(coiso.eta[k][n + mu] - flowed.path.a[k][mu]));
  }
  CheckReport report;
  report.name = "coiso_flow_identity";
  report.add("X_agreement_max", x_agree, tol);
  report.add("eta_agreement_max", eta_agree, tol);
  report.add("slice_X_transversal_max", coiso.report.value_of("slice_X_transversal_max"), tol);
  report.add("slice_eta_tangential_max", coiso.report.value_of("slice_eta_tangential_max"),
             tol);
  return report;
}

CheckReport run_job(const JobContext& ctx, json& payload) {
  const std::string& cmd = ctx.job.command;
  if (cmd == "check-algebroid") {
    return check_axioms(*ctx.algebroid("object"), ctx.tol(1e-7), ctx.samples());
  }
  if (cmd == "check-poisson") {
    return check_jacobi(*ctx.poisson("object"), ctx.tol(1e-7), ctx.samples());
  }
  if (cmd == "dualize") {
    auto A = ctx.algebroid("object");
    const double lo = ctx.params().value("alpha_lo", -1.0);
    const double hi = ctx.params().value("alpha_hi", 1.0);
    auto dual = std::make_shared<const PoissonChart>(dualize(*A, lo, hi));
    ctx.store.poissons[ctx.ref("as")] = dual;
    CheckReport report;
    report.name = "dualize";
    report.note("constructed poisson chart '" + ctx.ref("as") + "' of dimension " +
                std::to_string(dual->dim()));
    return report;
  }
  if (cmd == "cotangent-algebroid") {
    auto P = ctx.poisson("object");
    auto A = std::make_shared<const AlgebroidChart>(
        cotangent_algebroid(*P, ctx.params().value("precondition_tol", 1e-6)));
    ctx.store.algebroids[ctx.ref("as")] = A;
    CheckReport report;
    report.name = "cotangent_algebroid";
    report.note("constructed algebroid chart '" + ctx.ref("as") + "' of rank " +
                std::to_string(A->rank()));
    return report;
  }
  if (cmd == "check-coisotropic") {
    return check_coisotropic(*ctx.poisson("poisson"), ctx.submanifold("submanifold"),
                             ctx.tol(1e-7), ctx.samples());
  }
  if (cmd == "conormal") {
    auto P = ctx.poisson("poisson");
    const auto& S = ctx.submanifold("submanifold");
    auto N = std::make_shared<const AlgebroidChart>(
        conormal_algebroid(*P, S, ctx.params().value("precondition_tol", 1e-7)));
    ctx.store.algebroids[ctx.ref("as")] = N;
    CheckReport report;
    report.name = "conormal";
    if (ctx.params().contains("compare_to")) {
      auto want = ctx.algebroid("compare_to");
      const auto [anchor_max, structure_max] = chart_agreement(*N, *want, ctx.samples());
      const double tol = ctx.params().value("agreement_tol", 1e-10);
      report.add("anchor_agreement_max", anchor_max, tol);
      report.add("structure_agreement_max", structure_max, tol);
    }
    return report;
  }
  if (cmd == "conormal-lagrangian-twisted") {
    const auto& S = ctx.submanifold("submanifold");
    auto P = ctx.poisson("poisson");
    const auto pts =
        halton_points_on_slice(P->chart_box(), S.codim, ctx.params().value("samples", 16));
    return check_conormal_lagrangian_twisted(*P, S, pts, ctx.tol(1e-6),
                                             ctx.params().value("momenta", 8), ctx.seed);
  }
  if (cmd == "integrate-apath") return run_integrate(ctx);
  if (cmd == "homotopy-flow") return run_homotopy_flow(ctx);
  if (cmd == "full-foliation-test") return run_full_foliation(ctx);
  if (cmd == "coiso-flow-identity") return run_coiso_flow_identity(ctx);
  if (cmd == "groupoid-invariant") {
    const auto kind = parse_variant(ctx.params().at("variant").get<std::string>(),
                                    ctx.job.name);
    auto rep = ctx.rep_or_null();
    const auto inv = invariant_of(ctx.path("path"), kind, rep.get());
    payload = invariant_to_json(inv);
    CheckReport report;
    report.name = "groupoid_invariant";
    return report;
  }
  if (cmd == "axiom-suite") {
    const auto kind = parse_variant(ctx.params().at("variant").get<std::string>(),
                                    ctx.job.name);
    auto rep = ctx.rep_or_null();
    const auto names = ctx.params().at("elements").get<std::vector<std::string>>();
    if (names.size() != 3)
      throw ConfigError("job '" + ctx.job.name + "': axiom-suite needs exactly 3 elements");
    std::vector<GroupoidInvariant> elems;
    for (const auto& nm : names) {
      auto it = ctx.store.paths.find(nm);
      if (it == ctx.store.paths.end())
        throw ConfigError("job '" + ctx.job.name + "': '" + nm + "' is not a path");
      elems.push_back(invariant_of(it->second, kind, rep.get()));
    }
    return axiom_suite(elems[0], elems[1], elems[2],
                       ctx.params().value("matrix_tol", 1e-6));
  }
  if (cmd == "homotopy-invariance") {
    const auto kind = parse_variant(ctx.params().at("variant").get<std::string>(),
                                    ctx.job.name);
    auto rep = ctx.rep_or_null();
    const auto names = ctx.params().at("drivers").get<std::vector<std::string>>();
    std::vector<HomotopyDriver> drivers;
    for (const auto& nm : names) {
      auto it = ctx.store.drivers.find(nm);
      if (it == ctx.store.drivers.end())
        throw ConfigError("job '" + ctx.job.name + "': '" + nm + "' is not a driver");
      drivers.push_back(it->second);
    }
    return homotopy_invariance_harness(ctx.path("path"), drivers, kind, rep.get(),
                                       ctx.tol(default_invariance_tol(kind)));
  }
  if (cmd == "dump-path") {
    const auto& path = ctx.path("path");
    std::string file = ctx.params().at("file").get<std::string>();
    if (!ctx.out_dir.empty())
      file = (std::filesystem::path(ctx.out_dir) / file).string();
    dump_path(path, file);
    CheckReport report;
    report.name = "dump_path";
    report.note("wrote " + file);
    return report;
  }
  throw ConfigError("unknown command '" + cmd + "'");
}

}  // namespace

json report_to_json(const CheckReport& report) {
  json residuals = json::array();
  for (const auto& r : report.residuals)
    residuals.push_back(json{{"name", r.name}, {"value", r.value}, {"tol", r.tol},
                             {"pass", r.passed()}});
  return json{{"check", report.name},
              {"verdict", report.passed() ? "pass" : "fail"},
              {"residuals", residuals},
              {"notes", report.notes}};
}

RunOutcome run_config(const LoadedConfig& config, const RunOptions& options) {
  RunOutcome outcome;
  const std::uint64_t seed = options.seed_override.value_or(config.seed);

  if (!options.out_dir.empty()) std::filesystem::create_directories(options.out_dir);

  ObjectStore store = config.objects;
  bool any_fail = false, any_error = false;
  json summary_jobs = json::array();

  for (const auto& job : config.jobs) {
    if (!options.jobs_filter.empty() &&
        job.name.find(options.jobs_filter) == std::string::npos)
      continue;

    const std::uint64_t job_seed = fnv1a64(job.name, fnv1a64(std::to_string(seed)));
    JobContext ctx{store, job, job_seed, options.out_dir};

    json report_json;
    const auto start = std::chrono::steady_clock::now();
    try {
      json payload;
      CheckReport report = run_job(ctx, payload);
      report_json = report_to_json(report);
      if (!payload.is_null()) report_json["payload"] = payload;
      if (!report.passed()) any_fail = true;
    } catch (const ConfigError& e) {
      report_json = json{{"check", job.command}, {"verdict", "error"}, {"error", e.what()}};
      any_error = true;
    } catch (const Error& e) {
      report_json = json{{"check", job.command}, {"verdict", "error"}, {"error", e.what()}};
      any_error = true;
    }
    const auto stop = std::chrono::steady_clock::now();
    report_json["job"] = job.name;
    report_json["command"] = job.command;
    report_json["seed"] = job_seed;
    report_json["convention_ledger"] = ledger_json(kDefaultFdStep);
    report_json["timing_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count();

    summary_jobs.push_back(json{{"job", job.name}, {"verdict", report_json["verdict"]}});
    if (!options.out_dir.empty()) {
      std::ofstream out(std::filesystem::path(options.out_dir) / (job.name + ".json"));
      out << report_json.dump(2) << "\n";
    }
    outcome.reports.push_back(std::move(report_json));
  }

  outcome.exit_code = any_error ? 3 : any_fail ? 1 : 0;
  outcome.summary = json{{"config", config.source_path},
                         {"seed", seed},
                         {"jobs", summary_jobs},
                         {"exit_code", outcome.exit_code},
                         {"verdict", outcome.exit_code == 0 ? "pass" : "fail"}};
  if (!options.out_dir.empty()) {
    std::ofstream out(std::filesystem::path(options.out_dir) / "summary.json");
    out << outcome.summary.dump(2) << "\n";
  }
  return outcome;
}

RunOutcome run_config_file(const std::string& path, const RunOptions& options) {
  return run_config(load_config_file(path), options);
}

}  // namespace algebrokit
