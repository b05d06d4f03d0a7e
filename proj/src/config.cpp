#include "algebrokit/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

namespace algebrokit {

using nlohmann::json;

AProfile ProfileDef::fn() const {
  auto comps = components;
  return [comps](double t, std::span<double> out) {
    const double pt[1] = {t};
    for (std::size_t i = 0; i < comps.size(); ++i) out[i] = comps[i].eval(pt);
  };
}

bool ObjectStore::has(const std::string& name) const {
  return algebroids.count(name) || poissons.count(name) || submanifolds.count(name) ||
         reps.count(name) || drivers.count(name) || profiles.count(name) || paths.count(name);
}

std::uint64_t fnv1a64(const std::string& data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& message) {
  throw ConfigError(context + ": " + message);
}

const json& field(const json& obj, const char* key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(context, std::string("missing field '") + key + "'");
  return *it;
}

double number_or(const json& obj, const char* key, double fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<double>();
}

std::size_t index_or(const json& obj, const char* key, std::size_t fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<std::size_t>();
}

Box parse_box(const json& j, std::size_t expected_dim, const std::string& context) {
  Box box;
  if (!j.is_array()) fail(context, "chart_box must be an array of [lo, hi] pairs");
  for (const auto& pair : j) {
    if (!pair.is_array() || pair.size() != 2)
      fail(context, "chart_box entries must be [lo, hi] pairs");
    box.ranges.push_back({pair[0].get<double>(), pair[1].get<double>()});
  }
  if (expected_dim != 0 && box.dim() != expected_dim)
    fail(context, "chart_box has " + std::to_string(box.dim()) + " entries, expected " +
                      std::to_string(expected_dim));
  return box;
}

std::vector<std::string> make_names(const char* prefix, std::size_t count) {
  std::vector<std::string> v(count);
  for (std::size_t i = 0; i < count; ++i) v[i] = prefix + std::to_string(i + 1);
  return v;
}

ScalarField parse_field(const json& j, const std::vector<std::string>& vars,
                        const std::string& context) {
  if (!j.is_string()) fail(context, "coefficient entries must be expression strings");
  try {
    return parse_expr(j.get<std::string>(), vars);
  } catch (const ParseError& e) {
    fail(context, "in expression \"" + j.get<std::string>() + "\": " + e.what() +
                      " (position " + std::to_string(e.position) + ")");
  }
}

std::shared_ptr<const AlgebroidChart> build_algebroid(const json& def,
                                                      const std::string& context) {
  const std::size_t n = field(def, "base_dim", context).get<std::size_t>();
  const std::size_t r = field(def, "rank", context).get<std::size_t>();
  Box box = parse_box(field(def, "chart_box", context), n, context);
  const auto vars = def.contains("variables")
                        ? def["variables"].get<std::vector<std::string>>()
                        : make_names("b", n);
  if (vars.size() != n) fail(context, "variables list length mismatch");

  std::vector<std::vector<ScalarField>> anchor(r);
  const json& aj = field(def, "anchor", context);
  if (!aj.is_array() || aj.size() != r) fail(context, "anchor must be a rank x base_dim array");
  for (std::size_t mu = 0; mu < r; ++mu) {
    if (!aj[mu].is_array() || aj[mu].size() != n)
      fail(context, "anchor must be a rank x base_dim array");
    for (std::size_t i = 0; i < n; ++i)
      anchor[mu].push_back(parse_field(aj[mu][i], vars, context));
  }

  std::vector<std::vector<std::vector<ScalarField>>> structure(
      r, std::vector<std::vector<ScalarField>>(r));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      for (std::size_t c = 0; c < r; ++c)
        structure[a][b].push_back(constant_field(0.0, vars));
  if (def.contains("structure")) {
    const json& sj = def["structure"];
    if (!sj.is_array() || sj.size() != r) fail(context, "structure must be rank^3");
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b)
        for (std::size_t c = 0; c < r; ++c)
          structure[a][b][c] = parse_field(sj[a][b][c], vars, context);
  } else if (def.contains("structure_entries")) {
    // sparse upper entries {mu, nu, sigma, value}; antisymmetric partner filled in
    for (const auto& e : def["structure_entries"]) {
      const std::size_t mu = field(e, "mu", context).get<std::size_t>();
      const std::size_t nu = field(e, "nu", context).get<std::size_t>();
      const std::size_t sig = field(e, "sigma", context).get<std::size_t>();
      if (mu < 1 || mu > r || nu < 1 || nu > r || sig < 1 || sig > r)
        fail(context, "structure_entries index out of range (1-based)");
      ScalarField f = parse_field(field(e, "value", context), vars, context);
      structure[mu - 1][nu - 1][sig - 1] = f;
      structure[nu - 1][mu - 1][sig - 1] = (-1.0) * f;
    }
  }
  try {
    return std::make_shared<AlgebroidChart>(make_algebroid(
        n, r, std::move(anchor), std::move(structure), std::move(box), ChartKind::generic,
        number_or(def, "fd_step", kDefaultFdStep)));
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

std::shared_ptr<const AlgebroidChart> build_lie_algebra(const json& def,
                                                        const std::string& context) {
  std::vector<std::vector<std::vector<double>>> constants;
  if (def.contains("structure_constants")) {
    constants = def["structure_constants"].get<std::vector<std::vector<std::vector<double>>>>();
  } else if (def.contains("structure_entries")) {
    const std::size_t r = field(def, "rank", context).get<std::size_t>();
    constants.assign(r, std::vector<std::vector<double>>(r, std::vector<double>(r, 0.0)));
    for (const auto& e : def["structure_entries"]) {
      const std::size_t mu = field(e, "mu", context).get<std::size_t>();
      const std::size_t nu = field(e, "nu", context).get<std::size_t>();
      const std::size_t sig = field(e, "sigma", context).get<std::size_t>();
      const double v = field(e, "value", context).get<double>();
      if (mu < 1 || mu > r || nu < 1 || nu > r || sig < 1 || sig > r)
        fail(context, "structure_entries index out of range (1-based)");
      constants[mu - 1][nu - 1][sig - 1] = v;
      constants[nu - 1][mu - 1][sig - 1] = -v;
    }
  } else {
    fail(context, "lie_algebra needs structure_constants or structure_entries");
  }
  Box box = def.contains("chart_box") ? parse_box(def["chart_box"], 1, context) : unit_box(1);
  try {
    return std::make_shared<AlgebroidChart>(lie_algebra(constants, std::move(box)));
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

std::shared_ptr<const PoissonChart> build_poisson(const json& def,
                                                  const std::string& context) {
  const std::size_t m = field(def, "dim", context).get<std::size_t>();
  Box box = parse_box(field(def, "chart_box", context), m, context);
  const auto vars = def.contains("variables")
                        ? def["variables"].get<std::vector<std::string>>()
                        : make_names("x", m);
  if (vars.size() != m) fail(context, "variables list length mismatch");

  std::vector<std::vector<ScalarField>> pi(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) pi[i].push_back(constant_field(0.0, vars));
  if (def.contains("bivector")) {
    const json& bj = def["bivector"];
    if (!bj.is_array() || bj.size() != m) fail(context, "bivector must be dim x dim");
    for (std::size_t i = 0; i < m; ++i) {
      if (!bj[i].is_array() || bj[i].size() != m) fail(context, "bivector must be dim x dim");
      for (std::size_t j = 0; j < m; ++j) pi[i][j] = parse_field(bj[i][j], vars, context);
    }
  } else if (def.contains("bivector_entries")) {
    for (const auto& e : def["bivector_entries"]) {
      const std::size_t i = field(e, "i", context).get<std::size_t>();
      const std::size_t j = field(e, "j", context).get<std::size_t>();
      if (i < 1 || i > m || j < 1 || j > m || i == j)
        fail(context, "bivector_entries indices must be distinct and 1-based");
      ScalarField f = parse_field(field(e, "value", context), vars, context);
      pi[i - 1][j - 1] = f;
      pi[j - 1][i - 1] = (-1.0) * f;
    }
  } else {
    fail(context, "poisson needs bivector or bivector_entries");
  }

  std::vector<std::vector<std::vector<ScalarField>>> twist;
  if (def.contains("twist_entries")) {
    twist.assign(m, std::vector<std::vector<ScalarField>>(m));
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        for (std::size_t c = 0; c < m; ++c) twist[a][b].push_back(constant_field(0.0, vars));
    for (const auto& e : def["twist_entries"]) {
      std::size_t idx[3] = {field(e, "i", context).get<std::size_t>(),
                            field(e, "j", context).get<std::size_t>(),
                            field(e, "k", context).get<std::size_t>()};
      for (std::size_t v : idx)
        if (v < 1 || v > m) fail(context, "twist_entries index out of range (1-based)");
      if (idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2])
        fail(context, "twist_entries indices must be distinct");
      ScalarField f = parse_field(field(e, "value", context), vars, context);
      const std::size_t i = idx[0] - 1, j = idx[1] - 1, k = idx[2] - 1;
      // fill all six permutations with signs
      const std::size_t perm[6][3] = {{i, j, k}, {j, k, i}, {k, i, j},
                                      {j, i, k}, {i, k, j}, {k, j, i}};
      for (int p = 0; p < 6; ++p) {
        ScalarField g = p < 3 ? f : (-1.0) * f;
        twist[perm[p][0]][perm[p][1]][perm[p][2]] = g;
      }
    }
  }

  try {
    return std::make_shared<PoissonChart>(
        make_poisson(std::move(pi), std::move(twist), std::move(box), vars,
                     number_or(def, "fd_step", kDefaultFdStep)));
  } catch (const Error& e) {
    fail(context, e.what());
  }
}

HomotopyDriver::Profile parse_profile(const json& def, const std::string& context) {
  const std::string p = def.value("profile", "quartic");
  if (p == "none") return HomotopyDriver::Profile::none;
  if (p == "quadratic") return HomotopyDriver::Profile::quadratic;
  if (p == "quartic") return HomotopyDriver::Profile::quartic;
  if (p == "sin2") return HomotopyDriver::Profile::sin_squared;
  fail(context, "unknown profile '" + p + "'");
}

HomotopyDriver build_driver(const json& def, const std::string& context) {
  HomotopyDriver drv;
  drv.profile = parse_profile(def, context);
  drv.s_steps = index_or(def, "s_steps", 100);
  drv.s_length = number_or(def, "s_length", 1.0);
  const std::vector<std::string> ts = {"t", "s"};

  const json& bj = field(def, "b", context);
  std::vector<ScalarField> b_fields;
  for (const auto& e : bj) b_fields.push_back(parse_field(e, ts, context));
  drv.b = [b_fields](double t, double s, std::span<double> out) {
    const double pt[2] = {t, s};
    for (std::size_t i = 0; i < b_fields.size(); ++i) out[i] = b_fields[i].eval(pt);
  };
  if (def.contains("beta")) {
    std::vector<ScalarField> beta_fields;
    for (const auto& e : def["beta"]) beta_fields.push_back(parse_field(e, ts, context));
    drv.beta = [beta_fields](double t, double s, std::span<double> out) {
      const double pt[2] = {t, s};
      for (std::size_t i = 0; i < beta_fields.size(); ++i) out[i] = beta_fields[i].eval(pt);
    };
  }
  return drv;
}

Mat parse_matrix(const json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) fail(context, "matrix must be a nonempty array of rows");
  Mat m(j.size(), j[0].size());
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (!j[r].is_array() || j[r].size() != m.cols) fail(context, "matrix rows ragged");
    for (std::size_t c = 0; c < m.cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

}  // namespace

LoadedConfig load_config(const json& config, const std::string& source_path) {
  LoadedConfig out;
  out.source_path = source_path;
  if (!config.is_object()) throw ConfigError("config root must be a JSON object");
  out.seed = config.value("seed", 0ull);

  const json objects = config.value("objects", json::object());
  // submanifolds and matrix reps reference charts: build charts first
  for (auto it = objects.begin(); it != objects.end(); ++it) {
    const std::string& name = it.key();
    const json& def = it.value();
    const std::string context = "object '" + name + "'";
    const std::string type = field(def, "type", context).get<std::string>();
    if (type == "algebroid") {
      out.objects.algebroids[name] = build_algebroid(def, context);
    } else if (type == "tangent_algebroid") {
      const std::size_t n = field(def, "dim", context).get<std::size_t>();
      out.objects.algebroids[name] = std::make_shared<AlgebroidChart>(
          tangent_algebroid(n, parse_box(field(def, "chart_box", context), n, context)));
    } else if (type == "zero_algebroid") {
      const std::size_t n = field(def, "base_dim", context).get<std::size_t>();
      const std::size_t r = field(def, "rank", context).get<std::size_t>();
      out.objects.algebroids[name] = std::make_shared<AlgebroidChart>(
          zero_algebroid(n, r, parse_box(field(def, "chart_box", context), n, context)));
    } else if (type == "lie_algebra") {
      out.objects.algebroids[name] = build_lie_algebra(def, context);
    } else if (type == "poisson") {
      out.objects.poissons[name] = build_poisson(def, context);
    } else if (type == "driver") {
      out.objects.drivers[name] = build_driver(def, context);
    } else if (type == "a_profile") {
      ProfileDef p;
      for (const auto& e : field(def, "a", context))
        p.components.push_back(parse_field(e, {"t"}, context));
      out.objects.profiles[name] = std::move(p);
    } else if (type == "submanifold" || type == "matrix_rep" || type == "path_file") {
      // second pass
    } else {
      fail(context, "unknown object type '" + type + "'");
    }
  }
  for (auto it = objects.begin(); it != objects.end(); ++it) {
    const std::string& name = it.key();
    const json& def = it.value();
    const std::string context = "object '" + name + "'";
    const std::string type = field(def, "type", context).get<std::string>();
    if (type == "submanifold") {
      const std::string ambient = field(def, "ambient", context).get<std::string>();
      auto chart = out.objects.poissons.find(ambient);
      if (chart == out.objects.poissons.end())
        fail(context, "ambient references undefined poisson chart '" + ambient + "'");
      AdaptedSubmanifold S;
      S.ambient = chart->second;
      S.codim = field(def, "codim", context).get<std::size_t>();
      if (S.codim == 0 || S.codim > S.ambient->dim())
        fail(context, "codim must satisfy 0 < k <= dim");
      out.objects.submanifolds[name] = std::move(S);
    } else if (type == "matrix_rep") {
      const std::string chart_name = field(def, "algebroid", context).get<std::string>();
      auto chart = out.objects.algebroids.find(chart_name);
      if (chart == out.objects.algebroids.end())
        fail(context, "algebroid references undefined chart '" + chart_name + "'");
      const std::size_t d = field(def, "dim", context).get<std::size_t>();
      std::vector<Mat> images;
      for (const auto& img : field(def, "images", context))
        images.push_back(parse_matrix(img, context));
      try {
        out.objects.reps[name] = std::make_shared<MatrixRep>(
            make_matrix_rep(*chart->second, d, std::move(images)));
      } catch (const Error& e) {
        fail(context, e.what());
      }
    } else if (type == "path_file") {
      const std::string chart_name = field(def, "algebroid", context).get<std::string>();
      auto chart = out.objects.algebroids.find(chart_name);
      if (chart == out.objects.algebroids.end())
        fail(context, "algebroid references undefined chart '" + chart_name + "'");
      std::filesystem::path file = field(def, "file", context).get<std::string>();
      if (file.is_relative() && !source_path.empty())
        file = std::filesystem::path(source_path).parent_path() / file;
      try {
        out.objects.paths[name] = load_path_dump(file.string(), chart->second);
      } catch (const Error& e) {
        fail(context, e.what());
      }
    }
  }

  // validate jobs: references must resolve to objects or earlier "as" outputs
  std::set<std::string> known;
  for (auto it = objects.begin(); it != objects.end(); ++it) known.insert(it.key());
  const json jobs = config.value("jobs", json::array());
  std::set<std::string> job_names;
  static const std::set<std::string> commands = {
      "check-algebroid", "check-poisson", "dualize", "cotangent-algebroid",
      "check-coisotropic", "conormal", "conormal-lagrangian-twisted", "integrate-apath",
      "homotopy-flow", "full-foliation-test", "coiso-flow-identity", "groupoid-invariant",
      "axiom-suite", "homotopy-invariance", "dump-path"};
  static const std::set<std::string> reference_keys = {
      "object", "poisson", "submanifold", "algebroid", "path", "driver", "a_profile",
      "rep", "compare_to"};
  for (const auto& j : jobs) {
    JobDef job;
    job.name = field(j, "name", "job").get<std::string>();
    if (!job_names.insert(job.name).second)
      throw ConfigError("duplicate job name '" + job.name + "'");
    const std::string context = "job '" + job.name + "'";
    job.command = field(j, "command", context).get<std::string>();
    if (!commands.count(job.command)) fail(context, "unknown command '" + job.command + "'");
    job.params = j;
    for (auto pit = j.begin(); pit != j.end(); ++pit) {
      if (reference_keys.count(pit.key())) {
        const std::string ref = pit.value().get<std::string>();
        if (!known.count(ref))
          fail(context, "reference to undefined object '" + ref + "'");
      }
      if (pit.key() == "elements" || pit.key() == "drivers" || pit.key() == "paths") {
        for (const auto& e : pit.value()) {
          const std::string ref = e.get<std::string>();
          if (!known.count(ref)) fail(context, "reference to undefined object '" + ref + "'");
        }
      }
    }
    if (j.contains("as")) known.insert(j["as"].get<std::string>());
    out.jobs.push_back(std::move(job));
  }
  return out;
}

LoadedConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in '" + path + "': " + e.what());
  }
  return load_config(config, path);
}

void dump_path(const APath& path, const std::string& file) {
  std::ofstream out(file);
  if (!out) throw Error("dump_path: cannot open '" + file + "'");
  const std::size_t n = path.chart->base_dim(), r = path.chart->rank();
  out << "# t";
  for (std::size_t i = 1; i <= n; ++i) out << " X" << i;
  for (std::size_t mu = 1; mu <= r; ++mu) out << " a" << mu;
  out << "\n";
  char buf[40];
  const std::size_t N = path.segments();
  for (std::size_t k = 0; k <= N; ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", double(k) / double(N));
    out << buf;
    for (std::size_t i = 0; i < n; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", path.X[k][i]);
      out << " " << buf;
    }
    for (std::size_t mu = 0; mu < r; ++mu) {
      std::snprintf(buf, sizeof buf, "%.17g", path.a[k][mu]);
      out << " " << buf;
    }
    out << "\n";
  }
}

APath load_path_dump(const std::string& file, std::shared_ptr<const AlgebroidChart> chart) {
  std::ifstream in(file);
  if (!in) throw Error("load_path_dump: cannot open '" + file + "'");
  const std::size_t n = chart->base_dim(), r = chart->rank();
  APath path;
  path.chart = std::move(chart);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    const char* p = line.c_str();
    char* end = nullptr;
    for (double v = std::strtod(p, &end); p != end; v = std::strtod(p, &end)) {
      row.push_back(v);
      p = end;
    }
    if (row.size() != 1 + n + r)
      throw Error("load_path_dump: row has " + std::to_string(row.size()) +
                  " columns, expected " + std::to_string(1 + n + r));
    path.X.emplace_back(row.begin() + 1, row.begin() + 1 + n);
    path.a.emplace_back(row.begin() + 1 + n, row.end());
  }
  if (path.X.size() < 5) throw Error("load_path_dump: too few samples");
  return path;
}

}  // namespace algebrokit
