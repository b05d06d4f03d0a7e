#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "algebrokit/apath.hpp"
#include "algebrokit/coiso.hpp"
#include "algebrokit/groupoid.hpp"

namespace algebrokit {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Expression-backed t -> r-vector profile for integrate-apath.
struct ProfileDef {
  std::vector<ScalarField> components;  // over variable "t"
  AProfile fn() const;
};

// Runtime namespace of constructed objects; jobs may add to it ("as").
struct ObjectStore {
  std::map<std::string, std::shared_ptr<const AlgebroidChart>> algebroids;
  std::map<std::string, std::shared_ptr<const PoissonChart>> poissons;
  std::map<std::string, AdaptedSubmanifold> submanifolds;
  std::map<std::string, std::shared_ptr<const MatrixRep>> reps;
  std::map<std::string, HomotopyDriver> drivers;
  std::map<std::string, ProfileDef> profiles;
  std::map<std::string, APath> paths;

  bool has(const std::string& name) const;
};

struct JobDef {
  std::string name;
  std::string command;
  nlohmann::json params;
};

struct LoadedConfig {
  std::uint64_t seed = 0;
  ObjectStore objects;
  std::vector<JobDef> jobs;
  std::string source_path;
};

// Parses and validates a config: constructs every object eagerly (dimension
// mismatches are rejected here, before any numerics run) and checks that all
// job references resolve to objects or earlier jobs' outputs.
LoadedConfig load_config(const nlohmann::json& config, const std::string& source_path = "");
LoadedConfig load_config_file(const std::string& path);

std::uint64_t fnv1a64(const std::string& data, std::uint64_t basis = 1469598103934665603ull);

// Columnar path dump: a header line naming the columns, then
// whitespace-separated rows "t X^1..X^n a_1..a_r" at full double precision
// (%.17g, so re-ingesting reproduces the path bit-exactly).
void dump_path(const APath& path, const std::string& file);
APath load_path_dump(const std::string& file, std::shared_ptr<const AlgebroidChart> chart);

}  // namespace algebrokit
