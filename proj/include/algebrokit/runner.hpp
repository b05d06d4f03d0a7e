#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "algebrokit/config.hpp"

namespace algebrokit {

struct RunOptions {
  std::string out_dir;  // empty: no files written
  std::optional<std::uint64_t> seed_override;
  std::string jobs_filter;  // substring match on job names; empty: all
};

// Exit codes: 0 all jobs pass, 1 some check failed, 2 config error,
// 3 a job hit a runtime error (recorded in its report, later jobs still run).
struct RunOutcome {
  int exit_code = 0;
  std::vector<nlohmann::json> reports;
  nlohmann::json summary;
};

RunOutcome run_config(const LoadedConfig& config, const RunOptions& options);
RunOutcome run_config_file(const std::string& path, const RunOptions& options);

nlohmann::json report_to_json(const CheckReport& report);

}  // namespace algebrokit
