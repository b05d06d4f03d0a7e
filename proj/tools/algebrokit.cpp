#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "algebrokit/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"algebrokit — Lie algebroid / Poisson chart verification toolkit"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute the jobs of a config file");
  std::string config_path, out_dir, jobs_filter;
  std::uint64_t seed = 0;
  bool seed_set = false;
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "directory for JSON reports and path dumps");
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--jobs-filter", jobs_filter, "run only jobs whose name contains this");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  algebrokit::RunOptions options;
  options.out_dir = out_dir;
  options.jobs_filter = jobs_filter;
  if (seed_set) options.seed_override = seed;

  try {
    const auto outcome = algebrokit::run_config_file(config_path, options);
    for (const auto& report : outcome.reports)
      std::printf("[%s] %s\n", report.at("verdict").get<std::string>().c_str(),
                  report.at("job").get<std::string>().c_str());
    std::printf("%s\n", outcome.summary.at("verdict").get<std::string>().c_str());
    return outcome.exit_code;
  } catch (const algebrokit::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
