#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "holext/config.hpp"
#include "holext/report.hpp"

namespace {

// Flags win over the environment, the environment over the config file.
const char* env(const char* name) {
  const char* v = std::getenv(name);
  return v && *v ? v : nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holext: numerical checks for holomorphic extension of ultradifferentiable functions"};
  std::string command;
  std::string config_path;
  std::string out;
  std::string seed;
  std::string threads;

  std::string names;
  for (const auto& c : holext::commands()) names += (names.empty() ? "" : " | ") + c;
  app.add_option("command", command, names)->required();
  app.add_option("--config", config_path, "YAML config (HOLEXT_CONFIG); built-in defaults when absent");
  app.add_option("--out", out, "output directory (HOLEXT_OUT)");
  app.add_option("--seed", seed, "seed for sampled directions (HOLEXT_SEED)");
  app.add_option("--threads", threads, "worker threads (HOLEXT_THREADS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return holext::kExitConfigError;
  }

  if (config_path.empty()) {
    if (const char* v = env("HOLEXT_CONFIG")) config_path = v;
  }
  if (out.empty()) {
    if (const char* v = env("HOLEXT_OUT")) out = v;
  }
  if (seed.empty()) {
    if (const char* v = env("HOLEXT_SEED")) seed = v;
  }
  if (threads.empty()) {
    if (const char* v = env("HOLEXT_THREADS")) threads = v;
  }

  holext::RunConfig config;
  try {
    config = config_path.empty() ? holext::parse_config("{}") : holext::load_config(config_path);
    if (!out.empty()) config.out = out;
    if (!seed.empty()) {
      std::size_t used = 0;
      const unsigned long long s = std::stoull(seed, &used);
      if (used != seed.size() || seed.front() == '-') throw holext::ConfigError("seed must be a nonnegative integer", "seed");
      config.seed = s;
    }
    if (!threads.empty()) {
      std::size_t used = 0;
      const int t = std::stoi(threads, &used);
      if (used != threads.size() || t < 1) throw holext::ConfigError("threads must be a positive integer", "threads");
      config.threads = t;
    }
  } catch (const holext::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return holext::kExitConfigError;
  } catch (const std::logic_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return holext::kExitConfigError;
  }

  return holext::run(command, config, std::cout);
}
