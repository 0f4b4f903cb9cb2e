#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace frontlab::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

/// Subcommand names in the order they are listed by --help.
const std::vector<std::string>& commands();

struct RunOptions {
  std::string command;
  std::filesystem::path config;
  std::string out_prefix = "out";
  unsigned jobs = 1;
  bool verbose = false;
};

/// Files produced by one command, keyed by suffix (e.g. "_kcurve.csv").
/// Nothing touches the disk until every output has been rendered.
using Outputs = std::map<std::string, std::string>;

/// Runs `command` on an already parsed config. Throws the library exceptions.
Outputs execute(const std::string& command, const nlohmann::json& config, unsigned jobs,
                std::ostream* log);

/// fnv1a64 of the compact dump of the config (keys sorted).
std::string config_hash(const nlohmann::json& config);

/// Full pipeline: read config, execute, write files. Errors go to `err` as
/// {"error": {"kind": ..., "message": ...}}; returns the exit code.
int run(const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace frontlab::cli
