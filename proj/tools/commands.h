#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace silref::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitGeometry = 3;
inline constexpr int kExitVanished = 4;

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: all available cores
  std::string manifest;
  bool no_manifest = false;
};

// What a command produced, for the run manifest.
struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> outputs;
  nlohmann::json fingerprints = nlohmann::json::object();
};

using CommandFn = std::function<CommandResult()>;

// Adds every subcommand to `app`. The callback of the parsed subcommand is
// stored in `selected`.
void RegisterCommands(CLI::App& app, const GlobalOptions& globals,
                      CommandFn& selected);

// Runs the command line and returns the exit code. Library errors are
// mapped to exit codes here; `write_manifest` is off during replay.
int RunCommandLine(const std::vector<std::string>& args, bool write_manifest);

std::string Sha256File(const std::string& path);

}  // namespace silref::cli
