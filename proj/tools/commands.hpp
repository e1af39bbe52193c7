#pragma once

#include <CLI11.hpp>
#include <functional>
#include <string>

// Exit codes: 0 success, 2 a check did not pass, 1 runtime or config error.
enum ExitCode { kOk = 0, kRuntimeError = 1, kCheckFailed = 2 };

struct GlobalOptions {
  int threads = 0;  // 0: OpenMP default
  std::string scale = "n32";
  std::string cache_dir;
};

// Registers every subcommand on `app`. The callback of the selected leaf
// command stores its runner in `action`.
void register_commands(CLI::App& app, const GlobalOptions& g, std::function<int()>& action);
