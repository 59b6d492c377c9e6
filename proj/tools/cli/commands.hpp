#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace dephasim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

struct Options {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> runs;
  std::optional<unsigned> threads;
  std::optional<std::filesystem::path> out;
  bool plot = false;  // also write a gnuplot script next to --out
};

// --threads, else DEPHASIM_THREADS, else 0 (hardware concurrency).
unsigned resolve_threads(const Options& opts);

// Each command writes its data to --out, or to `out` when --out is absent. Human-readable
// summaries go to `log`. They throw; run_command maps exceptions to exit codes.
void cmd_simulate(const Options& opts, std::ostream& out, std::ostream& log);
void cmd_analytic(const Options& opts, std::ostream& out, std::ostream& log);
void cmd_regime(const Options& opts, std::ostream& out, std::ostream& log);
void cmd_sweep(const Options& opts, std::ostream& out, std::ostream& log);
void cmd_oracle_diffusion(const Options& opts, std::ostream& out, std::ostream& log);
void cmd_validate(const Options& opts, std::ostream& out, std::ostream& log);

// Dispatches by subcommand name. Config, precondition and schema errors exit 2; numeric and fit
// failures exit 3. The message goes to `log`.
int run_command(const std::string& name, const Options& opts, std::ostream& out, std::ostream& log);

}  // namespace dephasim::cli
