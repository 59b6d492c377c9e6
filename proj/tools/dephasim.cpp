#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "dephasim/version.hpp"

int main(int argc, char** argv) {
  namespace cli = dephasim::cli;
  CLI::App app{"Monte Carlo and analytic dephasing of a qubit coupled to spectrally diffusing TLSs"};
  app.set_version_flag("--version", dephasim::kVersion);
  app.require_subcommand(1);

  cli::Options opts;
  struct Spec {
    const char* name;
    const char* help;
    bool monte_carlo;
    bool plot;
  };
  const Spec specs[] = {
      {"simulate", "Run the Monte Carlo experiment and persist the record", true, true},
      {"analytic", "Emit the analytic dephasing law as CSV", false, true},
      {"regime", "Report crossover diagnostics as JSON", false, false},
      {"sweep", "Emit the temperature sweep of the dephasing rate as CSV", false, true},
      {"oracle-diffusion", "KS report of the diffusion engines against closed forms", true, false},
      {"validate", "Compare the Markov product solution with the full equations", true, false},
  };
  for (const auto& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", opts.config, "INI configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output path (stdout if omitted; simulate writes a JSON record)");
    sub->add_option("--seed", opts.seed, "Override [run] seed");
    if (s.monte_carlo) sub->add_option("--runs", opts.runs, "Override [run] runs");
    if (s.monte_carlo) sub->add_option("--threads", opts.threads, "Worker threads (default DEPHASIM_THREADS)");
    if (s.plot) sub->add_flag("--plot", opts.plot, "Also write a gnuplot script next to --out");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  return cli::run_command(name, opts, std::cout, std::cerr);
}
