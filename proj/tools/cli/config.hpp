#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dephasim/analytics.hpp"
#include "dephasim/harness.hpp"

namespace dephasim::cli {

// Sectioned key=value configuration in human units: frequencies in MHz (ordinary, not angular),
// times in us, temperatures in K. Values are kept verbatim so serialization round-trips exactly;
// every value is type-checked at parse time.
class CliConfig {
 public:
  // Throws ConfigError naming the section and key on unknown keys or malformed values.
  static CliConfig parse(const std::string& text);
  static CliConfig load(const std::filesystem::path& path);
  std::string serialize() const;

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;
  void set(const std::string& section, const std::string& key, const std::string& value);

  // Typed accessors. The required forms throw ConfigError "missing [section] key".
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;
  std::string text_or(const std::string& section, const std::string& key, const std::string& fallback) const;

  // Conversions apply the 2 pi (MHz -> rad/s) and 1e-6 (us -> s) factors exactly once.
  QubitParams qubit() const;
  EnsembleSpec ensemble() const;
  SolverConfig solver(const EnsembleSpec& spec, const QubitParams& qubit) const;
  GridSpec grid() const;
  RunConfig run_config() const;
  LawParams law() const;
  SweepSpec sweep() const;
  // Single explicitly placed TLS from [ensemble] tls_detuning_MHz and tls_g_MHz.
  std::optional<TlsParams> single_tls() const;

  bool operator==(const CliConfig&) const = default;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace dephasim::cli
