#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "twobox/capacitor_analog.hpp"
#include "twobox/core_model.hpp"
#include "twobox/transfer_sim.hpp"

namespace twobox::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// A config value failed validation. `field()` names the offending key.
class ConfigError : public DomainError {
 public:
  ConfigError(std::string field, const std::string& message)
      : DomainError(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// The config file is unreadable or not a flat JSON object.
class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json, Both };

/// Raw scenario values as read from a config file or from flags. Keys match
/// the flag names with dashes replaced by underscores.
struct ScenarioInputs {
  std::optional<double> mass;
  std::optional<double> stiffness;
  std::optional<double> gravity;
  std::optional<std::vector<std::uint64_t>> drops;
  std::optional<double> photon_energy;
  std::optional<double> capacitance;
  std::optional<double> charge;
  std::optional<double> resistance;
  std::optional<unsigned> jobs;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<bool> check;
  std::optional<double> step_fraction;
  std::optional<double> horizon_multiplier;
  std::optional<std::uint64_t> max_records;
};

/// Fields of `overrides` that are set replace those of `base`.
ScenarioInputs merge(const ScenarioInputs& base, const ScenarioInputs& overrides);

struct RcOptions {
  double step_fraction = 0.01;      // step = tau * step_fraction
  double horizon_multiplier = 20.0;  // horizon = tau * horizon_multiplier
};

/// Validated scenario. Sections are optional because each subcommand needs a
/// different subset; the subcommand reports whatever it is missing.
struct ScenarioConfig {
  std::optional<SpringBoxParams> params;
  std::optional<double> gravity;
  std::vector<std::uint64_t> drops;
  std::optional<double> photon_energy;
  std::optional<CapacitorCircuit> circuit;
  std::optional<std::filesystem::path> output_dir;
  OutputFormat format = OutputFormat::Both;
  RcOptions rc;
  unsigned jobs = 1;
  bool check = false;
  std::uint64_t max_records = SimulateOptions{}.max_retained_records;
};

/// Parses a flat JSON object. Throws ConfigParseError on malformed JSON and
/// ConfigError on unknown keys or values of the wrong type.
ScenarioInputs parse_config_json(std::string_view text);

/// Checks every present value. Mass, stiffness and gravity form a unit (gravity
/// alone is allowed, for mapping a circuit), and at least one of the
/// mechanical system or the circuit must be described.
ScenarioConfig validate_inputs(const ScenarioInputs& inputs);

ScenarioConfig load_config(const std::filesystem::path& path);

/// Runs one subcommand. `args` excludes the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// Exit status of `transfer`: nonzero only when --check is set and the audit failed.
int transfer_exit_code(const AuditReport& report, bool check);

}  // namespace twobox::cli
