#include "twobox/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <locale>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twobox/io.hpp"

namespace twobox::cli {
namespace {

using io::format_number;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double json_number(const std::string& key, const nlohmann::json& value) {
  if (!value.is_number()) throw ConfigError(key, "expected a number");
  return value.get<double>();
}

std::uint64_t json_count(const std::string& key, const nlohmann::json& value) {
  if (!value.is_number_integer() || value.get<std::int64_t>() < 0) {
    throw ConfigError(key, "expected a non-negative integer");
  }
  return value.get<std::uint64_t>();
}

void require_positive(const char* field, double value) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw ConfigError(field, "must be a finite value > 0, got " + format_number(value));
  }
}

void require_present(const char* field, bool present, const char* context) {
  if (!present) throw ConfigError(field, std::string("missing, required ") + context);
}

std::vector<std::uint64_t> parse_drop_list(const std::string& text) {
  std::vector<std::uint64_t> drops;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty()) {
      throw UsageError("--drops expects a comma-separated list of integers, got '" + text + "'");
    }
    drops.push_back(value);
  }
  if (drops.empty()) throw UsageError("--drops needs at least one value");
  return drops;
}

bool wants_csv(OutputFormat f) { return f != OutputFormat::Json; }
bool wants_json(OutputFormat f) { return f != OutputFormat::Csv; }

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& body) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DomainError("out: cannot create directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / name;
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << body;
  file.close();
  if (!file) throw DomainError("out: cannot write '" + path.string() + "'");
}

std::ostringstream classic_stream() {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  return s;
}

const SpringBoxParams& need_params(const ScenarioConfig& config) {
  if (!config.params) {
    throw ConfigError("mass", "missing, this command needs --mass, --stiffness and --gravity");
  }
  return *config.params;
}

const CapacitorCircuit& need_circuit(const ScenarioConfig& config) {
  if (!config.circuit) {
    throw ConfigError("capacitance", "missing, this command needs --capacitance and --charge");
  }
  return *config.circuit;
}

void print_energies(std::ostream& out, const EnergyBreakdown& e, std::string_view domain) {
  out << "domain: " << domain << '\n'
      << "initial_total: " << format_number(e.initial_total) << " J\n"
      << "initial_box1: " << format_number(e.initial_box1) << " J\n"
      << "final_per_box: " << format_number(e.final_per_box) << " J\n"
      << "final_total: " << format_number(e.final_total) << " J\n"
      << "delta_total: " << format_number(e.delta_total) << " J\n"
      << "final_total/initial_total: " << format_number(e.final_total / e.initial_total) << '\n';
}

int run_analytic(const ScenarioConfig& config, std::ostream& out) {
  const EnergyBreakdown e = energy_breakdown(need_params(config));
  print_energies(out, e, "mechanical");
  if (config.output_dir && wants_json(config.format)) {
    write_file(*config.output_dir, "analytic.json", io::dump(io::to_json(e, "mechanical")));
  }
  return kExitOk;
}

int run_transfer(const ScenarioConfig& config, std::ostream& out, std::ostream& err) {
  const SpringBoxParams& params = need_params(config);
  std::optional<TransferPlan> plan;
  if (config.photon_energy) {
    plan = TransferPlan::photon(params, *config.photon_energy);
  } else {
    if (config.drops.size() != 1) {
      throw ConfigError("drops", "transfer needs exactly one drop count (or --photon-energy)");
    }
    plan = TransferPlan::liquid(params, config.drops.front());
  }

  const TransferSummary summary =
      simulate_transfer(params, *plan, SimulateOptions{.max_retained_records = config.max_records});
  const AuditReport report = audit_ledger(summary, params, *plan);
  const double initial = energy_breakdown(params).initial_total;

  out << "drops: " << plan->drop_count() << " (" << plan->transfer_drops() << " transferred)\n"
      << "drop_mass: " << format_number(plan->drop_mass()) << " kg\n"
      << "step: " << format_number(plan->step()) << " m\n"
      << "delta1_exact: " << format_number(summary.delta1_exact) << " J\n"
      << "delta2_exact: " << format_number(summary.delta2_exact) << " J\n"
      << "delta_total_exact: " << format_number(summary.delta_total_exact) << " J\n"
      << "delta1_paper: " << format_number(summary.delta1_paper) << " J\n"
      << "delta2_paper: " << format_number(summary.delta2_paper) << " J\n"
      << "gravity_work_total: " << format_number(summary.gravity_work_total) << " J\n"
      << "dissipation_total: " << format_number(summary.dissipation_total) << " J\n"
      << "final_elastic_box1: " << format_number(summary.final_elastic_box1) << " J\n"
      << "final_elastic_box2: " << format_number(summary.final_elastic_box2) << " J\n"
      << "delta_total_exact/initial_total: " << format_number(summary.delta_total_exact / initial)
      << '\n';

  std::size_t failed = 0;
  for (const auto& c : report.checks) {
    if (!c.passed) {
      ++failed;
      err << "audit check failed: " << c.name << " (relative residual "
          << format_number(c.relative_residual) << ")\n";
    }
  }
  out << "audit: " << (failed == 0 ? "PASS" : "FAIL") << " (" << report.checks.size() - failed
      << "/" << report.checks.size() << " checks)\n";

  const auto dir = config.output_dir.value_or(std::filesystem::path("."));
  if (wants_csv(config.format)) {
    if (summary.records_retained) {
      auto csv = classic_stream();
      io::write_ledger_csv(csv, summary.records);
      write_file(dir, "ledger.csv", csv.str());
    } else {
      err << "note: " << plan->drop_count()
          << " records exceed --max-records; ledger.csv not written\n";
    }
  }
  if (wants_json(config.format)) {
    write_file(dir, "summary.json", io::dump(io::to_json(summary)));
    write_file(dir, "audit.json", io::dump(io::to_json(report)));
  }
  return transfer_exit_code(report, config.check);
}

int run_sweep(const ScenarioConfig& config, std::ostream& out) {
  const SpringBoxParams& params = need_params(config);
  std::vector<std::uint64_t> drops = config.drops;
  if (drops.empty()) drops = {10, 100, 1000, 10000};
  if (config.photon_energy) throw ConfigError("photon_energy", "not supported by sweep");

  const auto rows = convergence_sweep(params, drops, config.jobs);
  out << io::kSweepHeader << '\n';
  std::vector<double> n, e2;
  for (const auto& r : rows) {
    out << r.drop_count << ',' << format_number(r.relative_error_delta1) << ','
        << format_number(r.relative_error_delta2) << ',' << format_number(r.relative_error_total)
        << '\n';
    n.push_back(static_cast<double>(r.drop_count));
    e2.push_back(r.relative_error_delta2);
  }
  if (rows.size() >= 2) {
    out << "loglog_slope_delta2: " << format_number(loglog_slope(n, e2)) << '\n';
  }

  if (config.output_dir) {
    if (wants_csv(config.format)) {
      auto csv = classic_stream();
      io::write_sweep_csv(csv, rows);
      write_file(*config.output_dir, "sweep.csv", csv.str());
    }
    if (wants_json(config.format)) {
      write_file(*config.output_dir, "sweep.json", io::dump(io::to_json(rows)));
    }
  }
  return kExitOk;
}

int run_capacitor(const ScenarioConfig& config, std::ostream& out) {
  const CapacitorCircuit& circuit = need_circuit(config);
  const EnergyBreakdown e = capacitor_energy_breakdown(circuit);
  print_energies(out, e, "electrical");

  io::Json json = io::to_json(e, "electrical");
  std::vector<RcSample> series;
  if (circuit.resistance > 0.0) {
    const double tau = rc_time_constant(circuit);
    series = rc_transient_numeric(circuit, tau * config.rc.step_fraction,
                                  tau * config.rc.horizon_multiplier);
    const double expected = circuit.initial_charge * circuit.initial_charge / (4.0 * circuit.capacitance);
    const double dissipated = series.back().cumulative_dissipated;
    out << "tau: " << format_number(tau) << " s\n"
        << "samples: " << series.size() << '\n'
        << "dissipated: " << format_number(dissipated) << " J\n"
        << "dissipated_expected: " << format_number(expected) << " J\n"
        << "dissipated_relative_error: " << format_number(relative_difference(dissipated, expected))
        << '\n';
    json["resistance"] = circuit.resistance;
    json["tau"] = tau;
    json["dissipated"] = dissipated;
    json["dissipated_expected"] = expected;
  } else {
    out << "ideal circuit (resistance 0): no transient; the lost energy is "
        << format_number(-e.delta_total) << " J\n";
  }

  if (config.output_dir) {
    if (wants_csv(config.format) && !series.empty()) {
      auto csv = classic_stream();
      io::write_rc_csv(csv, series);
      write_file(*config.output_dir, "transient.csv", csv.str());
    }
    if (wants_json(config.format)) {
      write_file(*config.output_dir, "capacitor.json", io::dump(json));
    }
  }
  return kExitOk;
}

int run_map(const ScenarioConfig& config, std::ostream& out) {
  io::Json json;
  if (config.params && config.circuit) {
    throw UsageError("map: give either the mechanical flags or the circuit flags, not both");
  }
  if (config.params) {
    const CapacitorCircuit c = mechanical_to_electrical(*config.params);
    const double energy = energy_breakdown(*config.params).initial_total;
    out << "direction: mechanical->electrical\n"
        << "charge: " << format_number(c.initial_charge) << " C\n"
        << "capacitance: " << format_number(c.capacitance) << " F\n"
        << "voltage: " << format_number(c.initial_charge / c.capacitance) << " V\n"
        << "displacement: " << format_number(equilibrium_position(*config.params, 1.0)) << " m\n"
        << "mechanical_energy: " << format_number(energy) << " J\n"
        << "electrical_energy: " << format_number(capacitor_energy_breakdown(c).initial_total)
        << " J\n";
    json["direction"] = "mechanical_to_electrical";
    json["mechanical"] = io::to_json(*config.params);
    json["electrical"] = io::to_json(c);
  } else if (config.circuit) {
    if (!config.gravity) throw ConfigError("gravity", "missing, map to mechanical needs --gravity");
    const SpringBoxParams p = electrical_to_mechanical(*config.circuit, *config.gravity);
    out << "direction: electrical->mechanical\n"
        << "mass: " << format_number(p.total_mass) << " kg\n"
        << "stiffness: " << format_number(p.stiffness) << " N/m\n"
        << "gravity: " << format_number(p.gravity) << " m/s^2\n"
        << "displacement: " << format_number(equilibrium_position(p, 1.0)) << " m\n"
        << "mechanical_energy: " << format_number(energy_breakdown(p).initial_total) << " J\n"
        << "electrical_energy: "
        << format_number(capacitor_energy_breakdown(*config.circuit).initial_total) << " J\n";
    json["direction"] = "electrical_to_mechanical";
    json["electrical"] = io::to_json(*config.circuit);
    json["mechanical"] = io::to_json(p);
  } else {
    throw ConfigError("mass", "missing, map needs the mechanical or the circuit flags");
  }
  if (config.output_dir && wants_json(config.format)) {
    write_file(*config.output_dir, "map.json", io::dump(json));
  }
  return kExitOk;
}

}  // namespace

ScenarioInputs merge(const ScenarioInputs& base, const ScenarioInputs& o) {
  ScenarioInputs m = base;
  const auto take = [](auto& slot, const auto& value) {
    if (value) slot = value;
  };
  take(m.mass, o.mass);
  take(m.stiffness, o.stiffness);
  take(m.gravity, o.gravity);
  take(m.drops, o.drops);
  take(m.photon_energy, o.photon_energy);
  take(m.capacitance, o.capacitance);
  take(m.charge, o.charge);
  take(m.resistance, o.resistance);
  take(m.jobs, o.jobs);
  take(m.out, o.out);
  take(m.format, o.format);
  take(m.check, o.check);
  take(m.step_fraction, o.step_fraction);
  take(m.horizon_multiplier, o.horizon_multiplier);
  take(m.max_records, o.max_records);
  // A photon energy on the command line replaces drops from the file and vice versa.
  if (o.photon_energy && !o.drops) m.drops.reset();
  if (o.drops && !o.photon_energy) m.photon_energy.reset();
  return m;
}

ScenarioInputs parse_config_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigParseError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigParseError("config must be a flat JSON object");

  ScenarioInputs in;
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) throw ConfigParseError("config must be flat; '" + key + "' is an object");
    if (key == "mass") {
      in.mass = json_number(key, value);
    } else if (key == "stiffness") {
      in.stiffness = json_number(key, value);
    } else if (key == "gravity") {
      in.gravity = json_number(key, value);
    } else if (key == "drops") {
      std::vector<std::uint64_t> drops;
      if (value.is_array()) {
        for (const auto& item : value) drops.push_back(json_count(key, item));
      } else {
        drops.push_back(json_count(key, value));
      }
      in.drops = std::move(drops);
    } else if (key == "photon_energy") {
      in.photon_energy = json_number(key, value);
    } else if (key == "capacitance") {
      in.capacitance = json_number(key, value);
    } else if (key == "charge") {
      in.charge = json_number(key, value);
    } else if (key == "resistance") {
      in.resistance = json_number(key, value);
    } else if (key == "jobs") {
      in.jobs = static_cast<unsigned>(json_count(key, value));
    } else if (key == "out") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      in.out = value.get<std::string>();
    } else if (key == "format") {
      if (!value.is_string()) throw ConfigError(key, "expected a string");
      in.format = value.get<std::string>();
    } else if (key == "check") {
      if (!value.is_boolean()) throw ConfigError(key, "expected true or false");
      in.check = value.get<bool>();
    } else if (key == "step_fraction") {
      in.step_fraction = json_number(key, value);
    } else if (key == "horizon_multiplier") {
      in.horizon_multiplier = json_number(key, value);
    } else if (key == "max_records") {
      in.max_records = json_count(key, value);
    } else {
      throw ConfigError(key, "unknown field");
    }
  }
  return in;
}

ScenarioConfig validate_inputs(const ScenarioInputs& in) {
  ScenarioConfig config;

  if (in.gravity) {
    require_positive("gravity", *in.gravity);
    config.gravity = in.gravity;
  }
  if (in.mass || in.stiffness) {
    const char* context = "with the other spring-box fields";
    require_present("mass", in.mass.has_value(), context);
    require_present("stiffness", in.stiffness.has_value(), context);
    require_present("gravity", in.gravity.has_value(), context);
    require_positive("mass", *in.mass);
    require_positive("stiffness", *in.stiffness);
    config.params = SpringBoxParams{*in.mass, *in.stiffness, *in.gravity};
  }

  if (in.capacitance || in.charge || in.resistance) {
    const char* context = "with the other circuit fields";
    require_present("capacitance", in.capacitance.has_value(), context);
    require_present("charge", in.charge.has_value(), context);
    require_positive("capacitance", *in.capacitance);
    require_positive("charge", *in.charge);
    const double resistance = in.resistance.value_or(0.0);
    if (!std::isfinite(resistance) || resistance < 0.0) {
      throw ConfigError("resistance", "must be a finite value >= 0, got " + format_number(resistance));
    }
    config.circuit = CapacitorCircuit{*in.capacitance, *in.charge, resistance};
  }

  if (!config.params && !config.circuit) {
    throw ConfigError("mass",
                      "missing; describe the spring-box system (mass, stiffness, gravity) or the "
                      "circuit (capacitance, charge)");
  }

  if (in.drops) {
    for (const auto n : *in.drops) {
      if (n > kMaxDropCount) {
        throw ConfigError("drops", "drop count " + std::to_string(n) + " exceeds the maximum 2^32");
      }
      if (n < 2 || n % 2 != 0) {
        throw ConfigError("drops", "drop count must be even and >= 2 (the transfer stops after N/2 drops), got " +
                                       std::to_string(n));
      }
    }
    config.drops = *in.drops;
  }
  if (in.photon_energy) {
    if (in.drops) throw ConfigError("photon_energy", "cannot be combined with drops");
    require_positive("photon_energy", *in.photon_energy);
    config.photon_energy = in.photon_energy;
  }

  if (in.jobs) {
    if (*in.jobs < 1) throw ConfigError("jobs", "must be >= 1");
    config.jobs = *in.jobs;
  }
  if (in.out) config.output_dir = std::filesystem::path(*in.out);
  if (in.format) {
    if (*in.format == "csv") {
      config.format = OutputFormat::Csv;
    } else if (*in.format == "json") {
      config.format = OutputFormat::Json;
    } else if (*in.format == "both") {
      config.format = OutputFormat::Both;
    } else {
      throw ConfigError("format", "must be one of csv, json, both; got '" + *in.format + "'");
    }
  }
  if (in.check) config.check = *in.check;
  if (in.step_fraction) {
    const double f = *in.step_fraction;
    if (!(f > 0.0) || f > 1.0 / 50.0) throw ConfigError("step_fraction", "must lie in (0, 1/50]");
    config.rc.step_fraction = f;
  }
  if (in.horizon_multiplier) {
    const double h = *in.horizon_multiplier;
    if (!std::isfinite(h) || h < 10.0) throw ConfigError("horizon_multiplier", "must be >= 10");
    config.rc.horizon_multiplier = h;
  }
  if (in.max_records) config.max_records = *in.max_records;
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigParseError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << file.rdbuf();
  return validate_inputs(parse_config_json(text.str()));
}

int transfer_exit_code(const AuditReport& report, bool check) {
  return (check && !report.passed()) ? kExitDomain : kExitOk;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy ledger for two spring-suspended boxes exchanging liquid drops, "
               "and the matching two-capacitor circuit.",
               "twobox"};
  app.fallthrough();
  app.require_subcommand(1);

  double mass = 0, stiffness = 0, gravity = 0, photon = 0, capacitance = 0, charge = 0,
         resistance = 0, step_fraction = 0, horizon_multiplier = 0;
  unsigned jobs = 1;
  std::uint64_t max_records = 0;
  std::string drops_text, out_dir, format, config_path;
  bool check = false;

  auto* o_mass = app.add_option("--mass", mass, "Total liquid mass M in box 1 (kg)");
  auto* o_stiffness = app.add_option("--stiffness", stiffness, "Spring stiffness k (N/m)");
  auto* o_gravity = app.add_option("--gravity", gravity, "Gravitational acceleration g (m/s^2)");
  auto* o_drops = app.add_option("--drops", drops_text,
                                 "Drop count N (even); comma-separated list for sweep");
  auto* o_photon = app.add_option("--photon-energy", photon,
                                  "Photon energy per drop (J); drop mass E/c^2 replaces --drops");
  auto* o_capacitance = app.add_option("--capacitance", capacitance, "Capacitance C per capacitor (F)");
  auto* o_charge = app.add_option("--charge", charge, "Initial charge Q0 on capacitor 1 (C)");
  auto* o_resistance = app.add_option("--resistance", resistance, "Series resistance R (ohm)");
  auto* o_jobs = app.add_option("--jobs", jobs, "Worker threads for sweep")->check(CLI::PositiveNumber);
  auto* o_out = app.add_option("--out", out_dir, "Output directory");
  auto* o_format = app.add_option("--format", format, "Output files: csv, json or both")
                       ->check(CLI::IsMember({"csv", "json", "both"}));
  auto* o_config = app.add_option("--config", config_path, "Flat JSON config; flags override it");
  auto* o_check = app.add_flag("--check", check, "Exit nonzero when the ledger audit fails");
  auto* o_step = app.add_option("--step-fraction", step_fraction,
                                "RC integration step as a fraction of tau (<= 0.02)");
  auto* o_horizon = app.add_option("--horizon-multiplier", horizon_multiplier,
                                   "RC integration horizon in units of tau (>= 10)");
  auto* o_records = app.add_option("--max-records", max_records,
                                   "Largest N whose ledger records are kept in memory");

  auto* analytic = app.add_subcommand("analytic", "Closed-form energies before and after the transfer");
  auto* transfer = app.add_subcommand("transfer", "Drop-by-drop ledger, audit, ledger.csv and summary.json");
  auto* sweep = app.add_subcommand("sweep", "Error of the large-n approximation against N");
  auto* capacitor = app.add_subcommand("capacitor", "Two-capacitor energies and RC transient");
  auto* map = app.add_subcommand("map", "Map spring-box parameters to a circuit or back");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    ScenarioInputs flags;
    if (o_mass->count()) flags.mass = mass;
    if (o_stiffness->count()) flags.stiffness = stiffness;
    if (o_gravity->count()) flags.gravity = gravity;
    if (o_drops->count()) flags.drops = parse_drop_list(drops_text);
    if (o_photon->count()) flags.photon_energy = photon;
    if (o_capacitance->count()) flags.capacitance = capacitance;
    if (o_charge->count()) flags.charge = charge;
    if (o_resistance->count()) flags.resistance = resistance;
    if (o_jobs->count()) flags.jobs = jobs;
    if (o_out->count()) flags.out = out_dir;
    if (o_format->count()) flags.format = format;
    if (o_check->count()) flags.check = check;
    if (o_step->count()) flags.step_fraction = step_fraction;
    if (o_horizon->count()) flags.horizon_multiplier = horizon_multiplier;
    if (o_records->count()) flags.max_records = max_records;

    ScenarioInputs inputs = flags;
    if (o_config->count()) {
      std::ifstream file(config_path, std::ios::binary);
      if (!file) throw ConfigParseError("cannot open config file '" + config_path + "'");
      std::ostringstream text;
      text << file.rdbuf();
      inputs = merge(parse_config_json(text.str()), flags);
    }
    const ScenarioConfig config = validate_inputs(inputs);

    if (analytic->parsed()) return run_analytic(config, out);
    if (transfer->parsed()) return run_transfer(config, out, err);
    if (sweep->parsed()) return run_sweep(config, out);
    if (capacitor->parsed()) return run_capacitor(config, out);
    if (map->parsed()) return run_map(config, out);
    err << app.help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const ConfigParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace twobox::cli
