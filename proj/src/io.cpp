#include "twobox/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <system_error>

namespace twobox::io {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t parse_index(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an unsigned integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buffer, ptr);
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

Json to_json(const EnergyBreakdown& e, std::string_view domain) {
  Json j;
  j["domain"] = domain;
  j["initial_total"] = e.initial_total;
  j["initial_box1"] = e.initial_box1;
  j["final_per_box"] = e.final_per_box;
  j["final_total"] = e.final_total;
  j["delta_total"] = e.delta_total;
  return j;
}

Json to_json(const TransferSummary& s) {
  Json j;
  j["drop_count"] = s.drop_count;
  j["delta1_exact"] = s.delta1_exact;
  j["delta2_exact"] = s.delta2_exact;
  j["delta_total_exact"] = s.delta_total_exact;
  j["delta1_paper"] = s.delta1_paper;
  j["delta2_paper"] = s.delta2_paper;
  j["gravity_work_total"] = s.gravity_work_total;
  j["dissipation_total"] = s.dissipation_total;
  j["final_elastic_box1"] = s.final_elastic_box1;
  j["final_elastic_box2"] = s.final_elastic_box2;
  j["record_count"] = s.records.size();
  j["records_retained"] = s.records_retained;
  return j;
}

Json to_json(const AuditReport& report) {
  Json j;
  j["passed"] = report.passed();
  j["tolerance"] = report.tolerance;
  Json checks = Json::array();
  for (const auto& c : report.checks) {
    Json entry;
    entry["name"] = c.name;
    entry["passed"] = c.passed;
    entry["residual"] = c.residual;
    entry["relative_residual"] = c.relative_residual;
    checks.push_back(std::move(entry));
  }
  j["checks"] = std::move(checks);
  return j;
}

Json to_json(std::span<const ConvergenceRow> rows) {
  Json j = Json::array();
  for (const auto& r : rows) {
    Json entry;
    entry["drop_count"] = r.drop_count;
    entry["relative_error_delta1"] = r.relative_error_delta1;
    entry["relative_error_delta2"] = r.relative_error_delta2;
    entry["relative_error_total"] = r.relative_error_total;
    j.push_back(std::move(entry));
  }
  return j;
}

Json to_json(const SpringBoxParams& p) {
  Json j;
  j["mass"] = p.total_mass;
  j["stiffness"] = p.stiffness;
  j["gravity"] = p.gravity;
  return j;
}

Json to_json(const CapacitorCircuit& c) {
  Json j;
  j["capacitance"] = c.capacitance;
  j["charge"] = c.initial_charge;
  j["resistance"] = c.resistance;
  return j;
}

void write_ledger_csv(std::ostream& out, std::span<const StepRecord> records) {
  out << kLedgerHeader << '\n';
  for (const auto& r : records) {
    out << std::to_string(r.drop_index) << ',' << to_string(r.box) << ',' << format_number(r.mass_before) << ','
        << format_number(r.mass_after) << ',' << format_number(r.position_before) << ','
        << format_number(r.position_after) << ',' << format_number(r.delta_elastic_exact) << ','
        << format_number(r.delta_elastic_paper) << ',' << format_number(r.gravity_work) << ','
        << format_number(r.settle_dissipation) << '\n';
  }
}

std::vector<StepRecord> read_ledger_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kLedgerHeader) {
    throw std::invalid_argument("ledger CSV header mismatch");
  }
  std::vector<StepRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw std::invalid_argument("ledger CSV row needs 10 fields: " + line);
    StepRecord r;
    r.drop_index = parse_index(f[0]);
    if (f[1] == "Box1") {
      r.box = Box::Box1;
    } else if (f[1] == "Box2") {
      r.box = Box::Box2;
    } else {
      throw std::invalid_argument("unknown box '" + std::string(f[1]) + "'");
    }
    r.mass_before = parse_number(f[2]);
    r.mass_after = parse_number(f[3]);
    r.position_before = parse_number(f[4]);
    r.position_after = parse_number(f[5]);
    r.delta_elastic_exact = parse_number(f[6]);
    r.delta_elastic_paper = parse_number(f[7]);
    r.gravity_work = parse_number(f[8]);
    r.settle_dissipation = parse_number(f[9]);
    records.push_back(r);
  }
  return records;
}

void write_rc_csv(std::ostream& out, std::span<const RcSample> samples) {
  out << kRcHeader << '\n';
  for (const auto& s : samples) {
    out << format_number(s.t) << ',' << format_number(s.q1) << ',' << format_number(s.q2) << ','
        << format_number(s.cumulative_dissipated) << '\n';
  }
}

void write_sweep_csv(std::ostream& out, std::span<const ConvergenceRow> rows) {
  out << kSweepHeader << '\n';
  for (const auto& r : rows) {
    out << std::to_string(r.drop_count) << ',' << format_number(r.relative_error_delta1) << ','
        << format_number(r.relative_error_delta2) << ',' << format_number(r.relative_error_total)
        << '\n';
  }
}

std::string dump(const Json& json) { return json.dump(2) + '\n'; }

}  // namespace twobox::io
