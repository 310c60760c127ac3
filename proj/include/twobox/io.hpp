#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twobox/capacitor_analog.hpp"
#include "twobox/core_model.hpp"
#include "twobox/transfer_sim.hpp"

namespace twobox::io {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kLedgerHeader =
    "drop_index,box,mass_before,mass_after,position_before,position_after,"
    "delta_elastic_exact,delta_elastic_paper,gravity_work,settle_dissipation";
inline constexpr std::string_view kRcHeader = "t,q1,q2,cumulative_dissipated";
inline constexpr std::string_view kSweepHeader =
    "drop_count,relative_error_delta1,relative_error_delta2,relative_error_total";

/// Shortest decimal that parses back to the same double. Locale independent.
std::string format_number(double value);

/// Strict locale-independent parse; throws std::invalid_argument.
double parse_number(std::string_view text);

/// `domain` is "mechanical" or "electrical".
Json to_json(const EnergyBreakdown& energies, std::string_view domain);

/// Totals only; the records go to the ledger CSV. Adds drop_count and
/// record_count.
Json to_json(const TransferSummary& summary);

Json to_json(const AuditReport& report);
Json to_json(std::span<const ConvergenceRow> rows);
Json to_json(const SpringBoxParams& params);
Json to_json(const CapacitorCircuit& circuit);

void write_ledger_csv(std::ostream& out, std::span<const StepRecord> records);
std::vector<StepRecord> read_ledger_csv(std::istream& in);

void write_rc_csv(std::ostream& out, std::span<const RcSample> samples);
void write_sweep_csv(std::ostream& out, std::span<const ConvergenceRow> rows);

/// Serialised JSON text with a trailing newline.
std::string dump(const Json& json);

}  // namespace twobox::io
