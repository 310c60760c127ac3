#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twobox/core_model.hpp"

namespace twobox {

enum class Box { Box1, Box2 };

std::string to_string(Box box);

/// Ledger row for one box during one drop.
///
/// Positions are extension magnitudes. Box 1 rises (position shrinks by q)
/// and box 2 descends (position grows by q). `gravity_work` is positive when
/// the displacement follows gravity, so it is negative for box 1.
///
/// Every record satisfies
///   delta_elastic_exact == gravity_work - settle_dissipation.
struct StepRecord {
  std::uint64_t drop_index = 0;  // n in [1, N/2]
  Box box = Box::Box1;
  double mass_before = 0.0;
  double mass_after = 0.0;
  double position_before = 0.0;
  double position_after = 0.0;
  double delta_elastic_exact = 0.0;
  double delta_elastic_paper = 0.0;
  double gravity_work = 0.0;
  double settle_dissipation = 0.0;
};

struct TransferSummary {
  double delta1_exact = 0.0;
  double delta2_exact = 0.0;
  double delta_total_exact = 0.0;
  double delta1_paper = 0.0;
  double delta2_paper = 0.0;
  double gravity_work_total = 0.0;
  double dissipation_total = 0.0;
  double final_elastic_box1 = 0.0;
  double final_elastic_box2 = 0.0;
  /// Two rows per drop (Box1 then Box2), ascending drop index. Empty when the
  /// run exceeded SimulateOptions::max_retained_records.
  std::vector<StepRecord> records;
  std::uint64_t drop_count = 0;
  bool records_retained = true;
};

struct SimulateOptions {
  /// Records are kept while N <= this; larger runs only accumulate totals.
  std::uint64_t max_retained_records = 1'000'000;
};

/// Row of the box-1 ledger for drop n (box 1 goes from N-n+1 to N-n drops).
StepRecord box1_step(const SpringBoxParams& params, const TransferPlan& plan, std::uint64_t n);

/// Row of the box-2 ledger for drop n (box 2 goes from n-1 to n drops).
StepRecord box2_step(const SpringBoxParams& params, const TransferPlan& plan, std::uint64_t n);

/// Moves N/2 drops from box 1 to box 2, settling each box quasi-statically at
/// its new equilibrium after every drop. The fall of the drop itself carries
/// no energy into the ledger.
TransferSummary simulate_transfer(const SpringBoxParams& params, const TransferPlan& plan,
                                  const SimulateOptions& options = {});

struct AuditCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;           // absolute, in the check's own unit (mostly J)
  double relative_residual = 0.0;  // the quantity compared against the tolerance
};

struct AuditReport {
  std::vector<AuditCheck> checks;
  double tolerance = 1e-10;

  bool passed() const;
  const AuditCheck* find(std::string_view name) const;
};

inline constexpr double kAuditTolerance = 1e-10;

AuditReport audit_ledger(const TransferSummary& summary, const SpringBoxParams& params,
                         const TransferPlan& plan);

struct ConvergenceRow {
  std::uint64_t drop_count = 0;
  double relative_error_delta1 = 0.0;
  double relative_error_delta2 = 0.0;
  double relative_error_total = 0.0;
};

/// Compares the large-n approximate sums with the exact ledger for each N.
/// Entries are independent and are spread over `jobs` worker threads; the
/// output order always follows `drop_counts`.
std::vector<ConvergenceRow> convergence_sweep(const SpringBoxParams& params,
                                              std::span<const std::uint64_t> drop_counts,
                                              unsigned jobs = 1);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace twobox
