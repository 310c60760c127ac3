#include "twobox/transfer_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string_view>
#include <thread>

#include "twobox/compensated_sum.hpp"

namespace twobox {
namespace {

// Unchecked row builders; callers validate params, plan and n.
StepRecord make_box1_step(const SpringBoxParams& p, const TransferPlan& plan, std::uint64_t n) {
  const auto total = static_cast<std::int64_t>(plan.drop_count());
  const std::int64_t before = total - static_cast<std::int64_t>(n) + 1;
  const std::int64_t after = before - 1;
  const double m = plan.drop_mass();
  const double q = plan.step();
  const double kq2 = p.stiffness * q * q;

  StepRecord r;
  r.drop_index = n;
  r.box = Box::Box1;
  r.mass_before = static_cast<double>(before) * m;
  r.mass_after = static_cast<double>(after) * m;
  r.position_before = static_cast<double>(before) * q;
  r.position_after = static_cast<double>(after) * q;
  // k/2 (x_after^2 - x_before^2) with the level difference taken in integers.
  r.delta_elastic_exact = 0.5 * kq2 * static_cast<double>((after - before) * (after + before));
  r.delta_elastic_paper = -static_cast<double>(before) * kq2;
  // The box rises by q against the weight it still carries.
  r.gravity_work = -(r.mass_after * p.gravity * q);
  r.settle_dissipation = 0.5 * p.stiffness * q * q;
  return r;
}

StepRecord make_box2_step(const SpringBoxParams& p, const TransferPlan& plan, std::uint64_t n) {
  const auto after = static_cast<std::int64_t>(n);
  const std::int64_t before = after - 1;
  const double m = plan.drop_mass();
  const double q = plan.step();
  const double kq2 = p.stiffness * q * q;

  StepRecord r;
  r.drop_index = n;
  r.box = Box::Box2;
  r.mass_before = static_cast<double>(before) * m;
  r.mass_after = static_cast<double>(after) * m;
  r.position_before = static_cast<double>(before) * q;
  r.position_after = static_cast<double>(after) * q;
  r.delta_elastic_exact = 0.5 * kq2 * static_cast<double>((after - before) * (after + before));
  r.delta_elastic_paper = static_cast<double>(after) * kq2;
  r.gravity_work = r.mass_after * p.gravity * q;
  r.settle_dissipation = 0.5 * p.stiffness * q * q;
  return r;
}

void check_drop_index(const TransferPlan& plan, std::uint64_t n) {
  if (n < 1 || n > plan.transfer_drops()) {
    throw DomainError("drop index " + std::to_string(n) + " outside [1, " +
                      std::to_string(plan.transfer_drops()) + "]");
  }
}

// Collects the worst residual of a family of per-record comparisons.
class Worst {
 public:
  void observe(double absolute, double relative) {
    if (!(relative <= relative_)) {  // NaN propagates as a failure
      relative_ = relative;
      absolute_ = absolute;
    }
  }
  void observe_relative(double actual, double expected) {
    observe(std::abs(actual - expected), relative_difference(actual, expected));
  }
  AuditCheck check(std::string name, double tolerance) const {
    return AuditCheck{std::move(name), relative_ <= tolerance, absolute_, relative_};
  }

 private:
  double absolute_ = 0.0;
  double relative_ = 0.0;
};

AuditCheck compare(std::string name, double actual, double expected, double scale) {
  const double absolute = std::abs(actual - expected);
  const double relative = absolute / scale;
  return AuditCheck{std::move(name), relative <= kAuditTolerance, absolute, relative};
}

AuditCheck compare_relative(std::string name, double actual, double expected) {
  const double relative = relative_difference(actual, expected);
  return AuditCheck{std::move(name), relative <= kAuditTolerance, std::abs(actual - expected),
                    relative};
}

void audit_records(const TransferSummary& s, const SpringBoxParams& p, const TransferPlan& plan,
                   std::vector<AuditCheck>& out, double initial_energy) {
  const std::uint64_t total = plan.drop_count();
  const double m = plan.drop_mass();
  const double q = plan.step();
  const double kq2 = p.stiffness * q * q;

  double sequence_errors = 0.0;
  if (s.records.size() != total) sequence_errors += 1.0;

  Worst mass_hop, position_hop, exact_form, work_form, dissipation_form, paper_form, identity;
  double monotonic_violations = 0.0;
  CompensatedSum d1, d2, p1, p2, work, dissipation;

  for (std::size_t i = 0; i < s.records.size(); ++i) {
    const StepRecord& r = s.records[i];
    const auto n = static_cast<std::uint64_t>(i / 2 + 1);
    const Box expected_box = (i % 2 == 0) ? Box::Box1 : Box::Box2;
    if (r.drop_index != n || r.box != expected_box) sequence_errors += 1.0;

    const double dn = static_cast<double>(r.drop_index);
    const double dN = static_cast<double>(total);
    const double mass_scale = std::max(r.mass_before, r.mass_after);
    const double position_scale = std::max(r.position_before, r.position_after);

    if (r.box == Box::Box1) {
      const double dm = r.mass_before - r.mass_after;
      const double dx = r.position_before - r.position_after;
      mass_hop.observe(std::abs(dm - m), std::abs(dm - m) / mass_scale);
      position_hop.observe(std::abs(dx - q), std::abs(dx - q) / position_scale);
      exact_form.observe_relative(r.delta_elastic_exact, -(dN - dn + 0.5) * kq2);
      work_form.observe_relative(r.gravity_work, -(dN - dn) * kq2);
      paper_form.observe_relative(r.delta_elastic_paper, -(dN - dn + 1.0) * kq2);
      if (!(r.delta_elastic_exact < 0.0)) monotonic_violations += 1.0;
      d1 += r.delta_elastic_exact;
      p1 += r.delta_elastic_paper;
    } else {
      const double dm = r.mass_after - r.mass_before;
      const double dx = r.position_after - r.position_before;
      mass_hop.observe(std::abs(dm - m), std::abs(dm - m) / mass_scale);
      position_hop.observe(std::abs(dx - q), std::abs(dx - q) / position_scale);
      exact_form.observe_relative(r.delta_elastic_exact, (dn - 0.5) * kq2);
      work_form.observe_relative(r.gravity_work, dn * kq2);
      paper_form.observe_relative(r.delta_elastic_paper, dn * kq2);
      if (!(r.delta_elastic_exact > 0.0)) monotonic_violations += 1.0;
      d2 += r.delta_elastic_exact;
      p2 += r.delta_elastic_paper;
    }
    dissipation_form.observe_relative(r.settle_dissipation, 0.5 * kq2);

    const double balance = r.gravity_work - r.settle_dissipation;
    const double scale = std::max({std::abs(r.delta_elastic_exact), std::abs(r.gravity_work),
                                   std::abs(r.settle_dissipation)});
    const double residual = std::abs(r.delta_elastic_exact - balance);
    identity.observe(residual, scale > 0.0 ? residual / scale : residual);

    work += r.gravity_work;
    dissipation += r.settle_dissipation;
  }

  out.push_back(AuditCheck{"record_sequence", sequence_errors == 0.0, sequence_errors,
                           sequence_errors});
  out.push_back(identity.check("step_ledger_identity", kAuditTolerance));
  out.push_back(mass_hop.check("step_mass_transfer", kAuditTolerance));
  out.push_back(position_hop.check("step_position_hop", kAuditTolerance));
  out.push_back(exact_form.check("step_exact_increment", kAuditTolerance));
  out.push_back(work_form.check("step_gravity_work", kAuditTolerance));
  out.push_back(dissipation_form.check("step_settle_dissipation", kAuditTolerance));
  out.push_back(paper_form.check("step_paper_increment", kAuditTolerance));
  out.push_back(AuditCheck{"monotonic_box_energies", monotonic_violations == 0.0,
                           monotonic_violations, monotonic_violations});

  Worst totals;
  const auto observe_total = [&](double from_records, double reported) {
    const double a = std::abs(from_records - reported);
    totals.observe(a, a / initial_energy);
  };
  observe_total(d1.value(), s.delta1_exact);
  observe_total(d2.value(), s.delta2_exact);
  observe_total(p1.value(), s.delta1_paper);
  observe_total(p2.value(), s.delta2_paper);
  observe_total(work.value(), s.gravity_work_total);
  observe_total(dissipation.value(), s.dissipation_total);
  out.push_back(totals.check("record_sums_match_totals", kAuditTolerance));
}

}  // namespace

std::string to_string(Box box) { return box == Box::Box1 ? "Box1" : "Box2"; }

StepRecord box1_step(const SpringBoxParams& params, const TransferPlan& plan, std::uint64_t n) {
  plan.check_consistent(params);
  check_drop_index(plan, n);
  return make_box1_step(params, plan, n);
}

StepRecord box2_step(const SpringBoxParams& params, const TransferPlan& plan, std::uint64_t n) {
  plan.check_consistent(params);
  check_drop_index(plan, n);
  return make_box2_step(params, plan, n);
}

TransferSummary simulate_transfer(const SpringBoxParams& params, const TransferPlan& plan,
                                  const SimulateOptions& options) {
  plan.check_consistent(params);

  const std::uint64_t total = plan.drop_count();
  const std::uint64_t drops = plan.transfer_drops();

  TransferSummary s;
  s.drop_count = total;
  s.records_retained = total <= options.max_retained_records;
  if (s.records_retained) s.records.reserve(static_cast<std::size_t>(total));

  CompensatedSum energy1(elastic_energy(params.stiffness, static_cast<double>(total) * plan.step()));
  CompensatedSum energy2;
  CompensatedSum d1, d2, p1, p2, work, dissipation;

  for (std::uint64_t n = 1; n <= drops; ++n) {
    const StepRecord r1 = make_box1_step(params, plan, n);
    const StepRecord r2 = make_box2_step(params, plan, n);

    energy1 += r1.delta_elastic_exact;
    energy2 += r2.delta_elastic_exact;
    d1 += r1.delta_elastic_exact;
    d2 += r2.delta_elastic_exact;
    p1 += r1.delta_elastic_paper;
    p2 += r2.delta_elastic_paper;
    work += r1.gravity_work;
    work += r2.gravity_work;
    dissipation += r1.settle_dissipation;
    dissipation += r2.settle_dissipation;

    if (s.records_retained) {
      s.records.push_back(r1);
      s.records.push_back(r2);
    }
  }

  s.delta1_exact = d1.value();
  s.delta2_exact = d2.value();
  s.delta_total_exact = s.delta1_exact + s.delta2_exact;
  s.delta1_paper = p1.value();
  s.delta2_paper = p2.value();
  s.gravity_work_total = work.value();
  s.dissipation_total = dissipation.value();
  s.final_elastic_box1 = energy1.value();
  s.final_elastic_box2 = energy2.value();
  return s;
}

bool AuditReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AuditCheck& c) { return c.passed; });
}

const AuditCheck* AuditReport::find(std::string_view name) const {
  const auto it = std::find_if(checks.begin(), checks.end(),
                               [&](const AuditCheck& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

AuditReport audit_ledger(const TransferSummary& summary, const SpringBoxParams& params,
                         const TransferPlan& plan) {
  plan.check_consistent(params);

  AuditReport report;
  report.tolerance = kAuditTolerance;
  auto& out = report.checks;

  const EnergyBreakdown expected = energy_breakdown(params);
  const double initial = expected.initial_total;
  const double dN = static_cast<double>(plan.drop_count());
  const double kq2 = params.stiffness * plan.step() * plan.step();

  if (summary.drop_count != plan.drop_count()) {
    out.push_back(AuditCheck{"drop_count", false,
                             std::abs(static_cast<double>(summary.drop_count) - dN), 1.0});
  }
  if (summary.records_retained) audit_records(summary, params, plan, out, initial);

  out.push_back(compare("delta_total_sum", summary.delta_total_exact,
                        summary.delta1_exact + summary.delta2_exact, initial));
  out.push_back(compare("half_energy_loss", summary.delta_total_exact, -0.5 * initial, initial));
  out.push_back(compare_relative("delta1_closed_form", summary.delta1_exact,
                                 -3.0 * dN * dN * kq2 / 8.0));
  out.push_back(compare_relative("delta2_closed_form", summary.delta2_exact,
                                 dN * dN * kq2 / 8.0));
  out.push_back(compare("work_minus_dissipation",
                        summary.gravity_work_total - summary.dissipation_total,
                        summary.delta_total_exact, initial));
  out.push_back(compare_relative("dissipation_closed_form", summary.dissipation_total,
                                 0.5 * dN * kq2));
  out.push_back(compare("gravity_work_closed_form", summary.gravity_work_total,
                        (0.5 * dN - 0.25 * dN * dN) * kq2, initial));
  out.push_back(compare_relative("final_energy_box1", summary.final_elastic_box1,
                                 expected.final_per_box));
  out.push_back(compare_relative("final_energy_box2", summary.final_elastic_box2,
                                 expected.final_per_box));
  out.push_back(compare_relative("delta1_paper_matches_model", summary.delta1_paper,
                                 delta1_paper_sum(params, plan)));
  out.push_back(compare_relative("delta2_paper_matches_model", summary.delta2_paper,
                                 delta2_paper_sum(params, plan)));
  return report;
}

std::vector<ConvergenceRow> convergence_sweep(const SpringBoxParams& params,
                                              std::span<const std::uint64_t> drop_counts,
                                              unsigned jobs) {
  params.validate();
  if (drop_counts.empty()) throw DomainError("sweep needs at least one drop count");
  for (std::size_t i = 0; i < drop_counts.size(); ++i) {
    // Builds a plan only to surface the even / range errors.
    (void)TransferPlan::liquid(params, drop_counts[i]);
    if (i > 0 && drop_counts[i] <= drop_counts[i - 1]) {
      throw DomainError("sweep drop counts must be strictly increasing");
    }
  }

  const double initial = energy_breakdown(params).initial_total;
  std::vector<ConvergenceRow> rows(drop_counts.size());
  std::vector<std::exception_ptr> errors(drop_counts.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < drop_counts.size(); i = next.fetch_add(1)) {
      try {
        const TransferPlan plan = TransferPlan::liquid(params, drop_counts[i]);
        const TransferSummary s =
            simulate_transfer(params, plan, SimulateOptions{.max_retained_records = 0});
        ConvergenceRow& row = rows[i];
        row.drop_count = drop_counts[i];
        row.relative_error_delta1 = std::abs(s.delta1_paper - s.delta1_exact) / initial;
        row.relative_error_delta2 = std::abs(s.delta2_paper - s.delta2_exact) / initial;
        row.relative_error_total =
            std::abs((s.delta1_paper + s.delta2_paper) - s.delta_total_exact) / initial;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const unsigned workers = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(drop_counts.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DomainError("slope fit needs two or more paired samples");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log fit needs positive samples");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("log-log fit needs distinct x values");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace twobox
