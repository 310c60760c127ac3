#include "twobox/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twobox {
namespace {

constexpr double kPlanTolerance = 1e-12;

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    throw DomainError(std::string(name) + " must be a finite value > 0, got " +
                      std::to_string(value));
  }
}

void check_drop_count(std::uint64_t n) {
  if (n > kMaxDropCount) {
    throw CapacityError("drop count " + std::to_string(n) +
                        " exceeds the supported maximum 2^32");
  }
  if (n < 2 || n % 2 != 0) {
    throw DomainError("drop count must be even and >= 2 (the transfer stops after N/2 drops), got " +
                      std::to_string(n));
  }
}

}  // namespace

void SpringBoxParams::validate() const {
  require_positive(total_mass, "mass");
  require_positive(stiffness, "stiffness");
  require_positive(gravity, "gravity");
}

TransferPlan TransferPlan::liquid(const SpringBoxParams& params, std::uint64_t drop_count) {
  params.validate();
  check_drop_count(drop_count);
  const double m = params.total_mass / static_cast<double>(drop_count);
  const double q = m * params.gravity / params.stiffness;
  return TransferPlan(drop_count, m, q, MassSource::Liquid, std::nullopt);
}

TransferPlan TransferPlan::photon(const SpringBoxParams& params, double photon_energy) {
  params.validate();
  const double m = photon_drop_mass(photon_energy);
  const double exact_count = params.total_mass / m;
  if (!(exact_count <= static_cast<double>(kMaxDropCount) * (1.0 + kPlanTolerance))) {
    throw CapacityError("photon energy " + std::to_string(photon_energy) +
                        " J implies more than 2^32 drops");
  }
  const double rounded = std::round(exact_count);
  if (std::abs(exact_count - rounded) > kPlanTolerance * exact_count) {
    throw DomainError("photon energy does not divide the total mass into a whole number of drops (M c^2 / E = " +
                      std::to_string(exact_count) + ")");
  }
  const auto n = static_cast<std::uint64_t>(rounded);
  check_drop_count(n);
  const double q = m * params.gravity / params.stiffness;
  return TransferPlan(n, m, q, MassSource::Photon, photon_energy);
}

void TransferPlan::check_consistent(const SpringBoxParams& params) const {
  params.validate();
  check_drop_count(drop_count_);
  const double mass = drop_mass_ * static_cast<double>(drop_count_);
  if (relative_difference(mass, params.total_mass) > kPlanTolerance) {
    throw DomainError("plan inconsistent with params: drop_mass * drop_count != mass");
  }
  if (relative_difference(step_, drop_mass_ * params.gravity / params.stiffness) > kPlanTolerance) {
    throw DomainError("plan inconsistent with params: step != drop_mass * gravity / stiffness");
  }
}

double equilibrium_position(const SpringBoxParams& params, double mass_fraction) {
  params.validate();
  if (!(mass_fraction >= 0.0 && mass_fraction <= 1.0)) {
    throw DomainError("mass fraction must lie in [0, 1], got " + std::to_string(mass_fraction));
  }
  return mass_fraction * params.total_mass * params.gravity / params.stiffness;
}

double elastic_energy(double stiffness, double displacement) {
  require_positive(stiffness, "stiffness");
  if (!std::isfinite(displacement) || displacement < 0.0) {
    throw DomainError("displacement must be a finite magnitude >= 0, got " +
                      std::to_string(displacement));
  }
  return 0.5 * stiffness * displacement * displacement;
}

EnergyBreakdown energy_breakdown(const SpringBoxParams& params) {
  params.validate();
  const double weight = params.total_mass * params.gravity;
  const double half_weight = 0.5 * weight;

  EnergyBreakdown out;
  out.initial_box1 = weight * weight / (2.0 * params.stiffness);
  out.initial_total = out.initial_box1;  // box 2 starts empty
  out.final_per_box = half_weight * half_weight / (2.0 * params.stiffness);
  out.final_total = 2.0 * out.final_per_box;
  out.delta_total = out.final_total - out.initial_total;
  return out;
}

double delta2_paper_sum(const SpringBoxParams& params, const TransferPlan& plan) {
  plan.check_consistent(params);
  const double half = static_cast<double>(plan.transfer_drops());
  const double q = plan.step();
  return 0.5 * half * (1.0 + half) * params.stiffness * q * q;
}

double delta1_paper_sum(const SpringBoxParams& params, const TransferPlan& plan) {
  plan.check_consistent(params);
  const double half = static_cast<double>(plan.transfer_drops());
  const double q = plan.step();
  return -0.5 * half * (1.0 + 3.0 * half) * params.stiffness * q * q;
}

double photon_drop_mass(double photon_energy) {
  require_positive(photon_energy, "photon energy");
  return photon_energy / kSpeedOfLightSquared;
}

double relative_difference(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale == 0.0) return 0.0;
  return std::abs(a - b) / scale;
}

}  // namespace twobox
