#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace twobox {

/// Raised when an input violates a documented precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a drop count exceeds what the ledger engine supports.
class CapacityError : public DomainError {
 public:
  using DomainError::DomainError;
};

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact SI
inline constexpr double kSpeedOfLightSquared = kSpeedOfLight * kSpeedOfLight;
inline constexpr std::uint64_t kMaxDropCount = std::uint64_t{1} << 32;

/// One box hanging on a spring in a uniform gravitational field.
///
/// `total_mass` is the liquid initially held by the first box. Both boxes use
/// the same spring stiffness.
struct SpringBoxParams {
  double total_mass = 0.0;  // kg
  double stiffness = 0.0;   // N/m
  double gravity = 0.0;     // m/s^2

  /// Throws DomainError unless all three fields are finite and > 0.
  void validate() const;

  friend bool operator==(const SpringBoxParams&, const SpringBoxParams&) = default;
};

enum class MassSource { Liquid, Photon };

/// Discretisation of the transfer into equal drops.
///
/// Construct through `liquid` or `photon`; both check the invariants
/// drop_mass * drop_count == total_mass and step == drop_mass * g / k.
class TransferPlan {
 public:
  static TransferPlan liquid(const SpringBoxParams& params, std::uint64_t drop_count);

  /// Each drop carries the mass equivalent E/c^2 of one photon. The drop count
  /// is M c^2 / E and must come out as an even integer.
  static TransferPlan photon(const SpringBoxParams& params, double photon_energy);

  std::uint64_t drop_count() const { return drop_count_; }
  double drop_mass() const { return drop_mass_; }
  double step() const { return step_; }
  MassSource mass_source() const { return source_; }
  std::optional<double> photon_energy() const { return photon_energy_; }

  /// Number of drops that cross before both boxes hold M/2.
  std::uint64_t transfer_drops() const { return drop_count_ / 2; }

  /// Throws DomainError if this plan was not built for `params`.
  void check_consistent(const SpringBoxParams& params) const;

 private:
  TransferPlan(std::uint64_t n, double m, double q, MassSource s, std::optional<double> e)
      : drop_count_(n), drop_mass_(m), step_(q), source_(s), photon_energy_(e) {}

  std::uint64_t drop_count_;
  double drop_mass_;
  double step_;
  MassSource source_;
  std::optional<double> photon_energy_;
};

/// Elastic energies of both springs before and after the transfer.
struct EnergyBreakdown {
  double initial_total = 0.0;
  double initial_box1 = 0.0;
  double final_per_box = 0.0;
  double final_total = 0.0;
  double delta_total = 0.0;
};

/// Magnitude of the spring extension when the box holds `mass_fraction * M`.
double equilibrium_position(const SpringBoxParams& params, double mass_fraction);

/// k x^2 / 2.
double elastic_energy(double stiffness, double displacement);

EnergyBreakdown energy_breakdown(const SpringBoxParams& params);

/// Large-n approximate gain of box 2, summed over N/2 drops:
/// (1/2)(N/2)(1 + N/2) k q^2.
double delta2_paper_sum(const SpringBoxParams& params, const TransferPlan& plan);

/// Large-n approximate loss of box 1, summed over N/2 drops:
/// -(1/2)(N/2)(1 + 3N/2) k q^2.
double delta1_paper_sum(const SpringBoxParams& params, const TransferPlan& plan);

/// Mass equivalent E / c^2 of a photon.
double photon_drop_mass(double photon_energy);

/// |a - b| / max(|a|, |b|), or 0 when both are zero.
double relative_difference(double a, double b);

}  // namespace twobox
