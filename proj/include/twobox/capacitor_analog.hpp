#pragma once

#include <vector>

#include "twobox/core_model.hpp"

namespace twobox {

/// Two identical capacitors joined through a series resistor. All charge
/// starts on capacitor 1. `resistance == 0` is the ideal circuit, for which
/// only the endpoint energies are defined.
struct CapacitorCircuit {
  double capacitance = 0.0;     // F, per capacitor
  double initial_charge = 0.0;  // C
  double resistance = 0.0;      // ohm

  void validate() const;

  friend bool operator==(const CapacitorCircuit&, const CapacitorCircuit&) = default;
};

/// Conversion factors of the mechanical-electrical dictionary:
///   Q = charge_per_weight * M g
///   C = capacitance_per_stiffness * k
///   V = Q / C = voltage_per_displacement * X
/// All are 1 in SI, which makes Q^2/(2C) equal (Mg)^2/(2k).
struct AnalogyMap {
  double charge_per_weight = 1.0;          // C per N
  double capacitance_per_stiffness = 1.0;  // F per (N/m)
  double voltage_per_displacement = 1.0;   // V per m
};

inline constexpr AnalogyMap kAnalogyMap{};

EnergyBreakdown capacitor_energy_breakdown(const CapacitorCircuit& circuit);

/// tau = R C / 2, the decay time of the charge imbalance q1 - q2.
double rc_time_constant(const CapacitorCircuit& circuit);

struct RcState {
  double q1 = 0.0;
  double q2 = 0.0;
  double power_dissipated = 0.0;  // W
};

RcState rc_transient_closed_form(const CapacitorCircuit& circuit, double t);

/// Energy turned into heat in [0, t]: Q0^2/(4C) (1 - exp(-2t/tau)).
double rc_dissipated_closed_form(const CapacitorCircuit& circuit, double t);

struct RcSample {
  double t = 0.0;
  double q1 = 0.0;
  double q2 = 0.0;
  double cumulative_dissipated = 0.0;  // J
};

/// Classical fourth-order Runge-Kutta on (q1, q2, dissipated energy) with
/// dq1/dt = -I, dq2/dt = I, I = (q1 - q2) / (R C). Requires
/// 0 < step <= tau/50 and horizon >= 10 tau. Samples start at t = 0 and
/// advance by exactly `step` until t >= horizon.
std::vector<RcSample> rc_transient_numeric(const CapacitorCircuit& circuit, double step,
                                           double horizon);

/// Q0 = M g, C = k, R = 0.
CapacitorCircuit mechanical_to_electrical(const SpringBoxParams& params);

/// M = Q0 / g, k = C.
SpringBoxParams electrical_to_mechanical(const CapacitorCircuit& circuit, double gravity);

}  // namespace twobox
