#include "twobox/capacitor_analog.hpp"

#include <cmath>
#include <string>

namespace twobox {
namespace {

constexpr double kSlack = 1e-12;

void require_transient(const CapacitorCircuit& circuit) {
  circuit.validate();
  if (!(circuit.resistance > 0.0)) {
    throw DomainError("transient requires resistance > 0; the ideal circuit only has endpoint energies");
  }
}

struct Derivative {
  double dq1;
  double dq2;
  double power;
};

Derivative rhs(double q1, double q2, double capacitance, double resistance) {
  const double current = (q1 - q2) / (resistance * capacitance);
  return {-current, current, current * current * resistance};
}

}  // namespace

void CapacitorCircuit::validate() const {
  if (!std::isfinite(capacitance) || !(capacitance > 0.0)) {
    throw DomainError("capacitance must be a finite value > 0, got " + std::to_string(capacitance));
  }
  if (!std::isfinite(initial_charge) || !(initial_charge > 0.0)) {
    throw DomainError("charge must be a finite value > 0, got " + std::to_string(initial_charge));
  }
  if (!std::isfinite(resistance) || resistance < 0.0) {
    throw DomainError("resistance must be a finite value >= 0, got " + std::to_string(resistance));
  }
}

EnergyBreakdown capacitor_energy_breakdown(const CapacitorCircuit& circuit) {
  circuit.validate();
  const double c = circuit.capacitance;
  const double q0 = circuit.initial_charge;
  const double half = 0.5 * q0;  // charge conservation plus equal voltages

  EnergyBreakdown out;
  out.initial_box1 = q0 * q0 / (2.0 * c);
  out.initial_total = out.initial_box1;
  out.final_per_box = half * half / (2.0 * c);
  out.final_total = 2.0 * out.final_per_box;
  out.delta_total = out.final_total - out.initial_total;
  return out;
}

double rc_time_constant(const CapacitorCircuit& circuit) {
  require_transient(circuit);
  return 0.5 * circuit.resistance * circuit.capacitance;
}

RcState rc_transient_closed_form(const CapacitorCircuit& circuit, double t) {
  const double tau = rc_time_constant(circuit);
  if (!(t >= 0.0)) throw DomainError("time must be >= 0, got " + std::to_string(t));
  const double decay = std::exp(-t / tau);
  const double q0 = circuit.initial_charge;

  RcState s;
  s.q1 = 0.5 * q0 * (1.0 + decay);
  s.q2 = 0.5 * q0 * (1.0 - decay);
  const double current = (s.q1 / circuit.capacitance - s.q2 / circuit.capacitance) / circuit.resistance;
  s.power_dissipated = current * current * circuit.resistance;
  return s;
}

double rc_dissipated_closed_form(const CapacitorCircuit& circuit, double t) {
  const double tau = rc_time_constant(circuit);
  if (!(t >= 0.0)) throw DomainError("time must be >= 0, got " + std::to_string(t));
  const double q0 = circuit.initial_charge;
  return q0 * q0 / (4.0 * circuit.capacitance) * -std::expm1(-2.0 * t / tau);
}

std::vector<RcSample> rc_transient_numeric(const CapacitorCircuit& circuit, double step,
                                           double horizon) {
  const double tau = rc_time_constant(circuit);
  if (!(step > 0.0) || step > tau / 50.0 * (1.0 + kSlack)) {
    throw DomainError("step must satisfy 0 < step <= tau/50 (tau = " + std::to_string(tau) +
                      " s), got " + std::to_string(step));
  }
  if (!std::isfinite(horizon) || horizon < 10.0 * tau * (1.0 - kSlack)) {
    throw DomainError("horizon must be >= 10 tau (tau = " + std::to_string(tau) + " s), got " +
                      std::to_string(horizon));
  }

  const auto steps = static_cast<std::size_t>(std::ceil(horizon / step * (1.0 - kSlack)));
  const double c = circuit.capacitance;
  const double r = circuit.resistance;
  const double h = step;

  std::vector<RcSample> out;
  out.reserve(steps + 1);
  double q1 = circuit.initial_charge;
  double q2 = 0.0;
  double heat = 0.0;
  out.push_back({0.0, q1, q2, heat});

  for (std::size_t i = 1; i <= steps; ++i) {
    const Derivative k1 = rhs(q1, q2, c, r);
    const Derivative k2 = rhs(q1 + 0.5 * h * k1.dq1, q2 + 0.5 * h * k1.dq2, c, r);
    const Derivative k3 = rhs(q1 + 0.5 * h * k2.dq1, q2 + 0.5 * h * k2.dq2, c, r);
    const Derivative k4 = rhs(q1 + h * k3.dq1, q2 + h * k3.dq2, c, r);

    // dq2 = -dq1 at every stage, so one shared increment keeps q1 + q2 fixed.
    const double transferred = h / 6.0 * (k1.dq2 + 2.0 * k2.dq2 + 2.0 * k3.dq2 + k4.dq2);
    q1 -= transferred;
    q2 += transferred;
    heat += h / 6.0 * (k1.power + 2.0 * k2.power + 2.0 * k3.power + k4.power);
    out.push_back({static_cast<double>(i) * h, q1, q2, heat});
  }
  return out;
}

CapacitorCircuit mechanical_to_electrical(const SpringBoxParams& params) {
  params.validate();
  CapacitorCircuit circuit;
  circuit.initial_charge = kAnalogyMap.charge_per_weight * params.total_mass * params.gravity;
  circuit.capacitance = kAnalogyMap.capacitance_per_stiffness * params.stiffness;
  circuit.resistance = 0.0;
  return circuit;
}

SpringBoxParams electrical_to_mechanical(const CapacitorCircuit& circuit, double gravity) {
  circuit.validate();
  if (!std::isfinite(gravity) || !(gravity > 0.0)) {
    throw DomainError("gravity must be a finite value > 0, got " + std::to_string(gravity));
  }
  SpringBoxParams params;
  params.total_mass = circuit.initial_charge / kAnalogyMap.charge_per_weight / gravity;
  params.stiffness = circuit.capacitance / kAnalogyMap.capacitance_per_stiffness;
  params.gravity = gravity;
  return params;
}

}  // namespace twobox
