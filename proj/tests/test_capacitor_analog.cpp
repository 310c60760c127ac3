#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "twobox/capacitor_analog.hpp"

using namespace twobox;

namespace {

double max_q1_error(const CapacitorCircuit& c, double step, double horizon) {
  double worst = 0.0;
  for (const auto& s : rc_transient_numeric(c, step, horizon)) {
    worst = std::max(worst, std::abs(s.q1 - rc_transient_closed_form(c, s.t).q1));
  }
  return worst;
}

}  // namespace

TEST_SUITE("capacitor_analog") {
  TEST_CASE("two-capacitor energies") {
    const auto unit = capacitor_energy_breakdown({1.0, 1.0, 0.0});
    CHECK(unit.initial_total == 0.5);
    CHECK(unit.final_total == 0.25);
    CHECK(unit.final_per_box == 0.125);
    CHECK(unit.delta_total == -0.25);

    const auto other = capacitor_energy_breakdown({2.0, 4.0, 0.0});
    CHECK(other.initial_total == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(other.final_total == doctest::Approx(2.0).epsilon(1e-15));
  }

  TEST_CASE("half the field energy is lost for any circuit") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 500; ++i) {
      const CapacitorCircuit c{oracle::log_uniform(rng, 1e-12, 1e3), oracle::log_uniform(rng, 1e-9, 1e3),
                               oracle::log_uniform(rng, 1e-3, 1e6)};
      const auto e = capacitor_energy_breakdown(c);
      CHECK(oracle::rel(e.final_total / e.initial_total, 0.5) <= 1e-12);
      CHECK(oracle::rel(e.delta_total / e.initial_total, -0.5) <= 1e-12);
    }
  }

  TEST_CASE("circuit validation") {
    CHECK_THROWS_AS(capacitor_energy_breakdown({0.0, 1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(capacitor_energy_breakdown({1.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(capacitor_energy_breakdown({1.0, 1.0, -1.0}), DomainError);
    CHECK_NOTHROW(capacitor_energy_breakdown({1.0, 1.0, 0.0}));
  }

  TEST_CASE("closed-form transient endpoints") {
    const CapacitorCircuit c{2.0, 3.0, 5.0};
    const auto start = rc_transient_closed_form(c, 0.0);
    CHECK(start.q1 == 3.0);
    CHECK(start.q2 == 0.0);
    CHECK(start.power_dissipated == doctest::Approx(9.0 / (5.0 * 4.0)).epsilon(1e-15));

    const auto end = rc_transient_closed_form(c, 1000.0 * rc_time_constant(c));
    CHECK(end.q1 == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(end.q2 == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(end.power_dissipated <= 1e-300);
    CHECK(rc_time_constant(c) == 5.0);
  }

  TEST_CASE("closed-form power integrates to Q0^2/(4C)") {
    const CapacitorCircuit c{1.0, 1.0, 7.0};
    const double tau = rc_time_constant(c);
    const double heat = oracle::simpson(
        [&](double t) { return rc_transient_closed_form(c, t).power_dissipated; }, 0.0, 60.0 * tau,
        20000);
    CHECK(heat == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(rc_dissipated_closed_form(c, 60.0 * tau) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(rc_dissipated_closed_form(c, 0.0) == 0.0);
  }

  TEST_CASE("transient needs a resistor") {
    const CapacitorCircuit ideal{1.0, 1.0, 0.0};
    CHECK_THROWS_AS(rc_transient_closed_form(ideal, 0.0), DomainError);
    CHECK_THROWS_AS(rc_transient_numeric(ideal, 1e-3, 1.0), DomainError);
    CHECK_THROWS_AS(rc_transient_closed_form({1.0, 1.0, 1.0}, -1.0), DomainError);
  }

  TEST_CASE("numeric transient preconditions") {
    const CapacitorCircuit c{1.0, 1.0, 1.0};
    const double tau = rc_time_constant(c);
    CHECK_THROWS_AS(rc_transient_numeric(c, tau / 49.0, 20.0 * tau), DomainError);
    CHECK_THROWS_AS(rc_transient_numeric(c, 0.0, 20.0 * tau), DomainError);
    CHECK_THROWS_AS(rc_transient_numeric(c, tau / 100.0, 9.9 * tau), DomainError);
    CHECK_NOTHROW(rc_transient_numeric(c, tau / 50.0, 10.0 * tau));
  }

  TEST_CASE("numeric transient dissipates Q0^2/(4C)") {
    const CapacitorCircuit c{1.0, 1.0, 1.0};
    const double tau = rc_time_constant(c);
    const auto series = rc_transient_numeric(c, tau / 100.0, 20.0 * tau);
    CHECK(series.size() == 2001);
    CHECK(series.front().t == 0.0);
    CHECK(series.back().t == doctest::Approx(20.0 * tau).epsilon(1e-14));
    CHECK(std::abs(series.back().cumulative_dissipated - 0.25) <= 2.5e-7);
  }

  TEST_CASE("numeric transient conserves charge at every sample") {
    const CapacitorCircuit c{3e-6, 2e-3, 470.0};
    const double tau = rc_time_constant(c);
    for (const auto& s : rc_transient_numeric(c, tau / 100.0, 20.0 * tau)) {
      CHECK(oracle::rel(s.q1 + s.q2, c.initial_charge) <= 1e-12);
    }
  }

  TEST_CASE("dissipated energy does not depend on R") {
    const double reference = 0.25;
    for (double r : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
      const CapacitorCircuit c{1.0, 1.0, r};
      const double tau = rc_time_constant(c);
      const auto series = rc_transient_numeric(c, tau / 100.0, 20.0 * tau);
      INFO("R = " << r);
      CHECK(oracle::rel(series.back().cumulative_dissipated, reference) <= 1e-6);
    }
  }

  TEST_CASE("numeric charges track the closed form with fourth-order error") {
    const CapacitorCircuit c{1.0, 1.0, 1.0};
    const double tau = rc_time_constant(c);
    const double coarse = max_q1_error(c, tau / 100.0, 20.0 * tau);
    const double fine = max_q1_error(c, tau / 400.0, 20.0 * tau);
    CHECK(coarse < 1e-8 * c.initial_charge);
    CHECK(coarse / fine >= 100.0);
  }

  TEST_CASE("mechanical to electrical map") {
    const SpringBoxParams p{1.0, 100.0, 10.0};
    const auto c = mechanical_to_electrical(p);
    CHECK(c.initial_charge == 10.0);
    CHECK(c.capacitance == 100.0);
    CHECK(c.resistance == 0.0);
    CHECK(capacitor_energy_breakdown(c).initial_total == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(electrical_to_mechanical(c, 10.0) == p);
  }

  TEST_CASE("half mass maps to half charge and a quarter of the energy") {
    const SpringBoxParams full{2.0, 40.0, 9.81};
    const SpringBoxParams half{1.0, 40.0, 9.81};
    const auto cf = mechanical_to_electrical(full);
    const auto ch = mechanical_to_electrical(half);
    CHECK(oracle::rel(ch.initial_charge, 0.5 * cf.initial_charge) <= 1e-15);
    CHECK(oracle::rel(capacitor_energy_breakdown(ch).initial_total,
                      0.25 * capacitor_energy_breakdown(cf).initial_total) <= 1e-14);
    CHECK(oracle::rel(energy_breakdown(half).initial_total, 0.25 * energy_breakdown(full).initial_total) <=
          1e-14);
  }

  TEST_CASE("electrical to mechanical map") {
    const auto p = electrical_to_mechanical({100.0, 10.0, 0.0}, 10.0);
    CHECK(p.total_mass == 1.0);
    CHECK(p.stiffness == 100.0);
    CHECK(electrical_to_mechanical({1.0, 1.0, 0.0}, 1.0) == SpringBoxParams{1.0, 1.0, 1.0});
    CHECK_THROWS_AS(electrical_to_mechanical({1.0, 1.0, 0.0}, 0.0), DomainError);
    CHECK_THROWS_AS(electrical_to_mechanical({1.0, 1.0, 0.0}, -9.81), DomainError);
  }

  TEST_CASE("map preserves energy and round-trips on random params") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 500; ++i) {
      const SpringBoxParams p{oracle::log_uniform(rng, 1e-6, 1e6), oracle::log_uniform(rng, 1e-3, 1e6),
                              oracle::log_uniform(rng, 0.01, 100.0)};
      const auto c = mechanical_to_electrical(p);
      CHECK(oracle::rel(capacitor_energy_breakdown(c).initial_total, energy_breakdown(p).initial_total) <=
            1e-12);
      const auto back = electrical_to_mechanical(c, p.gravity);
      CHECK(oracle::rel(back.total_mass, p.total_mass) <= 1e-12);
      CHECK(back.stiffness == p.stiffness);
      CHECK(back.gravity == p.gravity);
      // Voltage Q/C corresponds to the displacement Mg/k.
      CHECK(oracle::rel(c.initial_charge / c.capacitance, equilibrium_position(p, 1.0)) <= 1e-12);
    }
  }
}
