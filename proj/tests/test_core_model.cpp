#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "twobox/core_model.hpp"

using namespace twobox;

namespace {

const SpringBoxParams kUnit{1.0, 100.0, 10.0};  // M = 1 kg, k = 100 N/m, g = 10 m/s^2

SpringBoxParams random_params(std::mt19937_64& rng) {
  return {oracle::log_uniform(rng, 1e-3, 1e3), oracle::log_uniform(rng, 1e-2, 1e4),
          oracle::log_uniform(rng, 0.1, 30.0)};
}

std::uint64_t random_even(std::mt19937_64& rng, std::uint64_t max_half) {
  return 2 * std::uniform_int_distribution<std::uint64_t>(1, max_half)(rng);
}

}  // namespace

TEST_SUITE("core_model") {
  TEST_CASE("equilibrium position follows Mg = kX") {
    CHECK(equilibrium_position(kUnit, 1.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(equilibrium_position(kUnit, 0.5) == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(equilibrium_position({3.0, 7.0, 2.0}, 0.0) == 0.0);
  }

  TEST_CASE("equilibrium position rejects bad inputs") {
    CHECK_THROWS_AS(equilibrium_position(kUnit, -0.1), DomainError);
    CHECK_THROWS_AS(equilibrium_position(kUnit, 1.0000001), DomainError);
    CHECK_THROWS_AS(equilibrium_position(kUnit, std::nan("")), DomainError);
    CHECK_THROWS_AS(equilibrium_position({0.0, 100.0, 10.0}, 0.5), DomainError);
    CHECK_THROWS_AS(equilibrium_position({1.0, -1.0, 10.0}, 0.5), DomainError);
    CHECK_THROWS_AS(equilibrium_position({1.0, 100.0, std::numeric_limits<double>::infinity()}, 0.5),
                    DomainError);
  }

  TEST_CASE("equilibrium position is homogeneous in the mass fraction") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng);
      const double f = frac(rng);
      const double s = frac(rng);
      CHECK(oracle::rel(equilibrium_position(p, s * f), s * equilibrium_position(p, f)) <= 1e-14);
    }
  }

  TEST_CASE("elastic energy") {
    CHECK(elastic_energy(100.0, 0.1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(elastic_energy(200.0, 0.1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(elastic_energy(37.0, 0.0) == 0.0);
    CHECK_THROWS_AS(elastic_energy(100.0, -0.1), DomainError);
    CHECK_THROWS_AS(elastic_energy(0.0, 0.1), DomainError);
    CHECK_THROWS_AS(elastic_energy(-3.0, 0.1), DomainError);
  }

  TEST_CASE("energy breakdown for the unit scenario") {
    const auto e = energy_breakdown(kUnit);
    CHECK(e.initial_total == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(e.initial_box1 == e.initial_total);
    CHECK(e.final_per_box == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(e.final_total == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(e.delta_total == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK_THROWS_AS(energy_breakdown({1.0, 0.0, 10.0}), DomainError);
  }

  TEST_CASE("half the elastic energy goes missing for any params") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 500; ++i) {
      const auto e = energy_breakdown(random_params(rng));
      CHECK(oracle::rel(e.final_total / e.initial_total, 0.5) <= 1e-12);
      CHECK(oracle::rel(e.final_per_box / e.initial_box1, 0.25) <= 1e-12);
      CHECK(oracle::rel(e.delta_total, -0.5 * e.initial_total) <= 1e-12);
      CHECK(e.final_total == 2.0 * e.final_per_box);
      CHECK(e.delta_total == e.final_total - e.initial_total);
    }
  }

  TEST_CASE("scaling law: M -> sM scales energies by s^2, k -> sk by 1/s") {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng);
      const double s = oracle::log_uniform(rng, 0.1, 10.0);
      const auto base = energy_breakdown(p);
      const auto heavy = energy_breakdown({p.total_mass * s, p.stiffness, p.gravity});
      const auto stiff = energy_breakdown({p.total_mass, p.stiffness * s, p.gravity});
      CHECK(oracle::rel(heavy.initial_total, s * s * base.initial_total) <= 1e-13);
      CHECK(oracle::rel(heavy.final_per_box, s * s * base.final_per_box) <= 1e-13);
      CHECK(oracle::rel(heavy.delta_total, s * s * base.delta_total) <= 1e-13);
      CHECK(oracle::rel(stiff.initial_total, base.initial_total / s) <= 1e-13);
      CHECK(oracle::rel(stiff.final_total, base.final_total / s) <= 1e-13);
      CHECK(oracle::rel(stiff.delta_total, base.delta_total / s) <= 1e-13);
    }
  }

  TEST_CASE("transfer plan derives drop mass and step") {
    const auto plan = TransferPlan::liquid(kUnit, 10);
    CHECK(plan.drop_count() == 10);
    CHECK(plan.transfer_drops() == 5);
    CHECK(plan.drop_mass() == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(plan.step() == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(plan.mass_source() == MassSource::Liquid);
    CHECK_FALSE(plan.photon_energy().has_value());
  }

  TEST_CASE("transfer plan invariants hold on random inputs") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng);
      const auto n = random_even(rng, 1'000'000);
      const auto plan = TransferPlan::liquid(p, n);
      CHECK(oracle::rel(plan.drop_mass() * static_cast<double>(n), p.total_mass) <= 1e-12);
      CHECK(oracle::rel(plan.step(), plan.drop_mass() * p.gravity / p.stiffness) <= 1e-12);
      CHECK_NOTHROW(plan.check_consistent(p));
    }
  }

  TEST_CASE("transfer plan rejects odd, tiny and oversized drop counts") {
    CHECK_THROWS_AS(TransferPlan::liquid(kUnit, 11), DomainError);
    CHECK_THROWS_AS(TransferPlan::liquid(kUnit, 1), DomainError);
    CHECK_THROWS_AS(TransferPlan::liquid(kUnit, 0), DomainError);
    CHECK_THROWS_AS(TransferPlan::liquid(kUnit, kMaxDropCount + 2), CapacityError);
    CHECK_NOTHROW(TransferPlan::liquid(kUnit, kMaxDropCount));
    try {
      (void)TransferPlan::liquid(kUnit, 7);
      FAIL("odd N accepted");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("even") != std::string::npos);
    }
  }

  TEST_CASE("a plan built for other params is inconsistent") {
    const auto plan = TransferPlan::liquid(kUnit, 10);
    CHECK_THROWS_AS(plan.check_consistent({2.0, 100.0, 10.0}), DomainError);
    CHECK_THROWS_AS(plan.check_consistent({1.0, 50.0, 10.0}), DomainError);
    CHECK_THROWS_AS(delta2_paper_sum({1.0, 100.0, 9.0}, plan), DomainError);
    CHECK_THROWS_AS(delta1_paper_sum({1.0, 100.0, 9.0}, plan), DomainError);
  }

  TEST_CASE("approximate box-2 sum") {
    CHECK(delta2_paper_sum(kUnit, TransferPlan::liquid(kUnit, 10)) ==
          doctest::Approx(0.15).epsilon(1e-14));
    // N = 2: one drop, (1/2)(1)(2) k q^2 = k q^2 with q = Mg/(2k).
    const auto two = TransferPlan::liquid(kUnit, 2);
    const double q = kUnit.total_mass * kUnit.gravity / (2.0 * kUnit.stiffness);
    CHECK(delta2_paper_sum(kUnit, two) == doctest::Approx(kUnit.stiffness * q * q).epsilon(1e-15));
    // N -> infinity: ratio to E_in tends to 1/4.
    const auto huge = TransferPlan::liquid(kUnit, 2'000'000'000);
    CHECK(delta2_paper_sum(kUnit, huge) / energy_breakdown(kUnit).initial_total ==
          doctest::Approx(0.25).epsilon(1e-8));
  }

  TEST_CASE("approximate box-1 sum") {
    CHECK(delta1_paper_sum(kUnit, TransferPlan::liquid(kUnit, 10)) ==
          doctest::Approx(-0.4).epsilon(1e-14));
    const auto huge = TransferPlan::liquid(kUnit, 2'000'000'000);
    CHECK(delta1_paper_sum(kUnit, huge) / energy_breakdown(kUnit).initial_total ==
          doctest::Approx(-0.75).epsilon(1e-8));
    const auto ten = TransferPlan::liquid(kUnit, 10);
    CHECK(delta1_paper_sum(kUnit, ten) + delta2_paper_sum(kUnit, ten) ==
          doctest::Approx(-0.25).epsilon(1e-14));
  }

  TEST_CASE("approximate sums match direct summation of the per-drop terms") {
    // Box 2 gains n k q^2, box 1 loses (N - n + 1) k q^2 on drop n.
    for (std::uint64_t n_total = 2; n_total <= 200; n_total += 2) {
      const auto plan = TransferPlan::liquid(kUnit, n_total);
      const double kq2 = kUnit.stiffness * plan.step() * plan.step();
      std::int64_t gain = 0, loss = 0;
      for (std::int64_t n = 1; n <= static_cast<std::int64_t>(n_total / 2); ++n) {
        gain += n;
        loss -= static_cast<std::int64_t>(n_total) - n + 1;
      }
      CHECK(oracle::rel(delta2_paper_sum(kUnit, plan), static_cast<double>(gain) * kq2) <= 1e-13);
      CHECK(oracle::rel(delta1_paper_sum(kUnit, plan), static_cast<double>(loss) * kq2) <= 1e-13);
    }
  }

  TEST_CASE("finite-N corrections cancel in the approximate total") {
    std::mt19937_64 rng(12);
    for (int i = 0; i < 300; ++i) {
      const auto p = random_params(rng);
      const auto plan = TransferPlan::liquid(p, random_even(rng, 50'000'000));
      const double e_in = energy_breakdown(p).initial_total;
      const double total = delta1_paper_sum(p, plan) + delta2_paper_sum(p, plan);
      CHECK(oracle::rel(total, -0.5 * e_in) <= 1e-12);
    }
  }

  TEST_CASE("box-2 approximation error relative to E_in is 1/(2N)") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 300; ++i) {
      const auto p = random_params(rng);
      const auto n = random_even(rng, 500'000);
      const auto plan = TransferPlan::liquid(p, n);
      const double e_in = energy_breakdown(p).initial_total;
      const double err = std::abs(delta2_paper_sum(p, plan) - e_in / 4.0) / e_in;
      CHECK(std::abs(err - 1.0 / (2.0 * static_cast<double>(n))) <= 1e-9);
    }
  }

  TEST_CASE("photon mass equivalent") {
    CHECK(photon_drop_mass(kSpeedOfLightSquared) == 1.0);
    CHECK(photon_drop_mass(8.987551787368176e16) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(photon_drop_mass(1.0) == doctest::Approx(1.1126500560536185e-17).epsilon(1e-15));
    CHECK_THROWS_AS(photon_drop_mass(0.0), DomainError);
    CHECK_THROWS_AS(photon_drop_mass(-1.0), DomainError);
  }

  TEST_CASE("photon plan divides the mass into photon-sized drops") {
    const double energy = 1e-19;  // J, a visible photon
    const double m = energy / kSpeedOfLightSquared;
    const SpringBoxParams p{1000.0 * m, 1e-9, 9.81};
    const auto plan = TransferPlan::photon(p, energy);
    CHECK(plan.drop_count() == 1000);
    CHECK(plan.mass_source() == MassSource::Photon);
    CHECK(plan.photon_energy() == energy);
    CHECK(plan.drop_mass() == m);
    CHECK_NOTHROW(plan.check_consistent(p));

    CHECK_THROWS_AS(TransferPlan::photon({1001.0 * m, 1e-9, 9.81}, energy), DomainError);  // odd
    CHECK_THROWS_AS(TransferPlan::photon({1000.5 * m, 1e-9, 9.81}, energy), DomainError);  // fractional
    CHECK_THROWS_AS(TransferPlan::photon({1.0, 1.0, 9.81}, energy), CapacityError);
  }
}
