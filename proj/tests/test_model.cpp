// SPDX-License-Identifier: Apache-2.0

#include "hpfas/errors.hpp"
#include "hpfas/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hpfas;

namespace {

constexpr double kPi = std::numbers::pi;

// Written out from the definitions with the Fig. 2 numbers substituted by hand.
double fig2_C(double distance2, double gamma_lin)
{
  const double lambda = 299792458.0 / 28e9;
  const double eta0 = lambda * lambda / (16.0 * kPi * kPi);
  const double noise = 1e-11;                 // -80 dBm
  const double power = std::pow(10.0, -0.5) * 0.1; // 15 dBm = 31.62 mW
  return 2.0 * 8.0 * gamma_lin * noise * std::pow(distance2, 1.25) / (power * eta0 * 0.03);
}

double raw_delta(double C, int L, double mu2)
{
  const double a = (L - 1) / std::sqrt(2.0 * kPi);
  const double sc = std::sqrt(C);
  return std::sqrt((1.0 - mu2) / mu2) * (sc + (a * sc + 0.5) / (0.5 * a + 0.5 / sc - sc));
}

} // namespace

TEST_SUITE("model")
{
  TEST_CASE("unit conversions")
  {
    CHECK(units::dbm_to_watts(30.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(units::dbm_to_watts(-80.0) == doctest::Approx(1e-11).epsilon(1e-14));
    CHECK(units::watts_to_dbm(units::dbm_to_watts(15.0)) == doctest::Approx(15.0).epsilon(1e-14));
    CHECK(units::db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(units::linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-15));
  }

  TEST_CASE("SystemParams defaults and validation")
  {
    const SystemParams p;
    CHECK(p.mu2() == doctest::Approx(0.97).epsilon(1e-14));
    CHECK(p.wavelength() == doctest::Approx(299792458.0 / 28e9).epsilon(1e-15));
    CHECK(p.guided_wavelength() == doctest::Approx(p.wavelength() / 1.4).epsilon(1e-15));
    CHECK(p.eta0() == doctest::Approx(p.wavelength() * p.wavelength() / (16.0 * kPi * kPi)).epsilon(1e-15));
    CHECK_NOTHROW(p.validate());
    SystemParams bad = p;
    bad.correlation = 1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.waveguide_height = -1.0;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad = p;
    bad.rician_factor = -0.1;
    CHECK_THROWS_AS(bad.validate(), ValidationError);
  }

  TEST_CASE("BlockStructure")
  {
    const BlockStructure b{7, {3, 2, 2}};
    CHECK_NOTHROW(b.validate());
    CHECK(b.num_blocks() == 3);
    CHECK(b.multiplicities() == std::map<int, int>{{2, 2}, {3, 1}});
    CHECK(b.port_to_block() == std::vector<int>{0, 0, 0, 1, 1, 2, 2});
    CHECK_THROWS_AS((BlockStructure{7, {3, 3}}.validate()), ValidationError);
    CHECK_THROWS_AS((BlockStructure{0, {}}.validate()), ValidationError);
    CHECK(BlockStructure::uniform(20, 4).block_sizes == std::vector<int>{5, 5, 5, 5});
    CHECK(BlockStructure::single_port().num_ports == 1);
  }

  TEST_CASE("threshold_C")
  {
    SystemParams p = SystemParams::single_user_sweep_preset();
    p.snr_threshold = 0.0;
    CHECK(threshold_C(p, 5.0) == 0.0);

    p = SystemParams::single_user_sweep_preset();
    const double c1 = threshold_C(p, 5.0);
    p.tx_power *= 2.0;
    CHECK(threshold_C(p, 5.0) == doctest::Approx(0.5 * c1).epsilon(1e-15));

    CHECK(c1 == doctest::Approx(fig2_C(25.0 + 9.0, 10.0)).epsilon(1e-12));
  }

  TEST_CASE("threshold_C_tilde")
  {
    const SystemParams p = SystemParams::single_user_sweep_preset();
    CHECK(threshold_C_tilde(p, 0.5 * p.region_x, 3.0) == doctest::Approx(threshold_C(p, 3.0)).epsilon(1e-15));
    CHECK(threshold_C_tilde(p, 0.0, 0.0) == doctest::Approx(fig2_C(100.0 + 9.0, 10.0)).epsilon(1e-12));

    // Fig. 3 configuration at P_t = 15 dBm, user at (4, -7).
    SystemParams q = SystemParams::power_sweep_preset();
    q.tx_power = units::dbm_to_watts(15.0);
    const double lambda = 299792458.0 / 28e9;
    const double eta0 = lambda * lambda / (16.0 * kPi * kPi);
    const double d2 = (4.0 - 15.0) * (4.0 - 15.0) + 49.0 + 16.0;
    const double expected = 2.0 * 6.0 * 10.0 * 1e-11 * std::pow(d2, 1.25) / (std::pow(10.0, -0.5) * 0.1 * eta0 * 0.03);
    CHECK(threshold_C_tilde(q, 4.0, -7.0) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("gamma_tilde variants")
  {
    const ScenarioTwoUser s{SystemParams::two_user_preset(), BlockStructure{}, 0.0, 0.0};
    const double h = s.params.waveguide_height;
    const double D1 = s.params.region_x;
    const double D2 = s.params.region_y;
    const double g = s.params.snr_threshold;

    const Eigen::Vector3d user(3.0, s.pa1_y(), 0.0);
    const double far = gamma_tilde_mu(s, user, {3.0, s.pa1_y(), h}, {20.0, s.pa2_y(), h});
    CHECK(far < g);

    const double ratio = std::pow(h * h / (0.25 * D2 * D2 + h * h), 1.25) * g;
    CHECK(gamma_tilde_aligned(s, 7.0, 7.0, -0.25 * D2) == doctest::Approx(ratio).epsilon(1e-14));

    const double x1 = 4.0;
    const double y1 = -9.0;
    const double num = (x1 - 0.5 * D1) * (x1 - 0.5 * D1) + (y1 + 0.25 * D2) * (y1 + 0.25 * D2) + h * h;
    const double den = (x1 - 0.5 * D1) * (x1 - 0.5 * D1) + (y1 - 0.25 * D2) * (y1 - 0.25 * D2) + h * h;
    CHECK(gamma_tilde_fixed(s, x1, y1) == doctest::Approx(std::pow(num / den, 1.25) * g).epsilon(1e-14));
  }

  TEST_CASE("sfa_delta")
  {
    const double mu = std::sqrt(0.97);
    // L = 1 drops the (L - 1) terms.
    for (double C : {1e-4, 0.01, 0.2}) {
      const double sc = std::sqrt(C);
      const double expected = std::sqrt(0.03 / 0.97) * (sc + 0.5 / (0.5 / sc - sc));
      CHECK(sfa_delta_from_C(C, 1, mu).value == doctest::Approx(expected).epsilon(1e-13));
    }
    // Increasing in C while the denominator stays positive (below ~1.47 for L = 5).
    double prev = 0.0;
    for (double C = 0.01; C < 1.4; C += 0.01) {
      const SfaThreshold d = sfa_delta_from_C(C, 5, mu);
      CHECK(d.value > prev);
      prev = d.value;
    }
    // Fig. 2 configuration, L = 5, 10 dB, phi_y = 5.
    const SystemParams p = SystemParams::single_user_sweep_preset();
    const double raw = raw_delta(fig2_C(34.0, 10.0), 5, 0.97);
    const SfaThreshold d = sfa_delta(5.0, 5, p);
    CHECK(d.value == doctest::Approx(std::max(0.0, raw)).epsilon(1e-12));
    CHECK(d.clamped == (raw < 0.0));
  }

  TEST_CASE("sfa_delta near the pole of its denominator")
  {
    const double mu = std::sqrt(0.97);
    // Root of (L-1)/(2 sqrt(2 pi)) + 1/(2 sqrt C) - sqrt C = 0 for L = 5.
    const double a = 4.0 / (2.0 * std::sqrt(2.0 * kPi));
    const double root = 0.5 * (a + std::sqrt(a * a + 2.0));
    const SfaThreshold d = sfa_delta_from_C(root * root, 5, mu);
    CHECK(d.degenerate);
    CHECK(std::isfinite(d.value));
    CHECK(sfa_delta_from_C(4.0, 5, mu).clamped);
    CHECK(sfa_delta_from_C(4.0, 5, mu).value == 0.0);
    CHECK(sfa_delta_from_C(0.0, 5, mu).value == 0.0);
  }

  TEST_CASE("sfa_delta_mu")
  {
    const double mu = std::sqrt(0.97);
    const double m = 0.03 / 0.97;
    // L = 1: the fraction reduces to (1/(2 delta)) / 2.
    for (double r : {0.0, 1.0, 20.0}) {
      const double u = 0.97 * r / (2.0 * 0.03 * 3.0);
      const double delta = std::sqrt(u) + std::sqrt(u + 0.5 / 3.0);
      const double inner = delta + 0.5 / (2.0 * delta);
      CHECK(sfa_delta_mu(r, 1, 3.0, mu) == doctest::Approx(m * inner * inner).epsilon(1e-13));
    }
    // r = 0, gamma_tilde = 1: delta(0) = sqrt(1/2).
    const double d0 = std::sqrt(0.5);
    CHECK(sfa_delta_mu(0.0, 1, 1.0, mu) == doctest::Approx(m * std::pow(d0 + 0.25 / d0, 2)).epsilon(1e-13));
    double prev = 0.0;
    for (double r = 0.0; r < 200.0; r += 0.5) {
      const double v = sfa_delta_mu(r, 5, 2.0, mu);
      CHECK(v >= prev);
      prev = v;
    }
    CHECK_THROWS_AS(sfa_delta_mu(-1.0, 1, 1.0, mu), DomainError);
  }
}
