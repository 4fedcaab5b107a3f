// SPDX-License-Identifier: Apache-2.0

#include "hpfas/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace hpfas;

TEST_SUITE("rng")
{
  TEST_CASE("Philox4x64-10 words match numpy.random.Philox")
  {
    // numpy.random.Philox(key=[12345, 0], counter=[2**64 - 1, 7, 0, 0]).random_raw(8);
    // numpy increments the counter before its first block, so this is blocks 0 and 1 of stream 7.
    const std::uint64_t expected[8] = {0x98d875fdaa3f88e5ULL, 0xec2fa6b287f0f48fULL, 0x53e3b3dac811d6fcULL,
                                       0xe4a61c200577d082ULL, 0x37c9bd67647bcc31ULL, 0x20366bd661829330ULL,
                                       0xd91b8987fee70692ULL, 0x85b0b7b36aa3c219ULL};
    RngStream rng(12345, 7);
    for (std::uint64_t w : expected)
      CHECK(rng.next_u64() == w);
    CHECK(rng.draws() == 8);
  }

  TEST_CASE("streams are reproducible and distinct")
  {
    RngStream a(1, 0);
    RngStream b(1, 0);
    RngStream c(1, 1);
    RngStream d(2, 0);
    for (int i = 0; i < 16; ++i) {
      const std::uint64_t x = a.next_u64();
      CHECK(x == b.next_u64());
      CHECK(x != c.next_u64());
      CHECK(x != d.next_u64());
    }
  }

  TEST_CASE("uniform lies in the open unit interval and has the right moments")
  {
    RngStream rng(3, 4);
    const int n = 200000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform();
      REQUIRE(u > 0.0);
      REQUIRE(u < 1.0);
      sum += u;
      sum2 += u * u;
    }
    CHECK(std::abs(sum / n - 0.5) < 3.0 * std::sqrt(1.0 / 12.0 / n));
    CHECK(std::abs(sum2 / n - 1.0 / 3.0) < 0.005);
  }

  TEST_CASE("normal_pair draws two uniforms and gives independent standard normals")
  {
    RngStream rng(5, 6);
    const int n = 200000;
    double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
      const std::complex<double> z = rng.normal_pair();
      sx += z.real();
      sy += z.imag();
      sxx += z.real() * z.real();
      syy += z.imag() * z.imag();
      sxy += z.real() * z.imag();
    }
    CHECK(rng.draws() == 2u * n);
    const double se = 1.0 / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sx / n) < 4.0 * se);
    CHECK(std::abs(sy / n) < 4.0 * se);
    CHECK(std::abs(sxx / n - 1.0) < 4.0 * std::sqrt(2.0) * se);
    CHECK(std::abs(syy / n - 1.0) < 4.0 * std::sqrt(2.0) * se);
    CHECK(std::abs(sxy / n) < 4.0 * se);
  }
}
