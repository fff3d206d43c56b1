#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "cdim/philox.hpp"

namespace {

using cdim::Philox4x32;
using cdim::PhiloxStream;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswers) {
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}),
            (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, BlockIsConstexpr) {
  constexpr auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
  static_assert(out[0] == 0x6627e8d5u);
}

TEST(PhiloxStream, Deterministic) {
  PhiloxStream a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.uniform(), b.uniform());
  EXPECT_EQ(a.blocks_consumed(), 500u);
}

TEST(PhiloxStream, StreamsAndSeedsDiffer) {
  PhiloxStream a(42, 0), b(42, 1), c(43, 0);
  const double x = a.uniform(), y = b.uniform(), z = c.uniform();
  EXPECT_NE(x, y);
  EXPECT_NE(x, z);
}

TEST(PhiloxStream, UnitIntervalMoments) {
  PhiloxStream s(7, 0);
  const int n = 200000;
  double sum = 0, sum_sq = 0, lo = 1, hi = 0;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    sum_sq += u * u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  // Mean 1/2 with sd sqrt(1/12/n); second moment 1/3 with sd ~ sqrt(4/45/n).
  EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum_sq / n, 1.0 / 3, 5 * std::sqrt(4.0 / 45 / n));
  EXPECT_LT(lo, 1e-4);
  EXPECT_GT(hi, 1 - 1e-4);
}

TEST(PhiloxStream, ScaledRange) {
  PhiloxStream s(9, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = s.uniform(-2.0, 3.0);
    ASSERT_GE(u, -2.0);
    ASSERT_LT(u, 3.0);
  }
}

}  // namespace
