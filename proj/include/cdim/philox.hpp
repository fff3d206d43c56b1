#pragma once

// Philox4x32-10 counter-based generator. Every output block is a pure
// function of (key, counter), so a Monte Carlo run split into streams is
// reproducible regardless of how the streams are scheduled.

#include <array>
#include <cstdint>

namespace cdim {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Sequential reader over stream `stream` of generator `seed`: the k-th
/// 128-bit block uses counter (k_lo, k_hi, 0, stream).
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint32_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    if (slot_ == 2) refill();
    const std::uint64_t bits = buffer_[slot_++];
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  std::uint64_t blocks_consumed() const noexcept { return index_; }

 private:
  void refill() noexcept {
    const Philox4x32::Counter c{static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32), 0u,
                                stream_};
    const auto out = Philox4x32::block(c, key_);
    buffer_[0] = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    buffer_[1] = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
    ++index_;
    slot_ = 0;
  }

  Philox4x32::Key key_;
  std::uint32_t stream_;
  std::uint64_t index_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int slot_ = 2;
};

}  // namespace cdim
