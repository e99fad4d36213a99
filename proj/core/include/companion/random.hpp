// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace companion
{

/// SplitMix64 finaliser; used for seeding and seed derivation.
std::uint64_t mix64(std::uint64_t value) noexcept;

/// Seed for call `call_index` of turn `turn_index` in a session.
std::uint64_t derive_call_seed(std::uint64_t session_seed, std::uint64_t turn_index, std::uint64_t call_index) noexcept;

/// xoshiro256** seeded through SplitMix64. Doubles are built from the top 53
/// bits, so the stream is identical across compilers and standard libraries
/// (unlike <random> distributions).
class RandomSource
{
  public:
    explicit RandomSource(std::uint64_t seed) noexcept;

    [[nodiscard]] std::uint64_t seed() const noexcept { return _seed; }

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1).
    double uniform() noexcept;
    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) noexcept;

    /// Independent stream keyed by `stream`; does not advance this source.
    [[nodiscard]] RandomSource split(std::uint64_t stream) const noexcept;

  private:
    std::uint64_t _seed;
    std::uint64_t _state[4];
};

} // namespace companion
