// SPDX-License-Identifier: Apache-2.0
#include <companion/random.hpp>

namespace companion
{

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_call_seed(std::uint64_t session_seed, std::uint64_t turn_index, std::uint64_t call_index) noexcept
{
    return mix64(mix64(mix64(session_seed) ^ turn_index) ^ (call_index * 0xD1B54A32D192ED03ULL));
}

namespace
{

std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

} // namespace

RandomSource::RandomSource(std::uint64_t seed) noexcept: _seed(seed)
{
    auto s = seed;
    for (auto& word: _state)
    {
        word = mix64(s);
        s += 0x9E3779B97F4A7C15ULL;
    }
}

std::uint64_t RandomSource::next_u64() noexcept
{
    auto const result = rotl(_state[1] * 5, 7) * 9;
    auto const t = _state[1] << 17;
    _state[2] ^= _state[0];
    _state[3] ^= _state[1];
    _state[1] ^= _state[2];
    _state[0] ^= _state[3];
    _state[2] ^= t;
    _state[3] = rotl(_state[3], 45);
    return result;
}

double RandomSource::uniform() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform(double lo, double hi) noexcept
{
    return lo + (hi - lo) * uniform();
}

RandomSource RandomSource::split(std::uint64_t stream) const noexcept
{
    return RandomSource(mix64(_seed ^ mix64(stream + 0x632BE59BD9B4E019ULL)));
}

} // namespace companion
