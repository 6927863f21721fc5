#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace sqnkit::rng {

/// Philox4x32-10 block function (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Bumped whenever the derivation of streams from (seed, tag, index) changes.
inline constexpr std::uint32_t kStreamVersion = 1;

constexpr std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Counter-based random stream. The key is fixed at construction; the state is
/// just the block counter and the position inside the current block, so two
/// streams built from the same (seed, tag, index) always agree.
class Stream {
public:
    Stream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

    std::uint64_t next_u64();

    /// Uniform on [0, 1).
    double uniform01();
    /// Uniform on the open interval (0, 1).
    double uniform_open01();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform integer on [0, bound); bound must be positive.
    std::uint64_t uniform_int(std::uint64_t bound);

    std::uint64_t blocks_consumed() const noexcept { return counter_; }

private:
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int pos_ = 4;
};

} // namespace sqnkit::rng
