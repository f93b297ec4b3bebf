#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace levyruin {

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

/// Random stream of one simulated path, keyed by (seed, path index) and
/// indexed by the draw counter; any path can be regenerated independently of
/// all others.
class PathStream {
public:
    PathStream(std::uint64_t seed, std::uint64_t path);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential(double rate) { return -std::log(uniform()) / rate; }

    std::uint64_t draws() const noexcept { return block_ * 2 + (has_spare_ ? 1 : 0); }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t path_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace levyruin
