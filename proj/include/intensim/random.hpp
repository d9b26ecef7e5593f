#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace intensim {

/// Name recorded in report metadata for reproducibility.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-derive+box-muller";

/// Deterministic random source. The engine output is fixed by the C++
/// standard and all conversions to real variates are done here, so a given
/// seed yields the same sequence on every conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    /// Uniform on [-1, 1).
    double symmetric();
    double standard_normal();
    /// Rayleigh with unit scale: sqrt(-2 ln U).
    double standard_rayleigh();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

/// Mixes a base seed with a stream index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace intensim
