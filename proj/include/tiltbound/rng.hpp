#pragma once

#include <cstdint>
#include <random>

namespace tiltbound {

/// Seeded generator whose output is fixed by the C++ standard (mt19937_64)
/// and mapped to doubles without implementation-defined distributions, so a
/// given seed reproduces the same draws on every platform.
class DeterministicRng {
public:
    static constexpr const char* algorithm = "mt19937_64/u53/inverse-cdf";

    explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace tiltbound
