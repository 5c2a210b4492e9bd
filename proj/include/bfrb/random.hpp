#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace bfrb {

/// Seeded generator with portable draws. The engine's raw sequence is fixed by
/// the standard; the integer and real mappings below are ours so streams are
/// bit-identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);

    /// Uniform double in [0, 1).
    double uniform();

    double normal(double mean = 0.0, double stddev = 1.0);

    /// k distinct values from [0, n), in draw order (partial Fisher-Yates).
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

private:
    std::mt19937_64 engine_;
};

/// FNV-1a 64-bit; stable across platforms.
std::uint64_t stable_hash(std::string_view text);

} // namespace bfrb
