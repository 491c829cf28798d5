#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rgrk {

// Seedable 64-bit random stream.
//
// Engine: std::mt19937_64, whose output sequence is fixed by the standard.
// Stream splitting: a stream for (seed, tag_1, ..., tag_k) is seeded through
// std::seed_seq with the 32-bit halves of every value (low half first), which
// is also fully specified by the standard. Two different tag tuples therefore
// give independent, individually reproducible streams on every platform.
//
// uniform() takes the top 53 bits of one engine output. normal() uses the
// Box-Muller transform on two uniforms and caches the second variate.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

    // [0, 1)
    double uniform();
    // standard normal
    double normal();
    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

// Deterministic 64-bit sub-seed for (seed, tags...), drawn from the tagged stream.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags);

}  // namespace rgrk
