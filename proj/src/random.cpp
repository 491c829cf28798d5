#include "rgrk/random.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace rgrk {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (tags.size() + 1));
    auto push = [&words](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffULL));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (std::uint64_t t : tags) push(t);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(make_engine(seed, {})) {}

Rng::Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) : engine_(make_engine(seed, tags)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    return make_engine(seed, tags)();
}

}  // namespace rgrk
