#pragma once

#include <span>
#include <vector>

#include "rgrk/matrix.hpp"
#include "rgrk/random.hpp"

namespace rgrk {

struct SamplerKind {
    enum class Variant { uniform, norm_squared, relaxed_greedy, maximal_correction };

    Variant variant = Variant::norm_squared;
    double theta = 1.0;

    static SamplerKind uniform() { return {Variant::uniform, 0.0}; }
    static SamplerKind norm_squared() { return {Variant::norm_squared, 0.0}; }
    static SamplerKind relaxed_greedy(double theta);
    // theta = 1 with deterministic smallest-index tie-break
    static SamplerKind maximal_correction() { return {Variant::maximal_correction, 1.0}; }

    bool is_greedy() const noexcept {
        return variant == Variant::relaxed_greedy || variant == Variant::maximal_correction;
    }
};

// Relative slack on the candidate-set comparison so the maximiser survives round-off.
inline constexpr double kGreedyMembershipSlack = 1e-12;

// Candidate set and restricted residual for one relaxed greedy step.
struct GreedyState {
    double theta = 1.0;
    double mu = 0.0;
    std::vector<Index> candidates;         // sorted
    std::vector<double> restricted;        // r_i on candidates, 0 elsewhere
    Index argmax = 0;                      // smallest index maximising r_i^2/||a_i||^2
};

// theta * max_i r_i^2/||a_i||^2 + (1-theta) * ||r||^2/||A||_F^2
double compute_mu(std::span<const double> r, const RowMatrix& a, double theta);

// Candidates {i : r_i^2/||a_i||^2 >= mu (1 - 1e-12)}.
GreedyState greedy_set(std::span<const double> r, const RowMatrix& a, double mu, double theta = 1.0);

// Reuses the buffers in `state`; the solver calls this once per iteration.
void greedy_set_into(std::span<const double> r, const RowMatrix& a, double mu, GreedyState& state);

// Picks i in the candidate set with probability r_i^2/||r~||^2 by inverse CDF,
// consuming exactly one uniform draw.
Index sample_greedy(const GreedyState& state, Rng& rng);

// Smallest index maximising r_i^2/||a_i||^2; consumes no randomness.
Index maximal_correction_index(std::span<const double> r, const RowMatrix& a);

// Row sampling with P(i) = ||a_i||^2/||A||_F^2. The CDF is built once.
class NormSquaredSampler {
public:
    explicit NormSquaredSampler(const RowMatrix& a);
    Index operator()(Rng& rng) const;
    Index size() const noexcept { return cdf_.size(); }

private:
    std::vector<double> cdf_;
};

inline Index sample_norm_squared(const NormSquaredSampler& sampler, Rng& rng) { return sampler(rng); }

Index sample_uniform(Index m, Rng& rng);

}  // namespace rgrk
