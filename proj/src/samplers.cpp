#include "rgrk/samplers.hpp"

#include <algorithm>

namespace rgrk {

SamplerKind SamplerKind::relaxed_greedy(double theta) {
    require(theta >= 0.0 && theta <= 1.0, "relaxed greedy sampler: theta must lie in [0, 1]");
    return {Variant::relaxed_greedy, theta};
}

namespace {

struct RatioScan {
    double max_ratio = 0.0;
    Index argmax = 0;
    double residual_sq = 0.0;
};

RatioScan scan_ratios(std::span<const double> r, const RowMatrix& a) {
    require(r.size() == a.rows(), "residual length does not match row count");
    require(a.rows() > 0, "matrix has no rows");
    const auto norms = a.row_norms_sq();
    RatioScan s;
    s.max_ratio = -1.0;
    for (Index i = 0; i < r.size(); ++i) {
        if (norms[i] == 0.0) throw ContractViolation("greedy sampling on a matrix with a zero row");
        const double sq = r[i] * r[i];
        const double ratio = sq / norms[i];
        if (ratio > s.max_ratio) {
            s.max_ratio = ratio;
            s.argmax = i;
        }
        s.residual_sq += sq;
    }
    return s;
}

}  // namespace

double compute_mu(std::span<const double> r, const RowMatrix& a, double theta) {
    require(theta >= 0.0 && theta <= 1.0, "compute_mu: theta must lie in [0, 1]");
    const RatioScan s = scan_ratios(r, a);
    return theta * s.max_ratio + (1.0 - theta) * (s.residual_sq / a.frobenius_norm_sq());
}

void greedy_set_into(std::span<const double> r, const RowMatrix& a, double mu, GreedyState& state) {
    require(r.size() == a.rows(), "greedy_set: residual length does not match row count");
    const auto norms = a.row_norms_sq();
    const double threshold = mu - kGreedyMembershipSlack * mu;
    state.mu = mu;
    state.candidates.clear();
    state.restricted.assign(r.size(), 0.0);
    double best = -1.0;
    for (Index i = 0; i < r.size(); ++i) {
        if (norms[i] == 0.0) throw ContractViolation("greedy_set: matrix has a zero row");
        const double ratio = r[i] * r[i] / norms[i];
        if (ratio > best) {
            best = ratio;
            state.argmax = i;
        }
        if (ratio >= threshold) {
            state.candidates.push_back(i);
            state.restricted[i] = r[i];
        }
    }
    if (state.candidates.empty()) throw InternalInvariantError("greedy_set: candidate set is empty");
}

GreedyState greedy_set(std::span<const double> r, const RowMatrix& a, double mu, double theta) {
    GreedyState state;
    state.theta = theta;
    greedy_set_into(r, a, mu, state);
    return state;
}

Index sample_greedy(const GreedyState& state, Rng& rng) {
    require(!state.candidates.empty(), "sample_greedy: empty candidate set");
    double total = 0.0;
    for (Index i : state.candidates) total += state.restricted[i] * state.restricted[i];
    if (!(total > 0.0)) throw ContractViolation("sample_greedy: restricted residual is zero (iteration has converged)");
    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    Index last_positive = state.candidates.front();
    for (Index i : state.candidates) {
        const double mass = state.restricted[i] * state.restricted[i];
        if (mass == 0.0) continue;
        cumulative += mass;
        last_positive = i;
        if (target < cumulative) return i;
    }
    return last_positive;
}

Index maximal_correction_index(std::span<const double> r, const RowMatrix& a) { return scan_ratios(r, a).argmax; }

NormSquaredSampler::NormSquaredSampler(const RowMatrix& a) {
    require(a.frobenius_norm_sq() > 0.0, "norm-squared sampling needs a nonzero matrix");
    cdf_.resize(a.rows());
    double cumulative = 0.0;
    for (Index i = 0; i < a.rows(); ++i) {
        cumulative += a.row_norm_sq(i);
        cdf_[i] = cumulative;
    }
}

Index NormSquaredSampler::operator()(Rng& rng) const {
    const double target = rng.uniform() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
    if (it == cdf_.end()) --it;
    return static_cast<Index>(it - cdf_.begin());
}

Index sample_uniform(Index m, Rng& rng) {
    require(m > 0, "sample_uniform: empty range");
    const auto i = static_cast<Index>(rng.uniform() * static_cast<double>(m));
    return std::min(i, m - 1);
}

}  // namespace rgrk
