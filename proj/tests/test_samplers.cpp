#include <gtest/gtest.h>

#include <cmath>

#include "rgrk/samplers.hpp"

using namespace rgrk;

namespace {

RowMatrix unit_rows(Index m) {
    std::vector<double> v(m * 2, 0.0);
    for (Index i = 0; i < m; ++i) v[i * 2] = 1.0;
    return RowMatrix::dense(m, 2, v);
}

}  // namespace

TEST(ComputeMu, Endpoints) {
    const RowMatrix a = RowMatrix::dense({{1.0, 0.0}, {0.0, 2.0}, {1.0, 1.0}});
    const std::vector<double> r{0.5, -3.0, 1.0};
    const double rr = 0.25 + 9.0 + 1.0;
    EXPECT_EQ(compute_mu(r, a, 0.0), rr / a.frobenius_norm_sq());
    EXPECT_EQ(compute_mu(r, a, 1.0), std::max({0.25 / 1.0, 9.0 / 4.0, 1.0 / 2.0}));
}

TEST(ComputeMu, HandEvaluation) {
    const RowMatrix a = unit_rows(2);
    EXPECT_DOUBLE_EQ(compute_mu(std::vector<double>{1.0, 2.0}, a, 0.5), 3.25);
}

TEST(ComputeMu, ThetaOutOfRange) {
    const RowMatrix a = unit_rows(2);
    const std::vector<double> r{1.0, 2.0};
    EXPECT_THROW(compute_mu(r, a, -0.1), ContractViolation);
    EXPECT_THROW(compute_mu(r, a, 1.1), ContractViolation);
}

TEST(ComputeMu, LowerBoundAndMonotoneInTheta) {
    const RowMatrix a = RowMatrix::dense({{1.0, 2.0}, {0.5, -1.0}, {3.0, 0.1}, {-2.0, 2.0}});
    const std::vector<double> r{0.3, -1.2, 2.5, 0.7};
    double rr = 0.0;
    for (double v : r) rr += v * v;
    double prev = -1.0;
    for (int t = 0; t <= 10; ++t) {
        const double mu = compute_mu(r, a, t / 10.0);
        EXPECT_GE(mu, rr / a.frobenius_norm_sq() - 1e-14);
        EXPECT_GE(mu, prev - 1e-14);
        prev = mu;
    }
}

TEST(GreedySet, ThetaOneIsArgmax) {
    const RowMatrix a = unit_rows(4);
    const std::vector<double> r{1.0, -3.0, 2.0, 3.0};
    const GreedyState s = greedy_set(r, a, compute_mu(r, a, 1.0), 1.0);
    EXPECT_EQ(s.candidates, (std::vector<Index>{1, 3}));
    EXPECT_EQ(s.argmax, 1u);
    EXPECT_EQ(s.restricted[0], 0.0);
    EXPECT_EQ(s.restricted[2], 0.0);
    EXPECT_EQ(s.restricted[1], -3.0);
}

TEST(GreedySet, EqualResidualsSelectAll) {
    const RowMatrix a = unit_rows(5);
    const std::vector<double> r{2.0, -2.0, 2.0, 2.0, -2.0};
    for (double theta : {0.0, 0.3, 1.0}) {
        const GreedyState s = greedy_set(r, a, compute_mu(r, a, theta), theta);
        EXPECT_EQ(s.candidates.size(), 5u);
    }
}

TEST(GreedySet, HandEvaluation) {
    const RowMatrix a = unit_rows(3);
    const std::vector<double> r{1.0, 2.0, 3.0};
    const double mu = compute_mu(r, a, 0.5);
    EXPECT_NEAR(mu, 0.5 * 9.0 + 0.5 * 14.0 / 3.0, 1e-14);
    const GreedyState s = greedy_set(r, a, mu, 0.5);
    EXPECT_EQ(s.candidates, (std::vector<Index>{2}));
}

TEST(GreedySet, MembershipInvariant) {
    const RowMatrix a = RowMatrix::dense({{1.0, 2.0}, {0.5, -1.0}, {3.0, 0.1}, {-2.0, 2.0}, {0.2, 0.2}});
    const std::vector<double> r{0.3, -1.2, 2.5, 0.7, 0.01};
    for (int t = 0; t <= 4; ++t) {
        const double mu = compute_mu(r, a, t / 4.0);
        const GreedyState s = greedy_set(r, a, mu, t / 4.0);
        ASSERT_FALSE(s.candidates.empty());
        for (Index i : s.candidates) EXPECT_GE(r[i] * r[i] / a.row_norm_sq(i), mu - 1e-12 * mu);
        for (Index i = 0; i < r.size(); ++i) {
            const bool in = std::find(s.candidates.begin(), s.candidates.end(), i) != s.candidates.end();
            if (!in) {
                EXPECT_EQ(s.restricted[i], 0.0);
            }
        }
    }
}

TEST(GreedySet, UnreachableThresholdIsInvariantError) {
    const RowMatrix a = unit_rows(2);
    const std::vector<double> r{1.0, 1.0};
    EXPECT_THROW(greedy_set(r, a, 10.0), InternalInvariantError);
}

TEST(SampleGreedy, Singleton) {
    const RowMatrix a = unit_rows(3);
    const std::vector<double> r{0.1, 5.0, 0.2};
    const GreedyState s = greedy_set(r, a, compute_mu(r, a, 1.0), 1.0);
    Rng rng(1);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(sample_greedy(s, rng), 1u);
}

TEST(SampleGreedy, SquaredResidualLaw) {
    // squares 4, 4.84, 0.01 against the mean 2.95: rows 0 and 1 qualify
    const RowMatrix a = unit_rows(3);
    const std::vector<double> r{2.0, 2.2, 0.1};
    const GreedyState s = greedy_set(r, a, compute_mu(r, a, 0.0), 0.0);
    ASSERT_EQ(s.candidates.size(), 2u);
    Rng rng(2);
    const int draws = 100000;
    int first = 0;
    for (int k = 0; k < draws; ++k) first += sample_greedy(s, rng) == 0 ? 1 : 0;
    EXPECT_NEAR(first / static_cast<double>(draws), 4.0 / 8.84, 0.01);
}

TEST(SampleGreedy, ConsumesOneUniform) {
    const RowMatrix a = unit_rows(3);
    const std::vector<double> r{1.0, 1.5, 1.2};
    const GreedyState s = greedy_set(r, a, compute_mu(r, a, 0.0), 0.0);
    Rng used(9), reference(9);
    (void)sample_greedy(s, used);
    (void)reference.uniform();
    EXPECT_EQ(used.next_u64(), reference.next_u64());
}

TEST(MaximalCorrection, SmallestArgmaxNoRandomness) {
    const RowMatrix a = unit_rows(4);
    const std::vector<double> r{1.0, 3.0, -3.0, 2.0};
    EXPECT_EQ(maximal_correction_index(r, a), 1u);
    const SamplerKind k = SamplerKind::maximal_correction();
    EXPECT_TRUE(k.is_greedy());
    EXPECT_EQ(k.theta, 1.0);
}

TEST(NormSquared, UniformWhenEqualNorms) {
    const RowMatrix a = unit_rows(10);
    const NormSquaredSampler sampler(a);
    Rng rng(3);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) ++counts[sample_norm_squared(sampler, rng)];
    for (int c : counts) EXPECT_NEAR(c / static_cast<double>(draws), 0.1, 0.01);
}

TEST(NormSquared, WeightedLaw) {
    const RowMatrix a = RowMatrix::dense({{1.0, 0.0}, {0.0, std::sqrt(3.0)}});
    const NormSquaredSampler sampler(a);
    Rng rng(4);
    int first = 0;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) first += sampler(rng) == 0 ? 1 : 0;
    EXPECT_NEAR(first / static_cast<double>(draws), 0.25, 0.02);
}

TEST(NormSquared, SingleRowAndZeroMatrix) {
    const NormSquaredSampler one(RowMatrix::dense({{2.0, 1.0}}));
    Rng rng(5);
    for (int k = 0; k < 50; ++k) EXPECT_EQ(one(rng), 0u);
    EXPECT_THROW(NormSquaredSampler(RowMatrix::zeros(3, 2)), ContractViolation);
}

TEST(SamplerKind, ThetaRange) {
    EXPECT_THROW(SamplerKind::relaxed_greedy(1.5), ContractViolation);
    EXPECT_NO_THROW(SamplerKind::relaxed_greedy(0.0));
}
