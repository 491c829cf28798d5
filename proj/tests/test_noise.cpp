#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rgrk/noise.hpp"
#include "rgrk/random.hpp"

using namespace rgrk;

namespace {

NoiseSpec additive(double se, double seps, std::uint64_t seed) {
    NoiseSpec s;
    s.kind = NoiseKind::additive;
    s.sigma_e = se;
    s.sigma_eps = seps;
    s.seed = seed;
    return s;
}

}  // namespace

TEST(Rng, DeterministicAndTagged) {
    Rng a(5), b(5), c(5, {1}), d(5, {2});
    for (int k = 0; k < 100; ++k) EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_NE(c.next_u64(), d.next_u64());
    EXPECT_EQ(derive_seed(9, {1, 2}), derive_seed(9, {1, 2}));
    EXPECT_NE(derive_seed(9, {1, 2}), derive_seed(9, {2, 1}));
    Rng u(3);
    for (int k = 0; k < 1000; ++k) {
        const double v = u.uniform();
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
    }
}

TEST(Rng, NormalMoments) {
    Rng rng(17);
    double s = 0.0, s2 = 0.0;
    const int n = 200000;
    for (int k = 0; k < n; ++k) {
        const double v = rng.normal();
        s += v;
        s2 += v * v;
    }
    EXPECT_NEAR(s / n, 0.0, 0.01);
    EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(GroundTruth, ShapeDeterminismConsistency) {
    const GroundTruth g1 = generate_gaussian_ground_truth(400, 200, 42);
    const GroundTruth g2 = generate_gaussian_ground_truth(400, 200, 42);
    EXPECT_EQ(g1.a.rows(), 400u);
    EXPECT_EQ(g1.a.cols(), 200u);
    EXPECT_EQ(g1.xhat.size(), 200u);
    EXPECT_EQ(g1.b.size(), 400u);
    EXPECT_EQ(g1.b, g2.b);
    EXPECT_EQ(g1.xhat, g2.xhat);
    for (Index i = 0; i < 400; ++i) EXPECT_EQ(g1.a.row_norm_sq(i), g2.a.row_norm_sq(i));
    EXPECT_LE(residual(g1.a, g1.xhat, g1.b).norm(), 1e-10 * g1.b.norm());
}

TEST(GroundTruth, EntryMeanNearZero) {
    const GroundTruth g = generate_gaussian_ground_truth(1000, 1000, 3);
    double s = 0.0;
    for (Index i = 0; i < 1000; ++i) {
        for (double v : g.a.row(i).values) s += v;
    }
    EXPECT_NEAR(s / 1e6, 0.0, 0.005);
}

TEST(GroundTruth, NormalizedRowsAndErrors) {
    const GroundTruth g = generate_gaussian_ground_truth(20, 5, 1, true);
    for (Index i = 0; i < 20; ++i) EXPECT_NEAR(g.a.row_norm_sq(i), 1.0, 1e-14);
    EXPECT_THROW(generate_gaussian_ground_truth(0, 5, 1), ContractViolation);
    EXPECT_THROW(generate_gaussian_ground_truth(5, 0, 1), ContractViolation);
}

TEST(Ensemble, ZeroNoiseIsExact) {
    const GroundTruth g = generate_gaussian_ground_truth(10, 4, 8);
    const MeasurementEnsemble e = make_additive_ensemble(g, 5, additive(0.0, 0.0, 1));
    for (Index j = 0; j < 5; ++j) {
        const Measurement m = e.measurement(j);
        EXPECT_EQ(m.b, g.b);
        for (Index i = 0; i < 10; ++i) {
            for (Index c = 0; c < 4; ++c) EXPECT_EQ(m.a(i, c), g.a(i, c));
        }
    }
    EXPECT_EQ(e.bbar(), g.b);
}

TEST(Ensemble, SingleMeasurementEqualsAverageBitwise) {
    const GroundTruth g = generate_gaussian_ground_truth(12, 6, 9);
    const MeasurementEnsemble e = make_additive_ensemble(g, 1, additive(0.01, 0.02, 77));
    const Measurement m = e.measurement(0);
    EXPECT_EQ(m.b, e.bbar());
    for (Index i = 0; i < 12; ++i) {
        for (Index c = 0; c < 6; ++c) EXPECT_EQ(m.a(i, c), e.abar()(i, c));
    }
}

TEST(Ensemble, AveragesMatchMeasurements) {
    const GroundTruth g = generate_gaussian_ground_truth(7, 3, 4);
    const MeasurementEnsemble e = make_additive_ensemble(g, 9, additive(0.3, 0.4, 5));
    const auto all = e.materialize();
    ASSERT_EQ(all.size(), 9u);
    for (Index i = 0; i < 7; ++i) {
        double bs = 0.0;
        for (const auto& m : all) bs += m.b[i];
        EXPECT_NEAR(e.bbar()[i], bs / 9.0, 1e-12);
        for (Index c = 0; c < 3; ++c) {
            double as = 0.0;
            for (const auto& m : all) {
                ASSERT_EQ(m.a.rows(), 7u);
                as += m.a(i, c);
            }
            EXPECT_NEAR(e.abar()(i, c), as / 9.0, 1e-12);
        }
    }
}

TEST(Ensemble, MultiCountMatchesSingle) {
    auto g = std::make_shared<const GroundTruth>(generate_gaussian_ground_truth(9, 4, 2));
    const NoiseSpec spec = additive(0.1, 0.1, 31);
    const auto many = make_additive_ensembles(g, {1, 4, 16}, spec);
    for (Index k = 0; k < 3; ++k) {
        const MeasurementEnsemble single = make_additive_ensemble(g, many[k].size(), spec);
        EXPECT_EQ(single.bbar(), many[k].bbar());
        for (Index i = 0; i < 9; ++i) {
            for (Index c = 0; c < 4; ++c) EXPECT_EQ(single.abar()(i, c), many[k].abar()(i, c));
        }
    }
}

TEST(Ensemble, InvalidCount) {
    const GroundTruth g = generate_gaussian_ground_truth(3, 2, 1);
    EXPECT_THROW(make_additive_ensemble(g, 0, additive(0.1, 0.1, 1)), ContractViolation);
    NoiseSpec bad = additive(-1.0, 0.1, 1);
    EXPECT_THROW(make_additive_ensemble(g, 1, bad), ContractViolation);
}

TEST(Ensemble, RhsVarianceReductionN100) {
    const GroundTruth g = generate_gaussian_ground_truth(50, 5, 1);
    double total = 0.0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
        const MeasurementEnsemble e = make_additive_ensemble(g, 100, additive(0.0, 1.0, 1000 + s));
        double d = 0.0;
        for (Index i = 0; i < 50; ++i) d += std::pow(e.bbar()[i] - g.b[i], 2);
        total += d / 50.0;
    }
    const double mean = total / seeds;
    EXPECT_GE(mean, 0.008);
    EXPECT_LE(mean, 0.012);
}

TEST(Ensemble, Unbiased) {
    const GroundTruth g = generate_gaussian_ground_truth(3, 2, 1);
    const double sigma = 0.5;
    const Index n_meas = 4;
    const int trials = 600;
    std::vector<double> mean(6, 0.0);
    for (int s = 0; s < trials; ++s) {
        const MeasurementEnsemble e = make_additive_ensemble(g, n_meas, additive(sigma, 0.0, 5000 + s));
        for (Index i = 0; i < 3; ++i) {
            for (Index c = 0; c < 2; ++c) mean[i * 2 + c] += (e.abar()(i, c) - g.a(i, c)) / trials;
        }
    }
    const double bound = 4.0 * sigma / std::sqrt(static_cast<double>(n_meas) * trials);
    for (double m : mean) EXPECT_LE(std::abs(m), bound);
}

TEST(Multiplicative, ZeroNoiseIsExact) {
    const GroundTruth g = generate_gaussian_ground_truth(6, 3, 2);
    NoiseSpec s;
    s.kind = NoiseKind::multiplicative;
    s.sigma_e = 0.0;
    s.sigma_eps = 0.0;
    const MultiplicativeSystem sys = make_multiplicative_noisy(g, s, 1);
    for (Index i = 0; i < 6; ++i) {
        for (Index c = 0; c < 3; ++c) {
            EXPECT_EQ(sys.a(i, c), g.a(i, c));
            EXPECT_EQ(sys.perturbation.delta_a(i, c), 0.0);
        }
    }
}

TEST(Multiplicative, DeltaIdentity) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const GroundTruth g = generate_gaussian_ground_truth(7, 4, seed);
        NoiseSpec s;
        s.kind = NoiseKind::multiplicative;
        s.sigma_e = 0.1;
        s.sigma_eps = 0.1;
        const MultiplicativeSystem sys = make_multiplicative_noisy(g, s, seed + 100);
        const auto a = oracle::to_dense(g.a);
        const auto e = oracle::to_dense(sys.perturbation.e);
        const auto f = oracle::to_dense(sys.perturbation.f);
        double diff = 0.0, ref = 0.0;
        for (Index i = 0; i < 7; ++i) {
            for (Index c = 0; c < 4; ++c) {
                double ea = 0.0, af = 0.0, eaf = 0.0;
                for (Index k = 0; k < 7; ++k) ea += e[i][k] * a[k][c];
                for (Index k = 0; k < 4; ++k) af += a[i][k] * f[k][c];
                for (Index k = 0; k < 7; ++k) {
                    for (Index l = 0; l < 4; ++l) eaf += e[i][k] * a[k][l] * f[l][c];
                }
                const double expect = ea + af + eaf;
                diff += std::pow(sys.perturbation.delta_a(i, c) - expect, 2);
                ref += expect * expect;
                EXPECT_NEAR(sys.a(i, c) - a[i][c], sys.perturbation.delta_a(i, c), 1e-12);
            }
        }
        EXPECT_LE(std::sqrt(diff), 1e-10 * std::sqrt(ref));
    }
}

TEST(Multiplicative, HandExpansion) {
    // (I + 0) I (I + diag(0.1, 0)) = diag(1.1, 1)
    const RowMatrix a = RowMatrix::identity(2);
    const RowMatrix f = RowMatrix::dense({{0.1, 0.0}, {0.0, 0.0}});
    const Eigen::MatrixXd at = to_eigen(a) * (Eigen::MatrixXd::Identity(2, 2) + to_eigen(f));
    EXPECT_DOUBLE_EQ(at(0, 0), 1.1);
    EXPECT_DOUBLE_EQ(at(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(at(0, 1), 0.0);
}

TEST(Multiplicative, RequiresMultiplicativeKind) {
    const GroundTruth g = generate_gaussian_ground_truth(4, 2, 2);
    EXPECT_THROW(make_multiplicative_noisy(g, additive(0.1, 0.1, 1), 1), ContractViolation);
}

TEST(NoiseOffset, Examples) {
    const GroundTruth g = generate_gaussian_ground_truth(2, 2, 1);
    EXPECT_EQ(noise_offset_norm(g, RowMatrix::zeros(2, 2), DenseVector{0.0, 0.0}), 0.0);
    EXPECT_DOUBLE_EQ(noise_offset_norm(g, RowMatrix::zeros(2, 2), DenseVector{3.0, 4.0}), 5.0);
    EXPECT_THROW(noise_offset_norm(g, RowMatrix::zeros(3, 2), DenseVector{0.0, 0.0}), ContractViolation);
}

TEST(NoiseOffset, RandomMatchesBruteForce) {
    const GroundTruth g = generate_gaussian_ground_truth(4, 3, 5);
    const auto ed = oracle::random_dense(4, 3, 6);
    std::vector<double> flat;
    for (const auto& r : ed) flat.insert(flat.end(), r.begin(), r.end());
    const RowMatrix e = RowMatrix::dense(4, 3, flat);
    const DenseVector eps{0.1, -0.2, 0.3, 0.05};
    double s = 0.0;
    for (Index i = 0; i < 4; ++i) {
        double v = -eps[i];
        for (Index c = 0; c < 3; ++c) v += ed[i][c] * g.xhat[c];
        s += v * v;
    }
    EXPECT_NEAR(noise_offset_norm(g, e, eps), std::sqrt(s), 1e-12);
}
