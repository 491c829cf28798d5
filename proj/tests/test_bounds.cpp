#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "rgrk/bounds.hpp"
#include "rgrk/solvers.hpp"

using namespace rgrk;

namespace {

RowMatrix from_dense(const oracle::Dense& d) {
    std::vector<double> v;
    for (const auto& r : d) v.insert(v.end(), r.begin(), r.end());
    return RowMatrix::dense(d.size(), d[0].size(), v);
}

RowMatrix random_matrix(Index m, Index n, std::uint64_t seed) { return from_dense(oracle::random_dense(m, n, seed)); }

}  // namespace

TEST(Gamma, Examples) {
    EXPECT_DOUBLE_EQ(compute_gamma(RowMatrix::identity(5)), 4.0);
    EXPECT_EQ(compute_gamma(RowMatrix::dense({{3.0, 4.0}})), 0.0);
    EXPECT_DOUBLE_EQ(compute_gamma(RowMatrix::dense({{1.0, 0.0}, {0.0, 2.0}, {3.0, 0.0}})), 13.0);
    EXPECT_THROW(compute_gamma(RowMatrix::zeros(2, 2)), ContractViolation);
}

TEST(Gamma, MatchesDoubleLoop) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = oracle::random_dense(3 + seed % 7, 4, seed);
        const double expect = oracle::gamma(d);
        const RowMatrix a = from_dense(d);
        EXPECT_NEAR(compute_gamma(a), expect, 1e-12 * expect);
        EXPECT_LT(compute_gamma(a), a.frobenius_norm_sq());
    }
}

TEST(SigmaTilde, Examples) {
    const SigmaTilde eye = sigma_min_tilde(RowMatrix::identity(2));
    EXPECT_TRUE(eye.exact);
    EXPECT_NEAR(eye.value, 1.0, 1e-14);
    const SigmaTilde diag = sigma_min_tilde(RowMatrix::dense({{2.0, 0.0}, {0.0, 3.0}}));
    EXPECT_NEAR(diag.value, 2.0, 1e-14);
    EXPECT_THROW(sigma_min_tilde(RowMatrix::zeros(2, 2)), ContractViolation);
}

TEST(SigmaTilde, MatchesSubsetOracle) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = oracle::random_dense(5, 3, 500 + seed);
        const SigmaTilde s = sigma_min_tilde(from_dense(d));
        EXPECT_TRUE(s.exact);
        EXPECT_NEAR(s.value, oracle::sigma_min_tilde(d), 1e-10);
    }
}

TEST(SigmaTilde, SurrogateBeyondCap) {
    const RowMatrix a = random_matrix(14, 3, 1);
    const SigmaTilde s = sigma_min_tilde(a);
    EXPECT_FALSE(s.exact);
    EXPECT_NEAR(s.value, min_singular_value(a), 1e-10);
    const SigmaTilde capped = sigma_min_tilde(random_matrix(6, 3, 2), 4);
    EXPECT_FALSE(capped.exact);
}

TEST(SigmaTilde, ExactBelowFullMatrix) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const RowMatrix a = random_matrix(7, 3, seed);
        EXPECT_LE(sigma_min_tilde(a).value, smallest_positive_singular_value(to_eigen(a)) + 1e-12);
    }
}

TEST(NoisyBoundReport, ZeroNoiseHasZeroHorizon) {
    const GroundTruth g = generate_gaussian_ground_truth(6, 3, 4);
    const BoundReport r = theorem1_report(g.a, g, RowMatrix::zeros(6, 3), DenseVector(6, 0.0), 1.0);
    EXPECT_EQ(r.horizon, 0.0);
    EXPECT_EQ(r.horizon_numerator, 0.0);
    EXPECT_TRUE(r.sigma_tilde_exact);
    EXPECT_LE(r.contraction_steady, r.contraction_first_step);
    EXPECT_LT(r.gamma, r.frob_sq);
    EXPECT_EQ(r.horizon_per_n, r.horizon / static_cast<double>(r.n_measurements));
}

TEST(NoisyBoundReport, SteadyFactorDecreasesInTheta) {
    const GroundTruth g = generate_gaussian_ground_truth(8, 3, 5);
    double prev = 2.0;
    for (double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const BoundReport r = theorem1_report(g.a, g, RowMatrix::zeros(8, 3), DenseVector(8, 0.0), theta);
        EXPECT_LE(r.contraction_steady, prev);
        prev = r.contraction_steady;
    }
}

TEST(NoisyBoundReport, HorizonFormula) {
    const GroundTruth g = generate_gaussian_ground_truth(6, 3, 7);
    const RowMatrix e = random_matrix(6, 3, 8);
    const DenseVector eps{0.1, 0.2, -0.1, 0.0, 0.3, -0.2};
    std::vector<double> noisy;
    for (Index i = 0; i < 6; ++i) {
        for (Index c = 0; c < 3; ++c) noisy.push_back(g.a(i, c) + 0.01 * e(i, c));
    }
    const RowMatrix a_tilde = RowMatrix::dense(6, 3, noisy);
    const RowMatrix scaled = from_dense([&] {
        auto d = oracle::to_dense(e);
        for (auto& r : d) {
            for (double& v : r) v *= 0.01;
        }
        return d;
    }());
    const BoundReport r = theorem1_report(a_tilde, g, scaled, eps, 0.5);
    const double off = noise_offset_norm(g, scaled, eps);
    EXPECT_NEAR(r.horizon_numerator, off * off, 1e-12);
    const double f = a_tilde.frobenius_norm_sq();
    const double gam = compute_gamma(a_tilde);
    const double denom = std::pow(std::sqrt(f) - gam / std::sqrt(f), 2);
    EXPECT_NEAR(r.horizon, off * off / denom, 1e-12 * (1.0 + r.horizon));
    const double s2 = r.sigma_tilde_sq;
    EXPECT_NEAR(r.contraction_first_step, 1.0 - s2 / f, 1e-14);
    EXPECT_NEAR(r.contraction_steady, 1.0 - (0.5 * f / gam + 0.5) * s2 / f, 1e-14);
}

TEST(AveragedBoundReport, Formulae) {
    const BoundReport r1 = theorem2_report(10, 1.0, 1, 0.1, 0.2, 4.0, 0.3);
    EXPECT_DOUBLE_EQ(r1.gamma, 9.0);
    const double denom = std::pow(std::sqrt(10.0) - 9.0 / std::sqrt(10.0), 2);
    EXPECT_DOUBLE_EQ(r1.horizon, (0.01 * 4.0 + 0.04) / denom);
    EXPECT_DOUBLE_EQ(r1.contraction_steady, 1.0 - (10.0 / 9.0) * 0.3 / 10.0);
    const BoundReport r2 = theorem2_report(10, 1.0, 2, 0.1, 0.2, 4.0, 0.3);
    EXPECT_DOUBLE_EQ(r2.horizon, r1.horizon / 2.0);
    EXPECT_EQ(theorem2_report(10, 1.0, 3, 0.0, 0.0, 4.0, 0.3).horizon, 0.0);
    EXPECT_THROW(theorem2_report(1, 1.0, 1, 0.1, 0.1, 1.0, 0.1), ContractViolation);
    EXPECT_THROW(theorem2_report(5, 1.0, 0, 0.1, 0.1, 1.0, 0.1), ContractViolation);
}

TEST(Markov, Examples) {
    EXPECT_EQ(markov_sigma_bound(1.0, 1.0, 8), 0.125);
    EXPECT_DOUBLE_EQ(markov_sigma_bound(2.0, 0.0, 3), 2.0);
    EXPECT_THROW(markov_sigma_bound(1.0, 1.0, 2), DomainError);
    double prev = 0.0;
    for (Index n : {4, 8, 16, 64, 1024, 1 << 20}) {
        const double v = markov_sigma_bound(1.0, 1.0, n);
        EXPECT_GT(v, prev);
        EXPECT_LT(v, 0.5);
        prev = v;
    }
}

TEST(Multiplicative, ReportMatchesBruteForce) {
    const GroundTruth g = generate_gaussian_ground_truth(4, 3, 2);
    NoiseSpec spec{NoiseKind::multiplicative, 0.1, 0.1, 0};
    const MultiplicativeSystem sys = make_multiplicative_noisy(g, spec, 3);
    DenseVector eps(std::vector<double>(4));
    for (Index i = 0; i < 4; ++i) eps[i] = sys.b[i] - g.b[i];
    const BoundReport r = multiplicative_report(sys.a, g, sys.perturbation, eps, 1.0);
    double s = 0.0;
    for (Index i = 0; i < 4; ++i) {
        double v = -eps[i];
        for (Index c = 0; c < 3; ++c) v += (sys.a(i, c) - g.a(i, c)) * g.xhat[c];
        s += v * v;
    }
    EXPECT_NEAR(r.horizon_numerator, s, 1e-10);
}

TEST(Multiplicative, RightFactorOnlyMatchesAdditive) {
    // E = 0: deltaA = AF, so the report equals the additive one with E' = AF.
    const GroundTruth g = generate_gaussian_ground_truth(5, 3, 9);
    const RowMatrix f = RowMatrix::dense({{0.1, 0.0, 0.02}, {0.0, -0.05, 0.0}, {0.01, 0.0, 0.03}});
    const Eigen::MatrixXd af = to_eigen(g.a) * to_eigen(f);
    const RowMatrix delta = from_eigen(af);
    const RowMatrix a_tilde = from_eigen(Eigen::MatrixXd(to_eigen(g.a) + af));
    const MultiplicativePerturbation pert{RowMatrix::zeros(5, 5), f, delta};
    const DenseVector eps(5, 0.0);
    const BoundReport mult = multiplicative_report(a_tilde, g, pert, eps, 0.5);
    const BoundReport add = theorem1_report(a_tilde, g, delta, eps, 0.5);
    EXPECT_DOUBLE_EQ(mult.horizon, add.horizon);
    EXPECT_DOUBLE_EQ(mult.contraction_steady, add.contraction_steady);
}

TEST(Perturbation, Weyl) {
    const RowMatrix a = random_matrix(6, 4, 1);
    EXPECT_EQ(perturbation_check(a, a), 0.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RowMatrix x = random_matrix(6, 4, 10 + seed);
        const RowMatrix y = random_matrix(6, 4, 100 + seed);
        const double gap = oracle::spectral_norm(oracle::to_dense(subtract(x, y)));
        EXPECT_LE(perturbation_check(x, y), gap + 1e-10);
    }
    const RowMatrix sq = random_matrix(4, 4, 3);
    const RowMatrix shifted = from_eigen(Eigen::MatrixXd(to_eigen(sq) + 0.3 * Eigen::MatrixXd::Identity(4, 4)));
    EXPECT_LE(perturbation_check(sq, shifted), 0.3 + 1e-12);
    EXPECT_THROW(perturbation_check(a, random_matrix(5, 4, 1)), ContractViolation);
}

TEST(SingularValues, MatchJacobiOracle) {
    const RowMatrix a = random_matrix(7, 4, 42);
    const auto mine = singular_values(a);
    const auto ref = oracle::singular_values(oracle::to_dense(a));
    ASSERT_EQ(mine.size(), ref.size());
    for (Index i = 0; i < ref.size(); ++i) EXPECT_NEAR(mine[i], ref[i], 1e-12 * ref[0]);
    EXPECT_NEAR(spectral_norm(a), ref[0], 1e-12 * ref[0]);
}

TEST(GreedyWeightFloor, HoldsAlongNoiselessTrace) {
    const GroundTruth g0 = generate_gaussian_ground_truth(60, 15, 3);
    auto g = std::make_shared<const GroundTruth>(g0);
    for (double theta : {0.25, 0.5, 0.75, 1.0}) {
        SolverConfig c;
        c.method = Method::rgrk;
        c.theta = theta;
        c.max_iterations = 600;
        c.stop_tolerance = 1e-10;
        c.seed = 4;
        const IterateTrace t = solve_rgrk(WorkingSystem(g->a, g->b, g), c);
        const double floor = proposition1_floor(g->a, theta);
        EXPECT_GE(t.records[0].mu / std::pow(t.records[0].residual_norm, 2), 1.0 / g->a.frobenius_norm_sq() - 1e-10);
        for (Index k = 1; k < t.iterations(); ++k) {
            const double w = t.records[k].mu / std::pow(t.records[k].residual_norm, 2);
            EXPECT_GE(w, floor - 1e-10) << "theta " << theta << " k " << k;
        }
    }
}

TEST(OneStep, EstimateIsConsistent) {
    const GroundTruth g = generate_gaussian_ground_truth(6, 3, 1);
    Rng rng(2);
    const DenseVector x{0.5, -0.5, 1.0};
    const OneStepEstimate est = estimate_one_step_error(g.a, g.b, x, g.xhat, 1.0, 500, rng);
    EXPECT_EQ(est.samples, 500u);
    EXPECT_GE(est.mean, 0.0);
    double before = 0.0;
    for (Index i = 0; i < 3; ++i) before += std::pow(x[i] - g.xhat[i], 2);
    EXPECT_LE(est.mean, before + 1e-12);
}
