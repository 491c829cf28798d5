#pragma once

#include <optional>
#include <vector>

#include "rgrk/matrix.hpp"
#include "rgrk/noise.hpp"
#include "rgrk/random.hpp"

namespace rgrk {

// Theoretical quantities of the relaxed greedy convergence bounds.
//
//   contraction_first_step = 1 - s2 / F
//   contraction_steady     = 1 - (theta F / gamma + 1 - theta) s2 / F
//   horizon                = ||noise xhat - eps||^2 / (sqrt(F) - gamma / sqrt(F))^2
//
// with F = ||A||_F^2 and s2 the squared sigma-tilde (or its expectation for
// the averaged bound).
struct BoundReport {
    double gamma = 0.0;
    double frob_sq = 0.0;
    std::optional<double> sigma_min;
    std::optional<double> sigma_min_tilde;
    bool sigma_tilde_exact = false;
    double sigma_tilde_sq = 0.0;
    double contraction_first_step = 1.0;
    double contraction_steady = 1.0;
    double horizon_numerator = 0.0;
    double horizon = 0.0;
    double horizon_per_n = 0.0;
    double theta = 1.0;
    Index n_measurements = 1;
};

// ||A||_F^2 - min_i ||a_i||^2, i.e. max_i sum_{j != i} ||a_j||^2.
double compute_gamma(const RowMatrix& a);

struct SigmaTilde {
    double value = 0.0;
    bool exact = false;
};

inline constexpr Index kSigmaTildeMaxRows = 12;

// Minimum over all nonzero row submatrices A_I of the smallest positive
// singular value of A_I. For m > max_rows, returns the smallest positive
// singular value of A itself with exact = false.
SigmaTilde sigma_min_tilde(const RowMatrix& a, Index max_rows = kSigmaTildeMaxRows);

// Descending singular values.
std::vector<double> singular_values(const RowMatrix& a);
double spectral_norm(const RowMatrix& a);
double smallest_positive_singular_value(const Eigen::MatrixXd& a);

// Lower bound of w_k = mu_k/||r_k||^2 for iterates k >= 1.
double proposition1_floor(const RowMatrix& a, double theta);

BoundReport theorem1_report(const RowMatrix& a_tilde, const GroundTruth& truth, const RowMatrix& e,
                            const DenseVector& eps, double theta, Index max_rows = kSigmaTildeMaxRows);

// Averaged-measurement bound with unit rows (gamma = m - 1). noise_level_e and
// noise_level_eps are total noise levels: noise_level_e^2 = E||E^j||_F^2 and
// noise_level_eps^2 = E||eps^j||^2 of one measurement. sigma_tilde_sq_mean is a
// caller estimate (e.g. Monte-Carlo or markov_sigma_bound) of E sigma-tilde^2(Abar).
// The horizon carries the 1/N factor.
BoundReport theorem2_report(Index m, double theta, Index n_measurements, double noise_level_e, double noise_level_eps,
                            double xhat_norm_sq, double sigma_tilde_sq_mean);

// 1/2 (sigma_min(A) - sqrt(2/N) noise_level_e)^2, a lower bound for
// E sigma-tilde^2 of the averaged matrix. Needs sqrt(2/N) noise_level_e < sigma_min(A).
double markov_sigma_bound(double sigma_min_a, double noise_level_e, Index n_measurements);

BoundReport multiplicative_report(const RowMatrix& a_tilde, const GroundTruth& truth,
                                  const MultiplicativePerturbation& perturbation, const DenseVector& eps, double theta,
                                  Index max_rows = kSigmaTildeMaxRows);

// max_i |sigma_i(A) - sigma_i(B)|; callers compare it with ||A - B||_2.
double perturbation_check(const RowMatrix& a, const RowMatrix& b);

RowMatrix subtract(const RowMatrix& a, const RowMatrix& b);

struct OneStepEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    Index samples = 0;
};

// Monte-Carlo estimate of E ||x_{k+1} - xhat||^2 over one relaxed greedy
// selection from the frozen iterate x.
OneStepEstimate estimate_one_step_error(const RowMatrix& a, const DenseVector& b, const DenseVector& x,
                                        const DenseVector& xhat, double theta, Index samples, Rng& rng);

}  // namespace rgrk
