#include "rgrk/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rgrk/samplers.hpp"
#include "rgrk/solvers.hpp"

namespace rgrk {

namespace {

Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& a) {
    if (a.rows() == 0 || a.cols() == 0) return {};
    if (std::min(a.rows(), a.cols()) > 64) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
        return svd.singularValues();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues();
}

// theta F / gamma + (1 - theta); theta = 0 stays finite when gamma = 0.
double greedy_weight(double theta, double frob_sq, double gamma) {
    return (theta > 0.0 ? theta * frob_sq / gamma : 0.0) + (1.0 - theta);
}

void fill_rates(BoundReport& report) {
    const double f = report.frob_sq;
    const double s2 = report.sigma_tilde_sq;
    report.contraction_first_step = 1.0 - s2 / f;
    report.contraction_steady = 1.0 - greedy_weight(report.theta, f, report.gamma) * s2 / f;
    const double sqrt_f = std::sqrt(f);
    const double denom = sqrt_f - report.gamma / sqrt_f;
    report.horizon = report.horizon_numerator / (denom * denom);
    report.horizon_per_n = report.horizon / static_cast<double>(report.n_measurements);
}

BoundReport greedy_report(const RowMatrix& a_tilde, double numerator, double theta, Index max_rows) {
    require(theta >= 0.0 && theta <= 1.0, "bound report: theta must lie in [0, 1]");
    BoundReport report;
    report.theta = theta;
    report.frob_sq = a_tilde.frobenius_norm_sq();
    report.gamma = compute_gamma(a_tilde);
    if (std::min(a_tilde.rows(), a_tilde.cols()) <= 512) report.sigma_min = min_singular_value(a_tilde);
    const SigmaTilde st = sigma_min_tilde(a_tilde, max_rows);
    report.sigma_min_tilde = st.value;
    report.sigma_tilde_exact = st.exact;
    report.sigma_tilde_sq = st.value * st.value;
    report.horizon_numerator = numerator;
    fill_rates(report);
    return report;
}

}  // namespace

double compute_gamma(const RowMatrix& a) {
    require(a.rows() > 0 && a.frobenius_norm_sq() > 0.0, "compute_gamma: zero matrix");
    const auto norms = a.row_norms_sq();
    return a.frobenius_norm_sq() - *std::min_element(norms.begin(), norms.end());
}

double smallest_positive_singular_value(const Eigen::MatrixXd& a) {
    const Eigen::VectorXd sv = singular_values_of(a);
    if (sv.size() == 0 || sv(0) == 0.0) return 0.0;
    const double tol = static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon() * sv(0);
    double smallest = sv(0);
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
        if (sv(k) > tol) smallest = std::min(smallest, sv(k));
    }
    return smallest;
}

SigmaTilde sigma_min_tilde(const RowMatrix& a, Index max_rows) {
    require(a.rows() > 0 && a.frobenius_norm_sq() > 0.0, "sigma_min_tilde: zero matrix");
    const Eigen::MatrixXd dense = to_eigen(a);
    const Index m = a.rows();
    if (m > max_rows || m >= 63) return {smallest_positive_singular_value(dense), false};

    double best = std::numeric_limits<double>::infinity();
    std::vector<Eigen::Index> picked;
    picked.reserve(m);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << m); ++mask) {
        picked.clear();
        bool nonzero = false;
        for (Index i = 0; i < m; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                picked.push_back(static_cast<Eigen::Index>(i));
                nonzero = nonzero || a.row_norm_sq(i) > 0.0;
            }
        }
        if (!nonzero) continue;
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(picked.size()), dense.cols());
        for (Eigen::Index r = 0; r < sub.rows(); ++r) sub.row(r) = dense.row(picked[static_cast<Index>(r)]);
        best = std::min(best, smallest_positive_singular_value(sub));
    }
    return {best, true};
}

std::vector<double> singular_values(const RowMatrix& a) {
    const Eigen::VectorXd sv = singular_values_of(to_eigen(a));
    return {sv.data(), sv.data() + sv.size()};
}

double spectral_norm(const RowMatrix& a) {
    const auto sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.front();
}

double proposition1_floor(const RowMatrix& a, double theta) {
    const double f = a.frobenius_norm_sq();
    return greedy_weight(theta, f, compute_gamma(a)) / f;
}

BoundReport theorem1_report(const RowMatrix& a_tilde, const GroundTruth& truth, const RowMatrix& e,
                            const DenseVector& eps, double theta, Index max_rows) {
    require(a_tilde.rows() == truth.a.rows() && a_tilde.cols() == truth.a.cols(),
            "theorem1_report: noisy matrix dimension mismatch");
    const double offset = noise_offset_norm(truth, e, eps);
    return greedy_report(a_tilde, offset * offset, theta, max_rows);
}

BoundReport theorem2_report(Index m, double theta, Index n_measurements, double noise_level_e, double noise_level_eps,
                            double xhat_norm_sq, double sigma_tilde_sq_mean) {
    require(m >= 2, "theorem2_report: needs m >= 2 so that gamma = m - 1 is positive");
    require(theta >= 0.0 && theta <= 1.0, "theorem2_report: theta must lie in [0, 1]");
    require(n_measurements >= 1, "theorem2_report: measurement count must be at least 1");
    BoundReport report;
    report.theta = theta;
    report.n_measurements = n_measurements;
    report.frob_sq = static_cast<double>(m);
    report.gamma = static_cast<double>(m - 1);
    report.sigma_tilde_sq = sigma_tilde_sq_mean;
    report.sigma_tilde_exact = false;
    report.horizon_numerator = noise_level_e * noise_level_e * xhat_norm_sq + noise_level_eps * noise_level_eps;
    fill_rates(report);
    report.horizon /= static_cast<double>(n_measurements);
    report.horizon_per_n = report.horizon / static_cast<double>(n_measurements);
    return report;
}

double markov_sigma_bound(double sigma_min_a, double noise_level_e, Index n_measurements) {
    require(n_measurements >= 1, "markov_sigma_bound: measurement count must be at least 1");
    const double t = std::sqrt(2.0 / static_cast<double>(n_measurements)) * noise_level_e;
    if (!(t < sigma_min_a)) {
        std::ostringstream msg;
        msg << "markov_sigma_bound: requires sqrt(2/N)*sigma_E < sigma_min(A), got " << t << " >= " << sigma_min_a;
        throw DomainError(msg.str());
    }
    const double gap = sigma_min_a - t;
    return 0.5 * gap * gap;
}

BoundReport multiplicative_report(const RowMatrix& a_tilde, const GroundTruth& truth,
                                  const MultiplicativePerturbation& perturbation, const DenseVector& eps, double theta,
                                  Index max_rows) {
    require(perturbation.delta_a.rows() == truth.a.rows() && perturbation.delta_a.cols() == truth.a.cols(),
            "multiplicative_report: perturbation dimension mismatch");
    require(a_tilde.rows() == truth.a.rows() && a_tilde.cols() == truth.a.cols(),
            "multiplicative_report: noisy matrix dimension mismatch");
    const double offset = noise_offset_norm(truth, perturbation.delta_a, eps);
    return greedy_report(a_tilde, offset * offset, theta, max_rows);
}

double perturbation_check(const RowMatrix& a, const RowMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "perturbation_check: dimension mismatch");
    const auto sa = singular_values(a);
    const auto sb = singular_values(b);
    double worst = 0.0;
    for (Index k = 0; k < sa.size(); ++k) worst = std::max(worst, std::abs(sa[k] - sb[k]));
    return worst;
}

RowMatrix subtract(const RowMatrix& a, const RowMatrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "subtract: dimension mismatch");
    return from_eigen(Eigen::MatrixXd(to_eigen(a) - to_eigen(b)));
}

OneStepEstimate estimate_one_step_error(const RowMatrix& a, const DenseVector& b, const DenseVector& x,
                                        const DenseVector& xhat, double theta, Index samples, Rng& rng) {
    require(samples >= 2, "estimate_one_step_error: needs at least two samples");
    const DenseVector r = residual(a, x, b);
    const double mu = compute_mu(r.span(), a, theta);
    const GreedyState state = greedy_set(r.span(), a, mu, theta);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (Index s = 0; s < samples; ++s) {
        const Index i = sample_greedy(state, rng);
        const DenseVector next = kaczmarz_step(x, a, b, i);
        double d = 0.0;
        for (Index j = 0; j < next.size(); ++j) d += (next[j] - xhat[j]) * (next[j] - xhat[j]);
        sum += d;
        sum_sq += d * d;
    }
    const double count = static_cast<double>(samples);
    const double mean = sum / count;
    const double var = std::max(0.0, (sum_sq - count * mean * mean) / (count - 1.0));
    return {mean, std::sqrt(var / count), samples};
}

}  // namespace rgrk
