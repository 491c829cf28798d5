#include "rgrk/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rgrk/random.hpp"

namespace rgrk {

namespace {

constexpr std::uint64_t kTagMatrix = 0x41;        // 'A'
constexpr std::uint64_t kTagSolution = 0x58;      // 'X'
constexpr std::uint64_t kTagMeasurement = 0x4d45;  // "ME"
constexpr std::uint64_t kTagMultiplicative = 0x4d55;  // "MU"

std::vector<double> dense_values_of(const RowMatrix& a) {
    if (!a.is_sparse()) {
        auto v = a.dense_values();
        return {v.begin(), v.end()};
    }
    std::vector<double> out(a.rows() * a.cols(), 0.0);
    for (Index i = 0; i < a.rows(); ++i) {
        const RowView r = a.row(i);
        for (Index k = 0; k < r.values.size(); ++k) out[i * a.cols() + static_cast<Index>(r.columns[k])] = r.values[k];
    }
    return out;
}

DenseVector gaussian_vector(Rng& rng, Index n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return DenseVector(std::move(v));
}

void check_no_zero_rows(const RowMatrix& a, const char* what) {
    if (a.has_zero_row()) throw GenerationFailure(std::string(what) + ": noisy matrix has a zero row");
}

Rng measurement_stream(const NoiseSpec& spec, Index j) { return Rng(spec.seed, {kTagMeasurement, j}); }

// Writes sigma_e * E^j (row-major) and sigma_eps * eps^j.
void draw_deviation(const NoiseSpec& spec, Index j, Index m, Index n, std::vector<double>& dev_a,
                    std::vector<double>& dev_b) {
    Rng rng = measurement_stream(spec, j);
    dev_a.resize(m * n);
    dev_b.resize(m);
    for (double& v : dev_a) v = spec.sigma_e * rng.normal();
    for (double& v : dev_b) v = spec.sigma_eps * rng.normal();
}

}  // namespace

GroundTruth make_ground_truth(RowMatrix a, DenseVector xhat) {
    require(xhat.size() == a.cols(), "make_ground_truth: solution length does not match column count");
    DenseVector b = multiply(a, xhat);
    return GroundTruth{std::move(a), std::move(xhat), std::move(b)};
}

GroundTruth generate_gaussian_ground_truth(Index m, Index n, std::uint64_t seed, bool normalize_rows) {
    require(m >= 1 && n >= 1, "generate_gaussian_ground_truth: dimensions must be positive");
    Rng rng_a(seed, {kTagMatrix});
    std::vector<double> values(m * n);
    for (double& v : values) v = rng_a.normal();
    if (normalize_rows) {
        for (Index i = 0; i < m; ++i) {
            double s = 0.0;
            for (Index j = 0; j < n; ++j) s += values[i * n + j] * values[i * n + j];
            const double inv = 1.0 / std::sqrt(s);
            for (Index j = 0; j < n; ++j) values[i * n + j] *= inv;
        }
    }
    Rng rng_x(seed, {kTagSolution});
    return make_ground_truth(RowMatrix::dense(m, n, std::move(values)), gaussian_vector(rng_x, n));
}

GroundTruth ground_truth_for_matrix(RowMatrix a, std::uint64_t seed) {
    Rng rng_x(seed, {kTagSolution});
    DenseVector xhat = gaussian_vector(rng_x, a.cols());
    return make_ground_truth(std::move(a), std::move(xhat));
}

void NoiseSpec::validate() const {
    require(std::isfinite(sigma_e) && sigma_e >= 0.0, "NoiseSpec: sigma_e must be finite and non-negative");
    require(std::isfinite(sigma_eps) && sigma_eps >= 0.0, "NoiseSpec: sigma_eps must be finite and non-negative");
}

Measurement MeasurementEnsemble::measurement(Index j) const {
    require(j < count_, "MeasurementEnsemble::measurement: index out of range");
    const GroundTruth& gt = *truth_;
    const Index m = gt.a.rows();
    const Index n = gt.a.cols();
    std::vector<double> dev_a, dev_b;
    draw_deviation(spec_, j, m, n, dev_a, dev_b);
    std::vector<double> b(m);
    for (Index i = 0; i < m; ++i) b[i] = gt.b[i] + dev_b[i];
    if (spec_.sigma_e == 0.0) return {gt.a, DenseVector(std::move(b))};
    std::vector<double> a = dense_values_of(gt.a);
    for (Index k = 0; k < a.size(); ++k) a[k] = a[k] + dev_a[k];
    RowMatrix aj = RowMatrix::dense(m, n, std::move(a));
    check_no_zero_rows(aj, "measurement");
    return {std::move(aj), DenseVector(std::move(b))};
}

std::vector<Measurement> MeasurementEnsemble::materialize() const {
    std::vector<Measurement> out;
    out.reserve(count_);
    for (Index j = 0; j < count_; ++j) out.push_back(measurement(j));
    return out;
}

std::vector<MeasurementEnsemble> make_additive_ensembles(std::shared_ptr<const GroundTruth> truth,
                                                         const std::vector<Index>& counts, const NoiseSpec& spec) {
    require(truth != nullptr, "make_additive_ensembles: null ground truth");
    require(spec.kind == NoiseKind::additive, "make_additive_ensembles: noise kind must be additive");
    spec.validate();
    for (Index c : counts) require(c >= 1, "make_additive_ensembles: measurement count must be at least 1");
    if (counts.empty()) return {};

    const GroundTruth& gt = *truth;
    const Index m = gt.a.rows();
    const Index n = gt.a.cols();
    const Index max_count = *std::max_element(counts.begin(), counts.end());
    const std::vector<double> base = spec.sigma_e == 0.0 ? std::vector<double>{} : dense_values_of(gt.a);

    // Sums of the deviations sigma*E^j, sigma*eps^j in order j = 0, 1, ...
    // abar = A + sum/N, which is A^0 bitwise when N = 1 and A bitwise when sigma = 0.
    std::vector<double> sum_a(spec.sigma_e == 0.0 ? 0 : m * n, 0.0);
    std::vector<double> sum_b(m, 0.0);
    std::vector<double> dev_a, dev_b;

    std::vector<MeasurementEnsemble> out(counts.size());
    for (Index j = 0; j < max_count; ++j) {
        draw_deviation(spec, j, m, n, dev_a, dev_b);
        for (Index k = 0; k < sum_a.size(); ++k) sum_a[k] += dev_a[k];
        for (Index i = 0; i < m; ++i) sum_b[i] += dev_b[i];

        const Index current = j + 1;
        for (Index c = 0; c < counts.size(); ++c) {
            if (counts[c] != current) continue;
            const double denom = static_cast<double>(current);
            MeasurementEnsemble& e = out[c];
            e.count_ = current;
            e.spec_ = spec;
            e.truth_ = truth;
            std::vector<double> bbar(m);
            for (Index i = 0; i < m; ++i) bbar[i] = gt.b[i] + sum_b[i] / denom;
            e.bbar_ = DenseVector(std::move(bbar));
            if (spec.sigma_e == 0.0) {
                e.abar_ = gt.a;
            } else {
                std::vector<double> abar(m * n);
                for (Index k = 0; k < abar.size(); ++k) abar[k] = base[k] + sum_a[k] / denom;
                e.abar_ = RowMatrix::dense(m, n, std::move(abar));
                check_no_zero_rows(e.abar_, "averaged measurement");
            }
        }
    }
    return out;
}

MeasurementEnsemble make_additive_ensemble(std::shared_ptr<const GroundTruth> truth, Index count,
                                           const NoiseSpec& spec) {
    require(count >= 1, "make_additive_ensemble: measurement count must be at least 1");
    return std::move(make_additive_ensembles(std::move(truth), {count}, spec).front());
}

MeasurementEnsemble make_additive_ensemble(const GroundTruth& truth, Index count, const NoiseSpec& spec) {
    return make_additive_ensemble(std::make_shared<const GroundTruth>(truth), count, spec);
}

MultiplicativeSystem make_multiplicative_noisy(const GroundTruth& truth, const NoiseSpec& spec, std::uint64_t seed) {
    require(spec.kind == NoiseKind::multiplicative, "make_multiplicative_noisy: noise kind must be multiplicative");
    spec.validate();
    const auto m = static_cast<Eigen::Index>(truth.a.rows());
    const auto n = static_cast<Eigen::Index>(truth.a.cols());
    const Eigen::MatrixXd a = to_eigen(truth.a);

    for (int attempt = 0; attempt < kMaxMultiplicativeAttempts; ++attempt) {
        Rng rng(seed, {kTagMultiplicative, static_cast<std::uint64_t>(attempt)});
        Eigen::MatrixXd e(m, m);
        Eigen::MatrixXd f(n, n);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index j = 0; j < m; ++j) e(i, j) = spec.sigma_e * rng.normal();
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) f(i, j) = spec.sigma_e * rng.normal();

        const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(m, m) + e;
        const Eigen::MatrixXd right = Eigen::MatrixXd::Identity(n, n) + f;
        if (min_singular_value(from_eigen(left)) <= kNonsingularThreshold ||
            min_singular_value(from_eigen(right)) <= kNonsingularThreshold) {
            continue;
        }

        const Eigen::MatrixXd a_tilde = left * a * right;
        std::vector<double> b(truth.b.size());
        for (Index i = 0; i < b.size(); ++i) b[i] = truth.b[i] + spec.sigma_eps * rng.normal();

        RowMatrix a_out = from_eigen(a_tilde);
        check_no_zero_rows(a_out, "multiplicative");
        MultiplicativePerturbation pert{from_eigen(e), from_eigen(f), from_eigen(Eigen::MatrixXd(a_tilde - a))};
        return {std::move(a_out), DenseVector(std::move(b)), std::move(pert)};
    }
    throw GenerationFailure("make_multiplicative_noisy: " + std::to_string(kMaxMultiplicativeAttempts) +
                            " consecutive draws had a numerically singular I+E or I+F");
}

double noise_offset_norm(const GroundTruth& truth, const RowMatrix& e, const DenseVector& eps) {
    require(e.rows() == truth.a.rows() && e.cols() == truth.a.cols() && eps.size() == truth.a.rows(),
            "noise_offset_norm: dimension mismatch");
    double s = 0.0;
    for (Index i = 0; i < e.rows(); ++i) {
        const double d = row_dot(e, i, truth.xhat) - eps[i];
        s += d * d;
    }
    return std::sqrt(s);
}

std::pair<RowMatrix, DenseVector> additive_noise_of(const GroundTruth& truth, const RowMatrix& a_noisy,
                                                    const DenseVector& b_noisy) {
    require(a_noisy.rows() == truth.a.rows() && a_noisy.cols() == truth.a.cols() && b_noisy.size() == truth.b.size(),
            "additive_noise_of: dimension mismatch");
    std::vector<double> noisy = dense_values_of(a_noisy);
    const std::vector<double> exact = dense_values_of(truth.a);
    for (Index k = 0; k < noisy.size(); ++k) noisy[k] -= exact[k];
    std::vector<double> eps(b_noisy.size());
    for (Index i = 0; i < eps.size(); ++i) eps[i] = b_noisy[i] - truth.b[i];
    return {RowMatrix::dense(a_noisy.rows(), a_noisy.cols(), std::move(noisy)), DenseVector(std::move(eps))};
}

}  // namespace rgrk
