#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "rgrk/matrix.hpp"

namespace rgrk {

// Hidden exact system: A x-hat = b.
struct GroundTruth {
    RowMatrix a;
    DenseVector xhat;
    DenseVector b;
};

// b is computed as A * xhat.
GroundTruth make_ground_truth(RowMatrix a, DenseVector xhat);

// A with i.i.d. N(0,1) entries (rows rescaled to unit norm when requested),
// xhat with i.i.d. N(0,1) entries, b = A xhat.
GroundTruth generate_gaussian_ground_truth(Index m, Index n, std::uint64_t seed, bool normalize_rows = false);

// Keeps A, draws a fresh N(0,1) solution.
GroundTruth ground_truth_for_matrix(RowMatrix a, std::uint64_t seed);

enum class NoiseKind { additive, multiplicative };

// sigma_e / sigma_eps are absolute standard deviations multiplying unit
// normal noise, so sigma = 0.01 means "1%".
struct NoiseSpec {
    NoiseKind kind = NoiseKind::additive;
    double sigma_e = 0.0;
    double sigma_eps = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const NoiseSpec&) const = default;
};

struct Measurement {
    RowMatrix a;
    DenseVector b;
};

// N unbiased noisy measurements A^j = A + sigma_e E^j, b^j = b + sigma_eps eps^j
// and their averages.
//
// Measurement j (0-based) is drawn from the stream Rng(spec.seed, {0x4d45, j}) as the
// m*n entries of E^j in row-major order followed by the m entries of eps^j, so
// any single measurement is reproducible in isolation. Only the averages are
// stored; measurement(j) regenerates A^j, b^j on demand.
class MeasurementEnsemble {
public:
    Index size() const noexcept { return count_; }
    const RowMatrix& abar() const noexcept { return abar_; }
    const DenseVector& bbar() const noexcept { return bbar_; }
    const NoiseSpec& spec() const noexcept { return spec_; }
    const GroundTruth& truth() const noexcept { return *truth_; }
    std::shared_ptr<const GroundTruth> truth_ptr() const noexcept { return truth_; }

    Measurement measurement(Index j) const;
    std::vector<Measurement> materialize() const;

private:
    friend std::vector<MeasurementEnsemble> make_additive_ensembles(std::shared_ptr<const GroundTruth>,
                                                                    const std::vector<Index>&, const NoiseSpec&);
    Index count_ = 0;
    RowMatrix abar_;
    DenseVector bbar_;
    NoiseSpec spec_;
    std::shared_ptr<const GroundTruth> truth_;
};

MeasurementEnsemble make_additive_ensemble(std::shared_ptr<const GroundTruth> truth, Index count,
                                           const NoiseSpec& spec);
MeasurementEnsemble make_additive_ensemble(const GroundTruth& truth, Index count, const NoiseSpec& spec);

// One pass over the measurement streams producing an ensemble for every
// requested count. Each result is bit-identical to make_additive_ensemble
// with the same count.
std::vector<MeasurementEnsemble> make_additive_ensembles(std::shared_ptr<const GroundTruth> truth,
                                                         const std::vector<Index>& counts, const NoiseSpec& spec);

// Record of A-tilde = (I + E) A (I + F), deltaA = A-tilde - A.
struct MultiplicativePerturbation {
    RowMatrix e;  // m x m
    RowMatrix f;  // n x n
    RowMatrix delta_a;
};

struct MultiplicativeSystem {
    RowMatrix a;
    DenseVector b;
    MultiplicativePerturbation perturbation;
};

inline constexpr int kMaxMultiplicativeAttempts = 16;
inline constexpr double kNonsingularThreshold = 1e-8;

// E, F have i.i.d. N(0, sigma_e^2) entries; a draw with sigma_min(I+E) or
// sigma_min(I+F) <= 1e-8 is redrawn from the next attempt stream. Dense, desk scale.
MultiplicativeSystem make_multiplicative_noisy(const GroundTruth& truth, const NoiseSpec& spec, std::uint64_t seed);

// ||E xhat - eps||_2
double noise_offset_norm(const GroundTruth& truth, const RowMatrix& e, const DenseVector& eps);

// E = A_noisy - A, eps = b_noisy - b (dense).
std::pair<RowMatrix, DenseVector> additive_noise_of(const GroundTruth& truth, const RowMatrix& a_noisy,
                                                    const DenseVector& b_noisy);

}  // namespace rgrk
