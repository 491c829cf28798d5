#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rgrk/noise.hpp"
#include "rgrk/solvers.hpp"
#include "rgrk/trial_summary.hpp"

namespace rgrk {

struct MatrixSource {
    enum class Kind { gaussian, matrix_market };

    Kind kind = Kind::gaussian;
    Index rows = 0;
    Index cols = 0;
    std::string path;
    // Missing optional files are skipped instead of reported as errors.
    bool optional = false;

    static MatrixSource gaussian(Index rows, Index cols);
    static MatrixSource matrix_market(std::string path, bool optional = false);

    // "gaussian-400x200" or the file stem
    std::string name() const;
    bool operator==(const MatrixSource&) const = default;
};

struct MethodSpec {
    Method method = Method::rgrk;
    double theta = 1.0;
    // Measurements averaged by rgrk-sa; rk and rgrk always use the first one.
    Index n_measurements = 1;

    bool operator==(const MethodSpec&) const = default;
};

// Trials draw independent systems from sub-seeds of base_seed:
//   system (A for Gaussian sources, xhat always): derive_seed(base, {1, source, trial})
//   noise stream:                                 derive_seed(base, {2, source, trial})
//   solver stream:                                derive_seed(base, {3, source, trial, config})
// Every configuration of a trial therefore sees the same noisy data (paired
// design), and results do not depend on how trials are scheduled.
struct ExperimentSpec {
    std::string name;
    std::vector<MatrixSource> sources;
    bool normalize_rows = false;
    NoiseSpec noise;  // seed ignored, drawn per trial
    std::vector<MethodSpec> methods;
    Index trials = 50;
    Index max_iterations = 4000;
    double stop_tolerance = 1e-1;
    std::uint64_t base_seed = 0;
    // 0 = one worker per logical processor
    unsigned jobs = 0;

    void validate() const;
    bool operator==(const ExperimentSpec&) const = default;
};

// Noisy data of one trial, shared by every method configuration.
struct TrialSystem {
    std::shared_ptr<const GroundTruth> truth;
    // Additive noise: one ensemble per distinct measurement count of spec.methods.
    std::map<Index, MeasurementEnsemble> ensembles;
    std::optional<MultiplicativeSystem> multiplicative;
    // Hash of the first noisy measurement, keyed like `ensembles` (1 for multiplicative).
    std::map<Index, std::uint64_t> first_measurement_hash;
};

// Loads Matrix Market sources on demand.
TrialSystem make_trial_system(const ExperimentSpec& spec, Index source_index, Index trial);
TrialSystem make_trial_system(const ExperimentSpec& spec, Index source_index, const RowMatrix* fixed_matrix,
                              Index trial);

std::uint64_t solver_seed(const ExperimentSpec& spec, Index source_index, Index trial, Index config);

// Runs spec.methods[config] on the trial's data.
IterateTrace solve_trial(const ExperimentSpec& spec, const TrialSystem& system, Index config, std::uint64_t seed);

// Measurement count a configuration consumes (1 unless rgrk-sa).
Index measurements_used(const MethodSpec& method);

// Summaries are ordered by source, then by method configuration.
std::vector<TrialSummary> run_trials(const ExperimentSpec& spec);

// RGRK and RGRK-SA (n_measurements) for every theta.
std::vector<TrialSummary> theta_sweep(ExperimentSpec spec, const std::vector<double>& thetas,
                                      Index n_measurements = 10);

// RK, RGRK(0.5), RGRK(1), RGRK-SA(0.5, N), RGRK-SA(1, N)
std::vector<MethodSpec> comparison_methods(Index n_measurements = 20);

// Paired comparison; an empty method list is filled with comparison_methods().
std::vector<TrialSummary> compare_methods(ExperimentSpec spec);

// Mean of the two central order statistics for even counts.
double median(std::vector<double> values);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// FNV-1a over the bit patterns of the matrix values (row-major, zeros
// included) and the vector.
std::uint64_t hash_system(const RowMatrix& a, const DenseVector& b);

}  // namespace rgrk
