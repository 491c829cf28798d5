#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rgrk/matrix.hpp"
#include "rgrk/solvers.hpp"

namespace rgrk {

// Per-iteration medians across trials. Trials that stopped early contribute
// their final value to later iterations.
struct MedianTracePoint {
    Index k = 0;
    double relative_error = 0.0;
    double residual_norm = 0.0;
    double elapsed_seconds = 0.0;
};

// Aggregate of one (method, theta, N) configuration on one matrix source.
struct TrialSummary {
    Method method = Method::rgrk;
    double theta = 1.0;
    Index n_measurements = 1;
    std::string matrix;
    Index trials = 0;
    double median_final_error = 0.0;
    double median_iterations = 0.0;
    double median_cpu_seconds = 0.0;

    std::vector<double> final_errors;
    std::vector<double> iterations;
    std::vector<double> cpu_seconds;
    // Hash of the first noisy measurement each trial consumed (paired-design check).
    std::vector<std::uint64_t> system_hashes;
    std::vector<MedianTracePoint> median_trace;

    // theta = 1/2 relaxed greedy coincides with greedy randomized Kaczmarz.
    bool grk_equivalent = false;
    std::uint64_t solver_seed_base = 0;
    // Non-empty when the configuration aborted.
    std::string error;

    bool ok() const noexcept { return error.empty(); }
    std::string label() const;
};

}  // namespace rgrk
