#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "rgrk/matrix.hpp"
#include "rgrk/noise.hpp"

namespace rgrk {

enum class Method { rk, rgrk, rgrk_sa };

std::string_view method_name(Method method);
std::optional<Method> parse_method(std::string_view name);

struct SolverConfig {
    Method method = Method::rgrk;
    double theta = 1.0;
    Index max_iterations = 4000;
    // Relative error ||x_k - xhat||/||xhat|| with a ground truth, otherwise
    // relative residual ||A x_k - b||/||b||.
    double stop_tolerance = 1e-1;
    std::uint64_t seed = 0;
    Index refresh_period = 50;
    bool track_error = true;
    // Greedy methods only: select the smallest argmax row deterministically.
    bool maximal_correction = false;
    // Keep every iterate x_k in the trace (memory n per iteration).
    bool record_iterates = false;
    std::optional<DenseVector> x0;

    void validate() const;
};

inline constexpr Index kNoSelection = std::numeric_limits<Index>::max();
inline constexpr double kResidualDriftTolerance = 1e-8;

// State at iterate k. `selected` is the row projected onto to obtain x_{k+1}
// (kNoSelection on the final record). `mu` is the greedy threshold used for
// that selection (NaN for RK).
struct IterationRecord {
    Index k = 0;
    Index selected = kNoSelection;
    double relative_error = std::numeric_limits<double>::quiet_NaN();
    double residual_norm = 0.0;
    double mu = std::numeric_limits<double>::quiet_NaN();
    double elapsed_seconds = 0.0;
};

enum class Termination { tolerance_reached, max_iterations, residual_vanished };
enum class StopCriterion { relative_error, relative_residual };

std::string_view termination_name(Termination t);

struct IterateTrace {
    std::vector<IterationRecord> records;
    DenseVector final_x;
    Termination termination = Termination::max_iterations;
    StopCriterion criterion = StopCriterion::relative_error;
    // Largest ||r_incremental - r_recomputed|| seen at a refresh.
    double max_residual_drift = 0.0;
    bool drift_flagged = false;
    std::vector<DenseVector> iterates;

    // Number of projections performed.
    Index iterations() const noexcept { return records.empty() ? 0 : records.back().k; }
    double final_relative_error() const noexcept {
        return records.empty() ? std::numeric_limits<double>::quiet_NaN() : records.back().relative_error;
    }
    double elapsed_seconds() const noexcept { return records.empty() ? 0.0 : records.back().elapsed_seconds; }
};

// Solver-facing pair (A, b), optionally with the ground truth for error tracking.
class WorkingSystem {
public:
    WorkingSystem(RowMatrix a, DenseVector b, std::shared_ptr<const GroundTruth> truth = nullptr);

    const RowMatrix& a() const noexcept { return a_; }
    const DenseVector& b() const noexcept { return b_; }
    const GroundTruth* truth() const noexcept { return truth_.get(); }

private:
    RowMatrix a_;
    DenseVector b_;
    std::shared_ptr<const GroundTruth> truth_;
};

// x - ((a_i^T x - b_i)/||a_i||^2) a_i
DenseVector kaczmarz_step(const DenseVector& x, const RowMatrix& a, const DenseVector& b, Index i);

IterateTrace solve_rk(const WorkingSystem& system, const SolverConfig& config);
IterateTrace solve_rgrk(const WorkingSystem& system, const SolverConfig& config);
// Runs the RGRK loop on the precomputed averages (abar, bbar).
IterateTrace solve_rgrk_sa(const MeasurementEnsemble& ensemble, std::shared_ptr<const GroundTruth> truth,
                           const SolverConfig& config);
IterateTrace solve_rgrk_sa(const MeasurementEnsemble& ensemble, const SolverConfig& config);

double relative_error(const DenseVector& x, const DenseVector& xhat);

}  // namespace rgrk
