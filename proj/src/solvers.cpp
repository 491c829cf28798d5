#include "rgrk/solvers.hpp"

#include <chrono>
#include <cmath>

#include "rgrk/samplers.hpp"

namespace rgrk {

std::string_view method_name(Method method) {
    switch (method) {
        case Method::rk: return "rk";
        case Method::rgrk: return "rgrk";
        case Method::rgrk_sa: return "rgrk-sa";
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view name) {
    if (name == "rk") return Method::rk;
    if (name == "rgrk") return Method::rgrk;
    if (name == "rgrk-sa" || name == "rgrk_sa") return Method::rgrk_sa;
    return std::nullopt;
}

std::string_view termination_name(Termination t) {
    switch (t) {
        case Termination::tolerance_reached: return "tolerance_reached";
        case Termination::max_iterations: return "max_iterations";
        case Termination::residual_vanished: return "residual_vanished";
    }
    return "unknown";
}

void SolverConfig::validate() const {
    require(max_iterations >= 1, "SolverConfig: max_iterations must be at least 1");
    require(stop_tolerance > 0.0, "SolverConfig: stop_tolerance must be positive");
    require(refresh_period >= 1, "SolverConfig: refresh_period must be at least 1");
    require(theta >= 0.0 && theta <= 1.0, "SolverConfig: theta must lie in [0, 1]");
}

WorkingSystem::WorkingSystem(RowMatrix a, DenseVector b, std::shared_ptr<const GroundTruth> truth)
    : a_(std::move(a)), b_(std::move(b)), truth_(std::move(truth)) {
    require(b_.size() == a_.rows(), "WorkingSystem: right-hand side length does not match row count");
    require(a_.rows() > 0 && a_.cols() > 0, "WorkingSystem: empty matrix");
    require(!a_.has_zero_row(), "WorkingSystem: matrix has a zero row (projection undefined)");
    if (truth_) {
        require(truth_->xhat.size() == a_.cols(), "WorkingSystem: ground truth dimension mismatch");
    }
}

DenseVector kaczmarz_step(const DenseVector& x, const RowMatrix& a, const DenseVector& b, Index i) {
    require(b.size() == a.rows(), "kaczmarz_step: right-hand side length does not match row count");
    require(i < a.rows(), "kaczmarz_step: row index out of range");
    require(x.size() == a.cols(), "kaczmarz_step: iterate length does not match column count");
    const double norm_sq = a.row_norm_sq(i);
    require(norm_sq > 0.0, "kaczmarz_step: zero row");
    DenseVector out = x;
    const double beta = row_dot(a, i, x) - b[i];
    axpy_row(a, i, -beta / norm_sq, out.span());
    return out;
}

double relative_error(const DenseVector& x, const DenseVector& xhat) {
    require(x.size() == xhat.size(), "relative_error: length mismatch");
    const double denom = xhat.norm();
    require(denom > 0.0, "relative_error: zero reference solution");
    double s = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        const double d = x[j] - xhat[j];
        s += d * d;
    }
    return std::sqrt(s) / denom;
}

namespace {

// Columns A a_i of the row Gram matrix, cached up to a memory budget.
class GramColumns {
public:
    GramColumns(const RowMatrix& a, std::size_t budget_bytes)
        : a_(a), cache_(a.rows()), scratch_x_(a.cols(), 0.0), scratch_col_(a.rows()),
          max_cached_(budget_bytes / (sizeof(double) * std::max<Index>(a.rows(), 1))) {}

    std::span<const double> column(Index i) {
        if (!cache_[i].empty()) return cache_[i];
        const RowView row = a_.row(i);
        if (row.sparse) {
            for (Index k = 0; k < row.values.size(); ++k) scratch_x_[static_cast<Index>(row.columns[k])] = row.values[k];
        } else {
            for (Index j = 0; j < row.values.size(); ++j) scratch_x_[j] = row.values[j];
        }
        for (Index j = 0; j < a_.rows(); ++j) scratch_col_[j] = row_dot(a_, j, scratch_x_);
        if (row.sparse) {
            for (Index k = 0; k < row.values.size(); ++k) scratch_x_[static_cast<Index>(row.columns[k])] = 0.0;
        }
        if (cached_ < max_cached_) {
            cache_[i] = scratch_col_;
            ++cached_;
            return cache_[i];
        }
        return scratch_col_;
    }

private:
    const RowMatrix& a_;
    std::vector<std::vector<double>> cache_;
    std::vector<double> scratch_x_;
    std::vector<double> scratch_col_;
    Index max_cached_;
    Index cached_ = 0;
};

constexpr std::size_t kGramCacheBudget = std::size_t{256} << 20;

double norm_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

IterateTrace run_kaczmarz(const WorkingSystem& system, const SolverConfig& config, const SamplerKind& sampler) {
    config.validate();
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    const RowMatrix& a = system.a();
    const DenseVector& b = system.b();
    const Index m = a.rows();
    const Index n = a.cols();

    const GroundTruth* truth = system.truth();
    if (config.track_error) require(truth != nullptr, "solver: track_error requires a ground truth");
    const bool track = config.track_error;

    IterateTrace trace;
    trace.criterion = track ? StopCriterion::relative_error : StopCriterion::relative_residual;

    DenseVector x(n, 0.0);
    if (config.x0) {
        require(config.x0->size() == n, "solver: x0 length does not match column count");
        x = *config.x0;
    }
    DenseVector r = residual(a, x, b);
    const double b_norm = b.norm();
    const double drift_scale = b_norm > 0.0 ? b_norm : 1.0;

    Rng rng(config.seed);
    std::optional<NormSquaredSampler> norm_sampler;
    if (sampler.variant == SamplerKind::Variant::norm_squared) norm_sampler.emplace(a);
    GreedyState greedy;
    greedy.theta = sampler.theta;
    GramColumns gram(a, kGramCacheBudget);

    for (Index k = 0;; ++k) {
        IterationRecord rec;
        rec.k = k;
        rec.residual_norm = norm_of(r.span());
        if (track) rec.relative_error = relative_error(x, truth->xhat);
        rec.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (config.record_iterates) trace.iterates.push_back(x);

        const double metric = track ? rec.relative_error : rec.residual_norm / drift_scale;
        if (metric <= config.stop_tolerance) {
            trace.termination = Termination::tolerance_reached;
            trace.records.push_back(rec);
            break;
        }
        if (k == config.max_iterations) {
            trace.termination = Termination::max_iterations;
            trace.records.push_back(rec);
            break;
        }
        if (rec.residual_norm == 0.0) {
            trace.termination = Termination::residual_vanished;
            trace.records.push_back(rec);
            break;
        }

        Index i = 0;
        switch (sampler.variant) {
            case SamplerKind::Variant::norm_squared: i = (*norm_sampler)(rng); break;
            case SamplerKind::Variant::uniform: i = sample_uniform(m, rng); break;
            case SamplerKind::Variant::relaxed_greedy:
            case SamplerKind::Variant::maximal_correction: {
                rec.mu = compute_mu(r.span(), a, sampler.theta);
                greedy_set_into(r.span(), a, rec.mu, greedy);
                i = sampler.variant == SamplerKind::Variant::maximal_correction ? greedy.argmax
                                                                                 : sample_greedy(greedy, rng);
                break;
            }
        }
        rec.selected = i;
        trace.records.push_back(rec);

        const double step = (row_dot(a, i, x) - b[i]) / a.row_norm_sq(i);
        axpy_row(a, i, -step, x.span());
        const auto col = gram.column(i);
        for (Index j = 0; j < m; ++j) r[j] -= step * col[j];

        if ((k + 1) % config.refresh_period == 0) {
            DenseVector fresh = residual(a, x, b);
            double drift = 0.0;
            for (Index j = 0; j < m; ++j) drift += (fresh[j] - r[j]) * (fresh[j] - r[j]);
            drift = std::sqrt(drift);
            trace.max_residual_drift = std::max(trace.max_residual_drift, drift);
            if (drift > kResidualDriftTolerance * drift_scale) trace.drift_flagged = true;
            r = std::move(fresh);
        }
    }
    trace.final_x = std::move(x);
    return trace;
}

SamplerKind greedy_sampler(const SolverConfig& config) {
    return config.maximal_correction ? SamplerKind::maximal_correction() : SamplerKind::relaxed_greedy(config.theta);
}

}  // namespace

IterateTrace solve_rk(const WorkingSystem& system, const SolverConfig& config) {
    require(config.method == Method::rk, "solve_rk: config.method must be rk");
    return run_kaczmarz(system, config, SamplerKind::norm_squared());
}

IterateTrace solve_rgrk(const WorkingSystem& system, const SolverConfig& config) {
    require(config.method == Method::rgrk, "solve_rgrk: config.method must be rgrk");
    return run_kaczmarz(system, config, greedy_sampler(config));
}

IterateTrace solve_rgrk_sa(const MeasurementEnsemble& ensemble, std::shared_ptr<const GroundTruth> truth,
                           const SolverConfig& config) {
    require(config.method == Method::rgrk_sa, "solve_rgrk_sa: config.method must be rgrk-sa");
    require(!ensemble.abar().has_zero_row(), "solve_rgrk_sa: averaged matrix has a zero row");
    WorkingSystem system(ensemble.abar(), ensemble.bbar(), std::move(truth));
    return run_kaczmarz(system, config, greedy_sampler(config));
}

IterateTrace solve_rgrk_sa(const MeasurementEnsemble& ensemble, const SolverConfig& config) {
    return solve_rgrk_sa(ensemble, ensemble.truth_ptr(), config);
}

}  // namespace rgrk
