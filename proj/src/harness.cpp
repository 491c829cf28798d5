#include "rgrk/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <filesystem>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <thread>

#include "rgrk/io.hpp"
#include "rgrk/random.hpp"

namespace rgrk {

namespace {

constexpr std::uint64_t kSeedSystem = 1;
constexpr std::uint64_t kSeedNoise = 2;
constexpr std::uint64_t kSeedSolver = 3;

std::string compact(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

struct TrialOutcome {
    bool ok = false;
    std::string error;
    double final_error = 0.0;
    double iterations = 0.0;
    double cpu_seconds = 0.0;
    std::uint64_t hash = 0;
    std::vector<double> errors;
    std::vector<double> residuals;
    std::vector<double> elapsed;
};

TrialOutcome summarize(const IterateTrace& trace, std::uint64_t hash) {
    TrialOutcome out;
    out.ok = true;
    out.hash = hash;
    out.final_error = trace.final_relative_error();
    out.iterations = static_cast<double>(trace.iterations());
    out.cpu_seconds = trace.elapsed_seconds();
    out.errors.reserve(trace.records.size());
    out.residuals.reserve(trace.records.size());
    out.elapsed.reserve(trace.records.size());
    for (const IterationRecord& rec : trace.records) {
        out.errors.push_back(rec.relative_error);
        out.residuals.push_back(rec.residual_norm);
        out.elapsed.push_back(rec.elapsed_seconds);
    }
    return out;
}

std::vector<MedianTracePoint> median_curve(const std::vector<TrialOutcome>& outcomes) {
    Index length = 0;
    for (const auto& o : outcomes) length = std::max(length, o.errors.size());
    std::vector<MedianTracePoint> curve(length);
    std::vector<double> e, r, t;
    for (Index k = 0; k < length; ++k) {
        e.clear();
        r.clear();
        t.clear();
        for (const auto& o : outcomes) {
            if (o.errors.empty()) continue;
            const Index at = std::min(k, o.errors.size() - 1);
            e.push_back(o.errors[at]);
            r.push_back(o.residuals[at]);
            t.push_back(o.elapsed[at]);
        }
        curve[k] = {k, median(e), median(r), median(t)};
    }
    return curve;
}

unsigned worker_count(unsigned requested, Index work) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<Index>(n, std::max<Index>(work, 1)));
}

}  // namespace

Index measurements_used(const MethodSpec& m) { return m.method == Method::rgrk_sa ? m.n_measurements : 1; }

TrialSystem make_trial_system(const ExperimentSpec& spec, Index source_index, Index trial) {
    require(source_index < spec.sources.size(), "make_trial_system: source index out of range");
    const MatrixSource& source = spec.sources[source_index];
    if (source.kind == MatrixSource::Kind::matrix_market) {
        const RowMatrix fixed = io::load_matrix_market(source.path);
        return make_trial_system(spec, source_index, &fixed, trial);
    }
    return make_trial_system(spec, source_index, nullptr, trial);
}

TrialSystem make_trial_system(const ExperimentSpec& spec, Index source_index, const RowMatrix* fixed_matrix,
                              Index trial) {
    require(source_index < spec.sources.size(), "make_trial_system: source index out of range");
    const MatrixSource& source = spec.sources[source_index];
    TrialSystem data;
    const std::uint64_t system_seed = derive_seed(spec.base_seed, {kSeedSystem, source_index, trial});
    if (source.kind == MatrixSource::Kind::gaussian) {
        data.truth = std::make_shared<const GroundTruth>(
            generate_gaussian_ground_truth(source.rows, source.cols, system_seed, spec.normalize_rows));
    } else {
        require(fixed_matrix != nullptr, "make_trial_system: Matrix Market source without a matrix");
        data.truth = std::make_shared<const GroundTruth>(ground_truth_for_matrix(*fixed_matrix, system_seed));
    }

    NoiseSpec noise = spec.noise;
    noise.seed = derive_seed(spec.base_seed, {kSeedNoise, source_index, trial});
    if (noise.kind == NoiseKind::multiplicative) {
        data.multiplicative = make_multiplicative_noisy(*data.truth, noise, noise.seed);
        data.first_measurement_hash[1] = hash_system(data.multiplicative->a, data.multiplicative->b);
        return data;
    }

    std::vector<Index> counts;
    for (const MethodSpec& m : spec.methods) counts.push_back(measurements_used(m));
    if (counts.empty()) counts.push_back(1);
    std::sort(counts.begin(), counts.end());
    counts.erase(std::unique(counts.begin(), counts.end()), counts.end());
    auto ensembles = make_additive_ensembles(data.truth, counts, noise);
    for (Index c = 0; c < counts.size(); ++c) {
        const Measurement first = ensembles[c].measurement(0);
        data.first_measurement_hash[counts[c]] = hash_system(first.a, first.b);
        data.ensembles.emplace(counts[c], std::move(ensembles[c]));
    }
    return data;
}

std::uint64_t solver_seed(const ExperimentSpec& spec, Index source_index, Index trial, Index config) {
    return derive_seed(spec.base_seed, {kSeedSolver, source_index, trial, config});
}

IterateTrace solve_trial(const ExperimentSpec& spec, const TrialSystem& data, Index config, std::uint64_t seed) {
    require(config < spec.methods.size(), "solve_trial: configuration index out of range");
    const MethodSpec& method = spec.methods[config];
    SolverConfig cfg;
    cfg.method = method.method;
    cfg.theta = method.theta;
    cfg.max_iterations = spec.max_iterations;
    cfg.stop_tolerance = spec.stop_tolerance;
    cfg.seed = seed;
    cfg.track_error = true;

    if (data.multiplicative) {
        require(method.method != Method::rgrk_sa, "signal averaging requires additive noise");
        WorkingSystem sys(data.multiplicative->a, data.multiplicative->b, data.truth);
        return method.method == Method::rk ? solve_rk(sys, cfg) : solve_rgrk(sys, cfg);
    }
    const auto it = data.ensembles.find(measurements_used(method));
    require(it != data.ensembles.end(), "solve_trial: no ensemble for the requested measurement count");
    if (method.method == Method::rgrk_sa) return solve_rgrk_sa(it->second, data.truth, cfg);
    WorkingSystem sys(it->second.abar(), it->second.bbar(), data.truth);
    return method.method == Method::rk ? solve_rk(sys, cfg) : solve_rgrk(sys, cfg);
}

std::string TrialSummary::label() const {
    std::string out = matrix.empty() ? std::string() : matrix + "/";
    out += std::string(method_name(method)) + "_theta" + compact(theta) + "_N" + std::to_string(n_measurements);
    if (grk_equivalent) out += "_grk";
    return out;
}

MatrixSource MatrixSource::gaussian(Index rows, Index cols) {
    MatrixSource s;
    s.kind = Kind::gaussian;
    s.rows = rows;
    s.cols = cols;
    return s;
}

MatrixSource MatrixSource::matrix_market(std::string path, bool optional) {
    MatrixSource s;
    s.kind = Kind::matrix_market;
    s.path = std::move(path);
    s.optional = optional;
    return s;
}

std::string MatrixSource::name() const {
    if (kind == Kind::gaussian) return "gaussian-" + std::to_string(rows) + "x" + std::to_string(cols);
    return std::filesystem::path(path).stem().string();
}

void ExperimentSpec::validate() const {
    require(trials >= 1, "ExperimentSpec: trials must be at least 1");
    require(max_iterations >= 1, "ExperimentSpec: max_iterations must be at least 1");
    require(stop_tolerance > 0.0, "ExperimentSpec: stop_tolerance must be positive");
    require(!sources.empty(), "ExperimentSpec: no matrix source");
    require(!methods.empty(), "ExperimentSpec: no methods");
    noise.validate();
    for (const auto& s : sources) {
        if (s.kind == MatrixSource::Kind::gaussian) {
            require(s.rows >= 1 && s.cols >= 1, "ExperimentSpec: Gaussian source needs positive dimensions");
        } else {
            require(!s.path.empty(), "ExperimentSpec: Matrix Market source needs a path");
        }
    }
    for (const auto& m : methods) {
        require(m.n_measurements >= 1, "ExperimentSpec: N must be at least 1");
        require(m.theta >= 0.0 && m.theta <= 1.0, "ExperimentSpec: theta must lie in [0, 1]");
    }
}

std::vector<TrialSummary> run_trials(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<TrialSummary> all;

    for (Index s = 0; s < spec.sources.size(); ++s) {
        const MatrixSource& source = spec.sources[s];
        std::vector<TrialSummary> summaries(spec.methods.size());
        for (Index c = 0; c < spec.methods.size(); ++c) {
            TrialSummary& sum = summaries[c];
            sum.method = spec.methods[c].method;
            sum.theta = spec.methods[c].theta;
            sum.n_measurements = measurements_used(spec.methods[c]);
            sum.matrix = source.name();
            sum.trials = spec.trials;
            sum.grk_equivalent = sum.method != Method::rk && sum.theta == 0.5;
            sum.solver_seed_base = spec.base_seed;
        }

        std::unique_ptr<RowMatrix> fixed;
        if (source.kind == MatrixSource::Kind::matrix_market) {
            if (source.optional && !std::filesystem::exists(source.path)) continue;
            try {
                fixed = std::make_unique<RowMatrix>(io::load_matrix_market(source.path));
            } catch (const std::exception& ex) {
                for (auto& sum : summaries) sum.error = std::string("loading ") + source.path + ": " + ex.what();
                all.insert(all.end(), summaries.begin(), summaries.end());
                continue;
            }
        }

        // outcomes[config][trial]
        std::vector<std::vector<TrialOutcome>> outcomes(spec.methods.size(), std::vector<TrialOutcome>(spec.trials));
        std::atomic<Index> next{0};
        auto worker = [&] {
            for (Index t = next++; t < spec.trials; t = next++) {
                TrialSystem data;
                try {
                    data = make_trial_system(spec, s, fixed.get(), t);
                } catch (const std::exception& ex) {
                    for (auto& per_config : outcomes) per_config[t].error = std::string("generating system: ") + ex.what();
                    continue;
                }
                for (Index c = 0; c < spec.methods.size(); ++c) {
                    try {
                        const IterateTrace trace = solve_trial(spec, data, c, solver_seed(spec, s, t, c));
                        const Index key = data.multiplicative ? 1 : measurements_used(spec.methods[c]);
                        outcomes[c][t] = summarize(trace, data.first_measurement_hash.at(key));
                    } catch (const std::exception& ex) {
                        outcomes[c][t].error = ex.what();
                    }
                }
            }
        };
        const unsigned workers = worker_count(spec.jobs, spec.trials);
        if (workers <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        }

        for (Index c = 0; c < spec.methods.size(); ++c) {
            TrialSummary& sum = summaries[c];
            for (Index t = 0; t < spec.trials; ++t) {
                const TrialOutcome& o = outcomes[c][t];
                if (!o.ok) {
                    sum.error = "trial " + std::to_string(t) + ": " + o.error;
                    break;
                }
                sum.final_errors.push_back(o.final_error);
                sum.iterations.push_back(o.iterations);
                sum.cpu_seconds.push_back(o.cpu_seconds);
                sum.system_hashes.push_back(o.hash);
            }
            if (!sum.ok()) continue;
            sum.median_final_error = median(sum.final_errors);
            sum.median_iterations = median(sum.iterations);
            sum.median_cpu_seconds = median(sum.cpu_seconds);
            sum.median_trace = median_curve(outcomes[c]);
        }
        all.insert(all.end(), summaries.begin(), summaries.end());
    }
    return all;
}

std::vector<TrialSummary> theta_sweep(ExperimentSpec spec, const std::vector<double>& thetas, Index n_measurements) {
    require(!thetas.empty(), "theta_sweep: empty theta list");
    spec.methods.clear();
    for (double theta : thetas) {
        require(theta >= 0.0 && theta <= 1.0, "theta_sweep: theta must lie in [0, 1]");
        spec.methods.push_back({Method::rgrk, theta, 1});
        spec.methods.push_back({Method::rgrk_sa, theta, n_measurements});
    }
    return run_trials(spec);
}

std::vector<MethodSpec> comparison_methods(Index n_measurements) {
    return {{Method::rk, 1.0, 1},
            {Method::rgrk, 0.5, 1},
            {Method::rgrk, 1.0, 1},
            {Method::rgrk_sa, 0.5, n_measurements},
            {Method::rgrk_sa, 1.0, n_measurements}};
}

std::vector<TrialSummary> compare_methods(ExperimentSpec spec) {
    if (spec.methods.empty()) spec.methods = comparison_methods();
    auto has = [&spec](Method m) {
        return std::any_of(spec.methods.begin(), spec.methods.end(), [m](const MethodSpec& s) { return s.method == m; });
    };
    require(has(Method::rk) && has(Method::rgrk) && has(Method::rgrk_sa),
            "compare_methods: methods must include rk, rgrk and rgrk-sa");
    return run_trials(spec);
}

double median(std::vector<double> values) {
    require(!values.empty(), "median: empty list");
    const Index n = values.size();
    const Index mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<Index> order(v.size());
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&v](Index a, Index b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (Index i = 0; i < order.size();) {
        Index j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (Index k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "spearman: need two equal-length samples of size >= 2");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (Index i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    require(sxx > 0.0 && syy > 0.0, "spearman: constant sample");
    return sxy / std::sqrt(sxx * syy);
}

std::uint64_t hash_system(const RowMatrix& a, const DenseVector& b) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](double v) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int k = 0; k < 8; ++k) {
            h ^= (bits >> (8 * k)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    std::vector<double> row(a.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        const RowView r = a.row(i);
        if (r.sparse) {
            std::fill(row.begin(), row.end(), 0.0);
            for (Index k = 0; k < r.values.size(); ++k) row[static_cast<Index>(r.columns[k])] = r.values[k];
            for (double v : row) mix(v);
        } else {
            for (double v : r.values) mix(v);
        }
    }
    for (double v : b) mix(v);
    return h;
}

}  // namespace rgrk
