#include <exception>
#include <filesystem>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "rgrk/cli.hpp"
#include "rgrk/io.hpp"

namespace rgrk::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string gaussian;
    std::vector<std::string> mtx;
    std::string method = "rgrk";
    double theta = 1.0;
    Index n_meas = 10;
    double sigma_e = 0.01;
    double sigma_eps = 0.01;
    std::string noise = "additive";
    Index max_iters = 4000;
    double tol = 1e-1;
    std::uint64_t seed = 0;
    Index trials = 50;
    bool normalize_rows = false;
    unsigned jobs = 0;
    std::string out;
    std::string preset;
    bool no_timing = false;
    std::string config;
};

// Flags registered on one subcommand, for "was it given" checks.
struct Flags {
    CLI::Option* gaussian = nullptr;
    CLI::Option* mtx = nullptr;
    CLI::Option* method = nullptr;
    CLI::Option* theta = nullptr;
    CLI::Option* n_meas = nullptr;
    CLI::Option* sigma_e = nullptr;
    CLI::Option* sigma_eps = nullptr;
    CLI::Option* noise = nullptr;
    CLI::Option* max_iters = nullptr;
    CLI::Option* tol = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* trials = nullptr;
    CLI::Option* normalize_rows = nullptr;
    CLI::Option* jobs = nullptr;
};

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

void add_source(CLI::App& cmd, Options& o, Flags& f, bool many) {
    f.gaussian = cmd.add_option("--gaussian", o.gaussian, "Random Gaussian matrix of size MxN (e.g. 400x200)");
    if (many) {
        f.mtx = cmd.add_option("--mtx", o.mtx, "Matrix Market file (repeatable)");
    } else {
        f.mtx = cmd.add_option("--mtx", o.mtx, "Matrix Market file")->expected(1);
    }
    f.gaussian->excludes(f.mtx);
    f.mtx->excludes(f.gaussian);
    f.normalize_rows = cmd.add_flag("--normalize-rows", o.normalize_rows, "Scale Gaussian rows to unit norm");
}

void add_noise(CLI::App& cmd, Options& o, Flags& f) {
    f.sigma_e = cmd.add_option("--sigma-e", o.sigma_e, "Matrix noise level")->capture_default_str()->check(
        CLI::NonNegativeNumber);
    f.sigma_eps = cmd.add_option("--sigma-eps", o.sigma_eps, "Right-hand side noise level")
                      ->capture_default_str()
                      ->check(CLI::NonNegativeNumber);
    f.noise = cmd.add_option("--noise", o.noise, "Noise model")
                  ->capture_default_str()
                  ->check(CLI::IsMember({"additive", "multiplicative"}));
    f.seed = cmd.add_option("--seed", o.seed, "Base seed")->capture_default_str();
}

void add_method(CLI::App& cmd, Options& o, Flags& f) {
    f.method = cmd.add_option("--method", o.method, "Solver")
                   ->capture_default_str()
                   ->check(CLI::IsMember({"rk", "rgrk", "rgrk-sa"}));
    f.theta = cmd.add_option("--theta", o.theta, "Greedy relaxation parameter in [0,1]")
                  ->capture_default_str()
                  ->check(CLI::Range(0.0, 1.0));
    f.n_meas = cmd.add_option("--n-meas", o.n_meas, "Measurements averaged by rgrk-sa")
                   ->capture_default_str()
                   ->check(CLI::PositiveNumber);
}

void add_stopping(CLI::App& cmd, Options& o, Flags& f) {
    f.max_iters = cmd.add_option("--max-iters", o.max_iters, "Iteration budget M")
                      ->capture_default_str()
                      ->check(CLI::PositiveNumber);
    f.tol = cmd.add_option("--tol", o.tol, "Stop when the relative error falls to this value")
                ->capture_default_str()
                ->check(CLI::PositiveNumber);
}

MatrixSource single_source(const Options& o) {
    if (!o.gaussian.empty()) {
        try {
            const auto [m, n] = parse_dimensions(o.gaussian);
            return MatrixSource::gaussian(m, n);
        } catch (const std::invalid_argument& ex) {
            throw UsageError(std::string("--gaussian: ") + ex.what());
        }
    }
    if (!o.mtx.empty()) return MatrixSource::matrix_market(o.mtx.front());
    throw UsageError("a matrix source is required: --gaussian MxN or --mtx PATH");
}

NoiseSpec noise_from(const Options& o) {
    NoiseSpec noise;
    noise.kind = o.noise == "multiplicative" ? NoiseKind::multiplicative : NoiseKind::additive;
    noise.sigma_e = o.sigma_e;
    noise.sigma_eps = o.sigma_eps;
    return noise;
}

MethodSpec method_from(const Options& o) {
    const Method m = *parse_method(o.method);
    return {m, o.theta, m == Method::rgrk_sa ? o.n_meas : 1};
}

// Single-trial spec shared by solve, bounds and gen.
ExperimentSpec single_spec(const Options& o, MethodSpec method) {
    ExperimentSpec spec;
    spec.name = "single";
    spec.sources = {single_source(o)};
    spec.normalize_rows = o.normalize_rows;
    spec.noise = noise_from(o);
    spec.methods = {method};
    spec.trials = 1;
    spec.max_iterations = o.max_iters;
    spec.stop_tolerance = o.tol;
    spec.base_seed = o.seed;
    spec.jobs = 1;
    return spec;
}

int run_solve(const Options& o, std::ostream& out) {
    const ExperimentSpec spec = single_spec(o, method_from(o));
    if (spec.noise.kind == NoiseKind::multiplicative && spec.methods[0].method == Method::rgrk_sa) {
        throw UsageError("rgrk-sa needs --noise additive");
    }
    const TrialSystem system = make_trial_system(spec, 0, 0);
    const std::uint64_t seed = solver_seed(spec, 0, 0, 0);
    const IterateTrace trace = solve_trial(spec, system, 0, seed);

    const MethodSpec& m = spec.methods[0];
    if (!o.out.empty()) {
        io::TraceMeta meta{"solve", m.method, m.theta, m.n_measurements, o.seed};
        io::write_trace_csv(io::trace_rows(meta, trace), o.out, !o.no_timing);
    }
    out << method_name(m.method) << " theta=" << io::format_double(m.theta) << " N=" << m.n_measurements
        << " iterations=" << trace.iterations() << " rel_error=" << io::format_double(trace.final_relative_error())
        << " stop=" << termination_name(trace.termination) << '\n';
    return kExitOk;
}

int run_experiment(const Options& o, const Flags& f, std::ostream& out, std::ostream& err) {
    ExperimentSpec spec;
    bool have_base = false;
    if (!o.config.empty()) {
        spec = load_config(o.config);
        have_base = true;
    }
    if (!o.preset.empty()) {
        if (have_base) throw UsageError("--preset and --config are mutually exclusive");
        const auto preset = find_preset(o.preset);
        if (!preset) {
            std::string names;
            for (const Preset& p : preset_catalog()) names += " " + p.name;
            throw UsageError("unknown or ambiguous preset '" + o.preset + "'; available:" + names);
        }
        spec = preset->spec;
        have_base = true;
    }
    if (!have_base) {
        spec = ExperimentSpec{};
        spec.name = "custom";
        spec.noise = noise_from(o);
        spec.methods = {method_from(o)};
        spec.trials = o.trials;
        spec.max_iterations = o.max_iters;
        spec.stop_tolerance = o.tol;
        spec.base_seed = o.seed;
        spec.jobs = o.jobs;
        spec.normalize_rows = o.normalize_rows;
    }

    if (given(f.gaussian)) {
        spec.sources = {single_source(o)};
    } else if (given(f.mtx)) {
        spec.sources.clear();
        for (const auto& path : o.mtx) spec.sources.push_back(MatrixSource::matrix_market(path));
    }
    if (spec.sources.empty()) throw UsageError("a matrix source is required: --gaussian MxN or --mtx PATH");

    if (given(f.method)) spec.methods = {method_from(o)};
    for (MethodSpec& m : spec.methods) {
        if (given(f.theta)) m.theta = o.theta;
        if (given(f.n_meas) && m.method == Method::rgrk_sa) m.n_measurements = o.n_meas;
    }
    if (given(f.noise)) spec.noise.kind = noise_from(o).kind;
    if (given(f.sigma_e)) spec.noise.sigma_e = o.sigma_e;
    if (given(f.sigma_eps)) spec.noise.sigma_eps = o.sigma_eps;
    if (given(f.max_iters)) spec.max_iterations = o.max_iters;
    if (given(f.tol)) spec.stop_tolerance = o.tol;
    if (given(f.seed)) spec.base_seed = o.seed;
    if (given(f.trials)) spec.trials = o.trials;
    if (given(f.jobs)) spec.jobs = o.jobs;
    if (given(f.normalize_rows)) spec.normalize_rows = o.normalize_rows;

    try {
        spec.validate();
    } catch (const ContractViolation& ex) {
        throw UsageError(ex.what());
    }

    const auto summaries = run_trials(spec);
    bool failed = false;
    std::vector<io::TraceRow> median_rows;
    for (const TrialSummary& s : summaries) {
        if (!s.ok()) {
            err << s.label() << ": " << s.error << '\n';
            failed = true;
            continue;
        }
        out << s.label() << ": median_final_error=" << io::format_double(s.median_final_error)
            << " median_iters=" << io::format_double(s.median_iterations) << '\n';
        const auto rows = io::median_trace_rows(s);
        median_rows.insert(median_rows.end(), rows.begin(), rows.end());
    }
    if (!o.out.empty()) {
        const std::filesystem::path dir(o.out);
        std::vector<TrialSummary> ok;
        for (const TrialSummary& s : summaries) {
            if (s.ok()) ok.push_back(s);
        }
        io::write_summary_csv(ok, dir / "summary.csv", !o.no_timing);
        io::write_trace_csv(median_rows, dir / "median_trace.csv", !o.no_timing);
        save_config(spec, dir / "experiment.cfg");
    }
    return failed ? kExitRuntime : kExitOk;
}

// Reports the bound for the system the solver would see: the N-average under
// additive noise, or the single multiplicative draw.
int run_bounds(const Options& o, std::ostream& out) {
    const MethodSpec method{Method::rgrk_sa, o.theta, o.n_meas};
    ExperimentSpec spec = single_spec(o, method);
    if (spec.noise.kind == NoiseKind::multiplicative) spec.methods[0] = {Method::rgrk, o.theta, 1};
    const TrialSystem system = make_trial_system(spec, 0, 0);
    const GroundTruth& truth = *system.truth;

    BoundReport report;
    if (system.multiplicative) {
        const DenseVector eps = [&] {
            std::vector<double> v(truth.b.size());
            for (Index i = 0; i < v.size(); ++i) v[i] = system.multiplicative->b[i] - truth.b[i];
            return DenseVector(std::move(v));
        }();
        report = multiplicative_report(system.multiplicative->a, truth, system.multiplicative->perturbation, eps,
                                       o.theta);
    } else {
        const MeasurementEnsemble& ensemble = system.ensembles.at(o.n_meas);
        const auto [e, eps] = additive_noise_of(truth, ensemble.abar(), ensemble.bbar());
        report = theorem1_report(ensemble.abar(), truth, e, eps, o.theta);
    }
    out << io::format_bound_report(report);
    if (!o.out.empty()) io::write_bound_report(report, o.out);
    return kExitOk;
}

int run_gen(const Options& o, std::ostream& out) {
    const MethodSpec method{Method::rgrk_sa, 1.0, o.n_meas};
    ExperimentSpec spec = single_spec(o, method);
    if (spec.noise.kind == NoiseKind::multiplicative) spec.methods[0] = {Method::rgrk, 1.0, 1};
    const TrialSystem system = make_trial_system(spec, 0, 0);
    const std::filesystem::path dir(o.out);
    io::write_matrix_csv(system.truth->a, dir / "A.csv");
    io::write_vector_csv(system.truth->b, dir / "b.csv");
    io::write_vector_csv(system.truth->xhat, dir / "xhat.csv");
    if (system.multiplicative) {
        io::write_matrix_csv(system.multiplicative->a, dir / "A_noisy.csv");
        io::write_vector_csv(system.multiplicative->b, dir / "b_noisy.csv");
    } else {
        const MeasurementEnsemble& ensemble = system.ensembles.at(o.n_meas);
        io::write_matrix_csv(ensemble.abar(), dir / "A_noisy.csv");
        io::write_vector_csv(ensemble.bbar(), dir / "b_noisy.csv");
    }
    out << "wrote " << system.truth->a.rows() << "x" << system.truth->a.cols() << " system to " << dir.string()
        << '\n';
    return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Randomized Kaczmarz solvers (RK, RGRK, RGRK-SA) for doubly-noisy linear systems", "rgrk"};
    app.require_subcommand(1, 1);
    Options o;

    Flags solve_flags;
    CLI::App* solve = app.add_subcommand("solve", "Solve one noisy system and optionally write its trace CSV");
    add_source(*solve, o, solve_flags, false);
    add_method(*solve, o, solve_flags);
    add_noise(*solve, o, solve_flags);
    add_stopping(*solve, o, solve_flags);
    solve->add_option("--out", o.out, "Trace CSV path");
    solve->add_flag("--no-timing", o.no_timing, "Write 0 in the timing column");

    Flags exp_flags;
    CLI::App* experiment = app.add_subcommand("experiment", "Run a multi-trial experiment and write median CSVs");
    add_source(*experiment, o, exp_flags, true);
    add_method(*experiment, o, exp_flags);
    add_noise(*experiment, o, exp_flags);
    add_stopping(*experiment, o, exp_flags);
    exp_flags.trials =
        experiment->add_option("--trials", o.trials, "Trials per configuration")->capture_default_str()->check(
            CLI::PositiveNumber);
    exp_flags.jobs = experiment->add_option("--jobs", o.jobs, "Worker threads (0 = logical processors)")
                         ->capture_default_str();
    experiment->add_option("--preset", o.preset, "Named experiment (figure2-theta-sweep, figure3-n-sweep, "
                                                 "figure4-simulated, figure5-realworld; unique prefixes accepted)");
    experiment->add_option("--config", o.config, "Experiment config file; flags override its values");
    experiment->add_option("--out", o.out, "Output directory for summary.csv, median_trace.csv, experiment.cfg");
    experiment->add_flag("--no-timing", o.no_timing, "Write 0 in timing columns");

    Flags bounds_flags;
    CLI::App* bounds = app.add_subcommand("bounds", "Print the convergence bound quantities of one noisy system");
    add_source(*bounds, o, bounds_flags, false);
    bounds_flags.theta = bounds->add_option("--theta", o.theta, "Greedy relaxation parameter in [0,1]")
                             ->capture_default_str()
                             ->check(CLI::Range(0.0, 1.0));
    bounds_flags.n_meas = bounds->add_option("--n-meas", o.n_meas, "Measurements averaged (additive noise)")
                              ->capture_default_str()
                              ->check(CLI::PositiveNumber);
    add_noise(*bounds, o, bounds_flags);
    bounds->add_option("--out", o.out, "Bound report CSV path");

    Flags gen_flags;
    CLI::App* gen = app.add_subcommand("gen", "Write one exact and noisy system as CSV files");
    add_source(*gen, o, gen_flags, false);
    gen_flags.n_meas = gen->add_option("--n-meas", o.n_meas, "Measurements averaged (additive noise)")
                           ->capture_default_str()
                           ->check(CLI::PositiveNumber);
    add_noise(*gen, o, gen_flags);
    gen->add_option("--out", o.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        if (code == 0) return kExitOk;
        const auto chosen = app.get_subcommands();
        err << '\n' << (chosen.empty() ? app.help() : chosen.front()->help());
        return kExitUsage;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        if (active == solve) return run_solve(o, out);
        if (active == experiment) return run_experiment(o, exp_flags, out, err);
        if (active == bounds) return run_bounds(o, out);
        return run_gen(o, out);
    } catch (const UsageError& ex) {
        err << "usage error: " << ex.what() << "\n\n" << active->help();
        return kExitUsage;
    } catch (const ParseError& ex) {
        err << "config error: " << ex.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& ex) {
        err << "error (" << active->get_name() << "): " << ex.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace rgrk::cli
