#include <algorithm>

#include "rgrk/cli.hpp"

namespace rgrk::cli {

namespace {

ExperimentSpec simulated_base(std::string name) {
    ExperimentSpec s;
    s.name = std::move(name);
    s.sources = {MatrixSource::gaussian(400, 200)};
    s.noise.kind = NoiseKind::additive;
    s.noise.sigma_e = 0.01;
    s.noise.sigma_eps = 0.01;
    s.trials = 50;
    s.max_iterations = 4000;
    s.stop_tolerance = 1e-1;
    return s;
}

}  // namespace

std::vector<Preset> preset_catalog() {
    std::vector<Preset> out;

    ExperimentSpec theta = simulated_base("figure2-theta-sweep");
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        theta.methods.push_back({Method::rgrk, t, 1});
        theta.methods.push_back({Method::rgrk_sa, t, 10});
    }
    out.push_back({theta.name, "RGRK and RGRK-SA (N=10) for theta in {0.2,...,1}, 400x200 Gaussian", theta});

    ExperimentSpec nsweep = simulated_base("figure3-n-sweep");
    for (Index n : {1, 10, 100, 1000}) nsweep.methods.push_back({Method::rgrk_sa, 1.0, n});
    out.push_back({nsweep.name, "RGRK-SA (theta=1) for N in {1,10,100,1000}, 400x200 Gaussian", nsweep});

    ExperimentSpec simulated = simulated_base("figure4-simulated");
    simulated.methods = comparison_methods(20);
    out.push_back({simulated.name, "RK vs RGRK vs RGRK-SA (theta in {0.5,1}, N=20), 400x200 Gaussian", simulated});

    ExperimentSpec real = simulated_base("figure5-realworld");
    real.sources = {MatrixSource::matrix_market("suitesparse/ash958.mtx"),
                    MatrixSource::matrix_market("suitesparse/ash219.mtx"),
                    MatrixSource::matrix_market("suitesparse/abtaha1.mtx"),
                    MatrixSource::matrix_market("suitesparse/abtaha2.mtx", true)};
    real.max_iterations = 2000;
    real.methods = comparison_methods(20);
    out.push_back({real.name, "RK vs RGRK vs RGRK-SA on ash958, ash219, abtaha1, abtaha2", real});

    return out;
}

std::optional<Preset> find_preset(std::string_view name) {
    const auto catalog = preset_catalog();
    for (const Preset& p : catalog) {
        if (p.name == name) return p;
    }
    std::optional<Preset> match;
    for (const Preset& p : catalog) {
        if (!name.empty() && p.name.starts_with(name)) {
            if (match) return std::nullopt;
            match = p;
        }
    }
    return match;
}

}  // namespace rgrk::cli
