#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rgrk/cli.hpp"

namespace rgrk::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view text, T& value) {
    if constexpr (std::is_floating_point_v<T>) {
        if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    }
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    return ec == std::errc() && ptr == text.data() + text.size();
}

// Shortest representation that parses back to the same double.
std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

const char* noise_name(NoiseKind kind) { return kind == NoiseKind::additive ? "additive" : "multiplicative"; }

}  // namespace

std::pair<Index, Index> parse_dimensions(std::string_view text) {
    const auto x = text.find_first_of("xX");
    Index m = 0;
    Index n = 0;
    if (x == std::string_view::npos || !parse_number(text.substr(0, x), m) || !parse_number(text.substr(x + 1), n) ||
        m == 0 || n == 0) {
        throw std::invalid_argument("expected dimensions MxN, got '" + std::string(text) + "'");
    }
    return {m, n};
}

std::string serialize_config(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "name = " << spec.name << '\n';
    for (const MatrixSource& s : spec.sources) {
        if (s.kind == MatrixSource::Kind::gaussian) {
            out << "source = gaussian " << s.rows << 'x' << s.cols << '\n';
        } else {
            out << "source = " << (s.optional ? "mtx? " : "mtx ") << s.path << '\n';
        }
    }
    out << "normalize_rows = " << (spec.normalize_rows ? "true" : "false") << '\n'
        << "noise = " << noise_name(spec.noise.kind) << '\n'
        << "sigma_e = " << shortest(spec.noise.sigma_e) << '\n'
        << "sigma_eps = " << shortest(spec.noise.sigma_eps) << '\n';
    for (const MethodSpec& m : spec.methods) {
        out << "method = " << method_name(m.method) << " theta=" << shortest(m.theta)
            << " N=" << m.n_measurements << '\n';
    }
    out << "trials = " << spec.trials << '\n'
        << "max_iters = " << spec.max_iterations << '\n'
        << "tol = " << shortest(spec.stop_tolerance) << '\n'
        << "seed = " << spec.base_seed << '\n'
        << "jobs = " << spec.jobs << '\n';
    return out.str();
}

ExperimentSpec parse_config(std::string_view text, const std::string& source) {
    ExperimentSpec spec;
    Index line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const std::string_view raw = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        auto fail = [&](const std::string& what) { throw ParseError(source, line_no, what); };
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));

        auto number = [&](auto& target) {
            if (!parse_number(value, target)) fail("invalid value '" + std::string(value) + "' for " + key);
        };

        if (key == "name") {
            spec.name = std::string(value);
        } else if (key == "source") {
            const auto space = value.find(' ');
            const std::string_view kind = value.substr(0, space);
            const std::string_view rest = space == std::string_view::npos ? std::string_view{} : trim(value.substr(space));
            if (rest.empty()) fail("source needs an argument");
            if (kind == "gaussian") {
                try {
                    const auto [m, n] = parse_dimensions(rest);
                    spec.sources.push_back(MatrixSource::gaussian(m, n));
                } catch (const std::invalid_argument& ex) {
                    fail(ex.what());
                }
            } else if (kind == "mtx" || kind == "mtx?") {
                spec.sources.push_back(MatrixSource::matrix_market(std::string(rest), kind == "mtx?"));
            } else {
                fail("unknown source kind '" + std::string(kind) + "'");
            }
        } else if (key == "normalize_rows") {
            if (value == "true") {
                spec.normalize_rows = true;
            } else if (value == "false") {
                spec.normalize_rows = false;
            } else {
                fail("normalize_rows must be true or false");
            }
        } else if (key == "noise") {
            if (value == "additive") {
                spec.noise.kind = NoiseKind::additive;
            } else if (value == "multiplicative") {
                spec.noise.kind = NoiseKind::multiplicative;
            } else {
                fail("noise must be additive or multiplicative");
            }
        } else if (key == "sigma_e") {
            number(spec.noise.sigma_e);
        } else if (key == "sigma_eps") {
            number(spec.noise.sigma_eps);
        } else if (key == "method") {
            std::istringstream fields{std::string(value)};
            std::string token;
            fields >> token;
            const auto method = parse_method(token);
            if (!method) fail("unknown method '" + token + "'");
            MethodSpec m{*method, 1.0, 1};
            while (fields >> token) {
                if (token.starts_with("theta=")) {
                    if (!parse_number(std::string_view(token).substr(6), m.theta)) fail("invalid theta '" + token + "'");
                } else if (token.starts_with("N=")) {
                    if (!parse_number(std::string_view(token).substr(2), m.n_measurements)) {
                        fail("invalid N '" + token + "'");
                    }
                } else {
                    fail("unknown method field '" + token + "'");
                }
            }
            spec.methods.push_back(m);
        } else if (key == "trials") {
            number(spec.trials);
        } else if (key == "max_iters") {
            number(spec.max_iterations);
        } else if (key == "tol") {
            number(spec.stop_tolerance);
        } else if (key == "seed") {
            number(spec.base_seed);
        } else if (key == "jobs") {
            number(spec.jobs);
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

void save_config(const ExperimentSpec& spec, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    out << serialize_config(spec);
    if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace rgrk::cli
