#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rgrk/io.hpp"

namespace rgrk::io {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing: " + std::strerror(errno));
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed: " + std::strerror(errno));
}

}  // namespace

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::vector<TraceRow> trace_rows(const TraceMeta& meta, const IterateTrace& trace) {
    std::vector<TraceRow> rows;
    rows.reserve(trace.records.size());
    for (const IterationRecord& rec : trace.records) {
        rows.push_back({meta.run, std::string(method_name(meta.method)), meta.theta, meta.n_measurements, meta.seed,
                        rec.k, rec.relative_error, rec.residual_norm, rec.elapsed_seconds});
    }
    return rows;
}

std::vector<TraceRow> median_trace_rows(const TrialSummary& summary) {
    std::vector<TraceRow> rows;
    rows.reserve(summary.median_trace.size());
    const std::string run = summary.label() + "_median";
    for (const MedianTracePoint& p : summary.median_trace) {
        rows.push_back({run, std::string(method_name(summary.method)), summary.theta, summary.n_measurements,
                        summary.solver_seed_base, p.k, p.relative_error, p.residual_norm, p.elapsed_seconds});
    }
    return rows;
}

void write_trace_csv(const std::vector<TraceRow>& rows, const std::filesystem::path& path, bool include_timing) {
    std::ofstream out = open_output(path);
    out << kTraceHeader << '\n';
    const TraceRow* previous = nullptr;
    for (const TraceRow& row : rows) {
        if (previous != nullptr && previous->run == row.run && row.k <= previous->k) {
            throw ContractViolation("write_trace_csv: iteration index not strictly increasing within run '" + row.run +
                                    "'");
        }
        out << row.run << ',' << row.method << ',' << format_double(row.theta) << ',' << row.n_measurements << ','
            << row.seed << ',' << row.k << ',' << format_double(row.relative_error) << ','
            << format_double(row.residual_norm) << ',' << (include_timing ? format_double(row.elapsed_seconds) : "0")
            << '\n';
        previous = &row;
    }
    finish(out, path);
}

void write_summary_csv(const std::vector<TrialSummary>& summaries, const std::filesystem::path& path,
                       bool include_timing) {
    std::ofstream out = open_output(path);
    out << kSummaryHeader << '\n';
    for (const TrialSummary& s : summaries) {
        out << method_name(s.method) << ',' << format_double(s.theta) << ',' << s.n_measurements << ',' << s.matrix
            << ',' << s.trials << ',' << format_double(s.median_final_error) << ','
            << format_double(s.median_iterations) << ','
            << (include_timing ? format_double(s.median_cpu_seconds) : "0") << '\n';
    }
    finish(out, path);
}

std::string format_bound_report(const BoundReport& r) {
    std::ostringstream out;
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
    out << "key,value\n"
        << "theta," << format_double(r.theta) << '\n'
        << "N," << r.n_measurements << '\n'
        << "frob_sq," << format_double(r.frob_sq) << '\n'
        << "gamma," << format_double(r.gamma) << '\n'
        << "sigma_min," << opt(r.sigma_min) << '\n'
        << "sigma_min_tilde," << opt(r.sigma_min_tilde) << '\n'
        << "sigma_tilde_exact," << (r.sigma_tilde_exact ? 1 : 0) << '\n'
        << "sigma_tilde_sq," << format_double(r.sigma_tilde_sq) << '\n'
        << "contraction_first_step," << format_double(r.contraction_first_step) << '\n'
        << "contraction_steady," << format_double(r.contraction_steady) << '\n'
        << "horizon_numerator," << format_double(r.horizon_numerator) << '\n'
        << "horizon," << format_double(r.horizon) << '\n'
        << "horizon_per_n," << format_double(r.horizon_per_n) << '\n';
    return out.str();
}

void write_bound_report(const BoundReport& report, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    out << format_bound_report(report);
    finish(out, path);
}

void write_matrix_csv(const RowMatrix& a, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) out << (j ? "," : "") << format_double(a(i, j));
        out << '\n';
    }
    finish(out, path);
}

void write_vector_csv(const DenseVector& v, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (double x : v) out << format_double(x) << '\n';
    finish(out, path);
}

}  // namespace rgrk::io
