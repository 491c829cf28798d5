#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rgrk/bounds.hpp"
#include "rgrk/matrix.hpp"
#include "rgrk/solvers.hpp"
#include "rgrk/trial_summary.hpp"

namespace rgrk::io {

enum class MmFormat { coordinate, array };
enum class MmField { real, integer, pattern };
enum class MmSymmetry { general, symmetric };

struct MatrixMarketHeader {
    MmFormat format = MmFormat::coordinate;
    MmField field = MmField::real;
    MmSymmetry symmetry = MmSymmetry::general;
};

// Parses "%%MatrixMarket matrix <format> <field> <symmetry>" (case-insensitive).
MatrixMarketHeader parse_matrix_market_header(std::string_view line, const std::string& source = "<header>");

// Reads a real/integer/pattern, general/symmetric Matrix Market file into CSR.
// Symmetric storage is mirrored, pattern entries become 1.0, duplicates are
// summed and explicit zeros dropped. Errors carry the offending line number.
RowMatrix load_matrix_market(const std::filesystem::path& path);
RowMatrix parse_matrix_market(std::string_view text, const std::string& source = "<memory>");

double density(const RowMatrix& a);

struct TraceMeta {
    std::string run;
    Method method = Method::rgrk;
    double theta = 1.0;
    Index n_measurements = 1;
    std::uint64_t seed = 0;
};

struct TraceRow {
    std::string run;
    std::string method;
    double theta = 0.0;
    Index n_measurements = 1;
    std::uint64_t seed = 0;
    Index k = 0;
    double relative_error = 0.0;
    double residual_norm = 0.0;
    double elapsed_seconds = 0.0;
};

inline constexpr std::string_view kTraceHeader = "run,method,theta,N,seed,k,rel_error,residual_norm,elapsed_s";
inline constexpr std::string_view kSummaryHeader =
    "method,theta,N,matrix,trials,median_final_error,median_iters,median_cpu_s";

std::vector<TraceRow> trace_rows(const TraceMeta& meta, const IterateTrace& trace);
std::vector<TraceRow> median_trace_rows(const TrialSummary& summary);

// 17 significant digits, LF line endings. With include_timing = false the
// elapsed column is written as 0 so outputs are byte-comparable.
void write_trace_csv(const std::vector<TraceRow>& rows, const std::filesystem::path& path, bool include_timing = true);
void write_summary_csv(const std::vector<TrialSummary>& summaries, const std::filesystem::path& path,
                       bool include_timing = true);
void write_bound_report(const BoundReport& report, const std::filesystem::path& path);
std::string format_bound_report(const BoundReport& report);

// Dense comma-separated rows, no header; vectors one value per line.
void write_matrix_csv(const RowMatrix& a, const std::filesystem::path& path);
void write_vector_csv(const DenseVector& v, const std::filesystem::path& path);

// Shortest-round-trip-safe decimal: 17 significant digits.
std::string format_double(double value);

}  // namespace rgrk::io
