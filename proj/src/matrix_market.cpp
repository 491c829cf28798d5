#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rgrk/io.hpp"

namespace rgrk::io {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    Index pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        const Index start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos > start) tokens.push_back(line.substr(start, pos - start));
    }
    return tokens;
}

bool blank(std::string_view line) {
    return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

class LineReader {
public:
    LineReader(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    // Next line that is neither blank nor a comment; false at end of input.
    bool next_content(std::string_view& line) {
        while (next(line)) {
            if (blank(line) || line.front() == '%') continue;
            return true;
        }
        return false;
    }

    bool next(std::string_view& line) {
        if (pos_ >= text_.size()) return false;
        const Index end = std::min(text_.find('\n', pos_), text_.size());
        line = text_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos_ = end + 1;
        ++line_no_;
        return true;
    }

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(source_, line_no_, what); }
    Index line_no() const noexcept { return line_no_; }
    const std::string& source() const noexcept { return source_; }

private:
    std::string_view text_;
    std::string source_;
    Index pos_ = 0;
    Index line_no_ = 0;
};

Index parse_index(std::string_view token, const LineReader& reader, const char* what) {
    unsigned long long value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        reader.fail(std::string("invalid ") + what + " '" + std::string(token) + "'");
    }
    return static_cast<Index>(value);
}

double parse_value(std::string_view token, const LineReader& reader) {
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
        reader.fail("non-numeric value '" + std::string(token) + "'");
    }
    return value;
}

}  // namespace

MatrixMarketHeader parse_matrix_market_header(std::string_view line, const std::string& source) {
    const auto tokens = split_ws(line);
    if (tokens.empty() || lower(tokens[0]) != "%%matrixmarket") {
        throw ParseError(source, 1, "missing '%%MatrixMarket' banner");
    }
    if (tokens.size() != 5) throw ParseError(source, 1, "banner must have 5 fields");
    if (const auto object = lower(tokens[1]); object != "matrix") {
        throw ParseError(source, 1, "unsupported object '" + std::string(tokens[1]) + "'");
    }
    MatrixMarketHeader h;
    if (const auto format = lower(tokens[2]); format == "coordinate") {
        h.format = MmFormat::coordinate;
    } else if (format == "array") {
        h.format = MmFormat::array;
    } else {
        throw ParseError(source, 1, "unsupported format '" + std::string(tokens[2]) + "'");
    }
    if (const auto field = lower(tokens[3]); field == "real" || field == "double") {
        h.field = MmField::real;
    } else if (field == "integer") {
        h.field = MmField::integer;
    } else if (field == "pattern") {
        h.field = MmField::pattern;
    } else {
        throw ParseError(source, 1, "unsupported field '" + std::string(tokens[3]) + "'");
    }
    if (const auto symmetry = lower(tokens[4]); symmetry == "general") {
        h.symmetry = MmSymmetry::general;
    } else if (symmetry == "symmetric") {
        h.symmetry = MmSymmetry::symmetric;
    } else {
        throw ParseError(source, 1, "unsupported symmetry '" + std::string(tokens[4]) + "'");
    }
    if (h.format == MmFormat::array && h.field == MmField::pattern) {
        throw ParseError(source, 1, "unsupported field 'pattern' for array format");
    }
    return h;
}

RowMatrix parse_matrix_market(std::string_view text, const std::string& source) {
    LineReader reader(text, source);
    std::string_view line;
    if (!reader.next(line)) reader.fail("empty file");
    const MatrixMarketHeader header = parse_matrix_market_header(line, source);

    if (!reader.next_content(line)) reader.fail("missing size line");
    const auto size_tokens = split_ws(line);
    const bool coordinate = header.format == MmFormat::coordinate;
    if (size_tokens.size() != (coordinate ? 3u : 2u)) {
        reader.fail(coordinate ? "size line must be 'rows cols nonzeros'" : "size line must be 'rows cols'");
    }
    const Index m = parse_index(size_tokens[0], reader, "row count");
    const Index n = parse_index(size_tokens[1], reader, "column count");
    const bool symmetric = header.symmetry == MmSymmetry::symmetric;
    if (symmetric && m != n) reader.fail("symmetric matrix must be square");

    std::vector<Triplet> entries;
    auto add = [&](Index i, Index j, double v) {
        entries.push_back({i, j, v});
        if (symmetric && i != j) entries.push_back({j, i, v});
    };

    if (coordinate) {
        const Index declared = parse_index(size_tokens[2], reader, "nonzero count");
        entries.reserve(symmetric ? 2 * declared : declared);
        const Index want = header.field == MmField::pattern ? 2 : 3;
        Index seen = 0;
        while (reader.next_content(line)) {
            if (seen == declared) reader.fail("more entries than the declared " + std::to_string(declared));
            const auto t = split_ws(line);
            if (t.size() != want) reader.fail("expected " + std::to_string(want) + " fields per entry");
            const Index i = parse_index(t[0], reader, "row index");
            const Index j = parse_index(t[1], reader, "column index");
            if (i < 1 || i > m || j < 1 || j > n) {
                reader.fail("index (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
            }
            if (symmetric && j > i) reader.fail("symmetric storage must list the lower triangle only");
            const double v = header.field == MmField::pattern ? 1.0 : parse_value(t[2], reader);
            add(i - 1, j - 1, v);
            ++seen;
        }
        if (seen != declared) {
            reader.fail("expected " + std::to_string(declared) + " entries, found " + std::to_string(seen));
        }
    } else {
        // column-major; symmetric arrays list the lower triangle column by column
        Index col = 0;
        Index row = 0;
        const Index total = symmetric ? n * (n + 1) / 2 : m * n;
        Index seen = 0;
        while (reader.next_content(line)) {
            for (std::string_view token : split_ws(line)) {
                if (seen == total) reader.fail("more values than the declared dimensions");
                add(row, col, parse_value(token, reader));
                ++seen;
                if (++row == m) {
                    ++col;
                    row = symmetric ? col : 0;
                }
            }
        }
        if (seen != total) {
            reader.fail("expected " + std::to_string(total) + " values, found " + std::to_string(seen));
        }
    }
    return RowMatrix::from_triplets(m, n, std::move(entries));
}

RowMatrix load_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_matrix_market(buffer.str(), path.string());
}

double density(const RowMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return static_cast<double>(a.nnz()) / (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

}  // namespace rgrk::io
