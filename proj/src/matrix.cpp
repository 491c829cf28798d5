#include "rgrk/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rgrk {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ContractViolation(std::string(what) + ": non-finite entry");
    }
}

}  // namespace

DenseVector::DenseVector(Index size, double fill) : values_(size, fill) {
    require(std::isfinite(fill), "DenseVector: non-finite fill value");
}

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
    require_finite(values_, "DenseVector");
}

DenseVector::DenseVector(std::initializer_list<double> values) : values_(values) {
    require_finite(values_, "DenseVector");
}

double DenseVector::norm_sq() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
}

double DenseVector::norm() const noexcept { return std::sqrt(norm_sq()); }

RowMatrix RowMatrix::dense(Index rows, Index cols, std::vector<double> values) {
    require(values.size() == rows * cols, "RowMatrix::dense: value count does not match rows*cols");
    require_finite(values, "RowMatrix");
    RowMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.sparse_ = false;
    m.values_ = std::move(values);
    m.finalize();
    return m;
}

RowMatrix RowMatrix::dense(std::initializer_list<std::initializer_list<double>> rows) {
    const Index m = rows.size();
    const Index n = m == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(m * n);
    for (const auto& r : rows) {
        require(r.size() == n, "RowMatrix::dense: ragged rows");
        values.insert(values.end(), r.begin(), r.end());
    }
    return dense(m, n, std::move(values));
}

RowMatrix RowMatrix::csr(Index rows, Index cols, std::vector<Index> row_offsets,
                         std::vector<ColIndex> col_indices, std::vector<double> values) {
    require(row_offsets.size() == rows + 1, "RowMatrix::csr: row_offsets must have rows+1 entries");
    require(row_offsets.front() == 0, "RowMatrix::csr: row_offsets must start at 0");
    require(row_offsets.back() == values.size() && col_indices.size() == values.size(),
            "RowMatrix::csr: offsets, indices and values disagree on nnz");
    for (Index i = 0; i < rows; ++i) {
        require(row_offsets[i] <= row_offsets[i + 1], "RowMatrix::csr: row_offsets not monotone");
        for (Index k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            const ColIndex c = col_indices[k];
            require(c >= 0 && static_cast<Index>(c) < cols, "RowMatrix::csr: column index out of range");
            if (k > row_offsets[i]) {
                require(col_indices[k - 1] < c, "RowMatrix::csr: column indices not strictly increasing");
            }
        }
    }
    require_finite(values, "RowMatrix");
    RowMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.sparse_ = true;
    m.values_ = std::move(values);
    m.offsets_ = std::move(row_offsets);
    m.col_idx_ = std::move(col_indices);
    m.finalize();
    return m;
}

RowMatrix RowMatrix::from_triplets(Index rows, Index cols, std::vector<Triplet> entries) {
    for (const auto& t : entries) {
        require(t.row < rows && t.col < cols, "RowMatrix::from_triplets: entry out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<Index> offsets(rows + 1, 0);
    std::vector<ColIndex> cols_out;
    std::vector<double> vals;
    cols_out.reserve(entries.size());
    vals.reserve(entries.size());
    for (Index k = 0; k < entries.size();) {
        const Index r = entries[k].row;
        const Index c = entries[k].col;
        double sum = 0.0;
        while (k < entries.size() && entries[k].row == r && entries[k].col == c) sum += entries[k++].value;
        if (sum != 0.0) {
            cols_out.push_back(static_cast<ColIndex>(c));
            vals.push_back(sum);
            ++offsets[r + 1];
        }
    }
    for (Index i = 0; i < rows; ++i) offsets[i + 1] += offsets[i];
    return csr(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals));
}

RowMatrix RowMatrix::identity(Index n) {
    std::vector<double> values(n * n, 0.0);
    for (Index i = 0; i < n; ++i) values[i * n + i] = 1.0;
    return dense(n, n, std::move(values));
}

RowMatrix RowMatrix::zeros(Index rows, Index cols) { return dense(rows, cols, std::vector<double>(rows * cols, 0.0)); }

Index RowMatrix::nnz() const noexcept {
    if (sparse_) return values_.size();
    return static_cast<Index>(std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

RowView RowMatrix::row(Index i) const {
    if (i >= rows_) throw ContractViolation("row index " + std::to_string(i) + " out of range [0, " +
                                            std::to_string(rows_) + ")");
    if (!sparse_) return {std::span<const double>(values_).subspan(i * cols_, cols_), {}, false};
    const Index begin = offsets_[i];
    const Index len = offsets_[i + 1] - begin;
    return {std::span<const double>(values_).subspan(begin, len),
            std::span<const ColIndex>(col_idx_).subspan(begin, len), true};
}

double RowMatrix::operator()(Index i, Index j) const {
    require(j < cols_, "column index out of range");
    const RowView r = row(i);
    if (!r.sparse) return r.values[j];
    auto it = std::lower_bound(r.columns.begin(), r.columns.end(), static_cast<ColIndex>(j));
    if (it == r.columns.end() || *it != static_cast<ColIndex>(j)) return 0.0;
    return r.values[static_cast<Index>(it - r.columns.begin())];
}

bool RowMatrix::has_zero_row() const noexcept {
    return std::any_of(row_norm_sq_.begin(), row_norm_sq_.end(), [](double v) { return v == 0.0; });
}

std::span<const double> RowMatrix::dense_values() const noexcept {
    if (sparse_) return {};
    return values_;
}

RowMatrix RowMatrix::to_explicit_csr() const {
    std::vector<Index> offsets(rows_ + 1, 0);
    std::vector<ColIndex> cols;
    std::vector<double> vals;
    cols.reserve(rows_ * cols_);
    vals.reserve(rows_ * cols_);
    for (Index i = 0; i < rows_; ++i) {
        for (Index j = 0; j < cols_; ++j) {
            cols.push_back(static_cast<ColIndex>(j));
            vals.push_back((*this)(i, j));
        }
        offsets[i + 1] = vals.size();
    }
    return csr(rows_, cols_, std::move(offsets), std::move(cols), std::move(vals));
}

void RowMatrix::finalize() {
    row_norm_sq_.assign(rows_, 0.0);
    frob_sq_ = 0.0;
    for (Index i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (double v : row(i).values) s += v * v;
        row_norm_sq_[i] = s;
        frob_sq_ += s;
    }
}

double row_dot(const RowMatrix& a, Index i, std::span<const double> x) {
    require(x.size() == a.cols(), "row_dot: vector length does not match column count");
    const RowView r = a.row(i);
    double s = 0.0;
    if (r.sparse) {
        for (Index k = 0; k < r.values.size(); ++k) s += r.values[k] * x[static_cast<Index>(r.columns[k])];
    } else {
        for (Index j = 0; j < r.values.size(); ++j) s += r.values[j] * x[j];
    }
    return s;
}

void axpy_row(const RowMatrix& a, Index i, double alpha, std::span<double> x) {
    require(x.size() == a.cols(), "axpy_row: vector length does not match column count");
    const RowView r = a.row(i);
    if (r.sparse) {
        for (Index k = 0; k < r.values.size(); ++k) x[static_cast<Index>(r.columns[k])] += alpha * r.values[k];
    } else {
        for (Index j = 0; j < r.values.size(); ++j) x[j] += alpha * r.values[j];
    }
}

DenseVector residual(const RowMatrix& a, const DenseVector& x, const DenseVector& b) {
    require(x.size() == a.cols() && b.size() == a.rows(), "residual: dimension mismatch");
    std::vector<double> r(a.rows());
    for (Index i = 0; i < a.rows(); ++i) r[i] = row_dot(a, i, x) - b[i];
    return DenseVector(std::move(r));
}

DenseVector multiply(const RowMatrix& a, const DenseVector& x) {
    require(x.size() == a.cols(), "multiply: dimension mismatch");
    std::vector<double> y(a.rows());
    for (Index i = 0; i < a.rows(); ++i) y[i] = row_dot(a, i, x);
    return DenseVector(std::move(y));
}

double frobenius_norm_sq(const RowMatrix& a) { return a.frobenius_norm_sq(); }

double min_singular_value(const RowMatrix& a) {
    require(a.rows() > 0 && a.cols() > 0, "min_singular_value: empty matrix");
    const Eigen::MatrixXd dense = to_eigen(a);
    const Eigen::MatrixXd gram =
        a.cols() <= a.rows() ? Eigen::MatrixXd(dense.transpose() * dense) : Eigen::MatrixXd(dense * dense.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw InternalInvariantError("min_singular_value: eigen-solve failed");
    return std::sqrt(std::max(0.0, solver.eigenvalues().minCoeff()));
}

Eigen::MatrixXd to_eigen(const RowMatrix& a) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
    for (Index i = 0; i < a.rows(); ++i) {
        const RowView r = a.row(i);
        const auto ei = static_cast<Eigen::Index>(i);
        if (r.sparse) {
            for (Index k = 0; k < r.values.size(); ++k) out(ei, r.columns[k]) = r.values[k];
        } else {
            for (Index j = 0; j < r.values.size(); ++j) out(ei, static_cast<Eigen::Index>(j)) = r.values[j];
        }
    }
    return out;
}

RowMatrix from_eigen(const Eigen::MatrixXd& a) {
    const auto m = static_cast<Index>(a.rows());
    const auto n = static_cast<Index>(a.cols());
    std::vector<double> values(m * n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) values[i * n + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return RowMatrix::dense(m, n, std::move(values));
}

Eigen::VectorXd to_eigen(const DenseVector& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

DenseVector from_eigen(const Eigen::VectorXd& v) { return DenseVector(std::vector<double>(v.data(), v.data() + v.size())); }

}  // namespace rgrk
