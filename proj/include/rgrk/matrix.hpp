#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rgrk/errors.hpp"

namespace rgrk {

using Index = std::size_t;
using ColIndex = std::int32_t;

// A length-k vector of finite doubles. Holds b, x_k, x-hat and residuals.
class DenseVector {
public:
    DenseVector() = default;
    explicit DenseVector(Index size, double fill = 0.0);
    explicit DenseVector(std::vector<double> values);
    DenseVector(std::initializer_list<double> values);

    Index size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double operator[](Index i) const { return values_[i]; }
    double& operator[](Index i) { return values_[i]; }

    std::span<const double> span() const noexcept { return values_; }
    std::span<double> span() noexcept { return values_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const double* data() const noexcept { return values_.data(); }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    double norm_sq() const noexcept;
    double norm() const noexcept;

    bool operator==(const DenseVector&) const = default;

private:
    std::vector<double> values_;
};

// One row of a RowMatrix. Dense rows carry n values and no column indices.
struct RowView {
    std::span<const double> values;
    std::span<const ColIndex> columns;
    bool sparse = false;
};

struct Triplet {
    Index row;
    Index col;
    double value;
};

// Row-accessible m-by-n matrix, dense row-major or CSR, with cached squared
// row norms and squared Frobenius norm. Immutable after construction.
//
// Construction is permissive: zero rows are allowed here (noise matrices
// need them). Solver-facing wrappers reject zero rows.
class RowMatrix {
public:
    RowMatrix() = default;

    // values in row-major order, size rows*cols
    static RowMatrix dense(Index rows, Index cols, std::vector<double> values);
    static RowMatrix dense(std::initializer_list<std::initializer_list<double>> rows);

    // Column indices must be strictly increasing within each row and in [0, cols).
    static RowMatrix csr(Index rows, Index cols, std::vector<Index> row_offsets,
                         std::vector<ColIndex> col_indices, std::vector<double> values);

    // Duplicates are summed, exact zeros (after summation) dropped.
    static RowMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> entries);

    static RowMatrix identity(Index n);
    static RowMatrix zeros(Index rows, Index cols);

    Index rows() const noexcept { return rows_; }
    Index cols() const noexcept { return cols_; }
    bool is_sparse() const noexcept { return sparse_; }
    Index nnz() const noexcept;

    RowView row(Index i) const;
    double operator()(Index i, Index j) const;

    double row_norm_sq(Index i) const { return row_norm_sq_.at(i); }
    std::span<const double> row_norms_sq() const noexcept { return row_norm_sq_; }
    double frobenius_norm_sq() const noexcept { return frob_sq_; }

    bool has_zero_row() const noexcept;

    // Dense row-major storage; empty for CSR.
    std::span<const double> dense_values() const noexcept;
    std::span<const Index> row_offsets() const noexcept { return offsets_; }
    std::span<const ColIndex> col_indices() const noexcept { return col_idx_; }

    // Same values as a CSR matrix holding every entry explicitly (zeros included).
    RowMatrix to_explicit_csr() const;

private:
    void finalize();

    Index rows_ = 0;
    Index cols_ = 0;
    bool sparse_ = false;
    std::vector<double> values_;
    std::vector<Index> offsets_;
    std::vector<ColIndex> col_idx_;
    std::vector<double> row_norm_sq_;
    double frob_sq_ = 0.0;
};

double row_dot(const RowMatrix& a, Index i, std::span<const double> x);
inline double row_dot(const RowMatrix& a, Index i, const DenseVector& x) {
    return row_dot(a, i, x.span());
}

// x += alpha * a_i
void axpy_row(const RowMatrix& a, Index i, double alpha, std::span<double> x);

// Ax - b
DenseVector residual(const RowMatrix& a, const DenseVector& x, const DenseVector& b);
DenseVector multiply(const RowMatrix& a, const DenseVector& x);

double frobenius_norm_sq(const RowMatrix& a);

// Smallest singular value (zero when rank deficient) via a symmetric
// eigen-solve on the Gram matrix of the smaller dimension. Desk scale only.
double min_singular_value(const RowMatrix& a);

Eigen::MatrixXd to_eigen(const RowMatrix& a);
RowMatrix from_eigen(const Eigen::MatrixXd& a);
Eigen::VectorXd to_eigen(const DenseVector& v);
DenseVector from_eigen(const Eigen::VectorXd& v);

}  // namespace rgrk
