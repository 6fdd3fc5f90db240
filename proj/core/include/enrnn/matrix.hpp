#pragma once
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "enrnn/errors.hpp"

namespace enrnn {

// Row-major dense real matrix, the universal numeric carrier. Zero
// rows/cols are legal (degenerate hidden-state blocks use them).
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows*cols entries, row-major

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    // Validating constructor: size and finiteness checked.
    DenseMatrix(std::size_t r, std::size_t c, std::vector<double> d);

    static DenseMatrix identity(std::size_t n);
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> r);

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
    double* row(std::size_t i) { return data.data() + i * cols; }
    const double* row(std::size_t i) const { return data.data() + i * cols; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }
    bool empty() const { return data.empty(); }

    void fill(double v);
    bool all_finite() const;
};

// Paired real/imaginary parts of a complex vector (eigenvectors u, v).
struct ComplexVector {
    std::vector<double> re;
    std::vector<double> im;

    ComplexVector() = default;
    explicit ComplexVector(std::size_t n) : re(n, 0.0), im(n, 0.0) {}
    std::size_t size() const { return re.size(); }
    double norm() const;
};

// C = A * B with fixed left-to-right accumulation over the inner index.
DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
// C = A^T * B
DenseMatrix matmul_transA(const DenseMatrix& A, const DenseMatrix& B);
// C = A * B^T
DenseMatrix matmul_transB(const DenseMatrix& A, const DenseMatrix& B);

DenseMatrix transpose(const DenseMatrix& A);
DenseMatrix hadamard(const DenseMatrix& A, const DenseMatrix& B);

void add_inplace(DenseMatrix& A, const DenseMatrix& B, double scale = 1.0);  // A += scale*B
void scale_inplace(DenseMatrix& A, double s);
DenseMatrix scaled(const DenseMatrix& A, double s);
DenseMatrix add(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix sub(const DenseMatrix& A, const DenseMatrix& B);

// M(:, j) += v for every column j (bias broadcast over a batch).
void add_col_broadcast(DenseMatrix& M, const DenseMatrix& v);
// k x 1 vector of row sums (bias gradients: reduce over the batch axis).
DenseMatrix row_sum(const DenseMatrix& M);

double frobenius_norm(const DenseMatrix& A);
double sum_all(const DenseMatrix& A);
double max_abs(const DenseMatrix& A);
double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B);

// Solves A X = B for square A by LU with partial pivoting.
DenseMatrix solve(const DenseMatrix& A, const DenseMatrix& B);

}  // namespace enrnn
