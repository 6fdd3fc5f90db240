#include "enrnn/matrix.hpp"

#include <cmath>
#include <cstdlib>

namespace enrnn {

DenseMatrix::DenseMatrix(std::size_t r, std::size_t c, std::vector<double> d)
    : rows(r), cols(c), data(std::move(d)) {
    if (data.size() != rows * cols)
        throw ContractViolation("DenseMatrix: data length does not match rows*cols");
    if (!all_finite())
        throw ContractViolation("DenseMatrix: non-finite entry on construction");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> r) {
    std::size_t nr = r.size();
    std::size_t nc = nr ? r.begin()->size() : 0;
    std::vector<double> d;
    d.reserve(nr * nc);
    for (const auto& rr : r) {
        if (rr.size() != nc) throw ContractViolation("from_rows: ragged rows");
        for (double v : rr) d.push_back(v);
    }
    return DenseMatrix(nr, nc, std::move(d));
}

void DenseMatrix::fill(double v) {
    for (double& x : data) x = v;
}

bool DenseMatrix::all_finite() const {
    for (double x : data)
        if (!std::isfinite(x)) return false;
    return true;
}

double ComplexVector::norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) s += re[i] * re[i] + im[i] * im[i];
    return std::sqrt(s);
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols != B.rows) throw ContractViolation("matmul: inner dimensions differ");
    DenseMatrix C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i) {
        double* crow = C.row(i);
        const double* arow = A.row(i);
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double a = arow[k];
            const double* brow = B.row(k);
            for (std::size_t j = 0; j < B.cols; ++j) crow[j] += a * brow[j];
        }
    }
    return C;
}

DenseMatrix matmul_transA(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows != B.rows) throw ContractViolation("matmul_transA: inner dimensions differ");
    DenseMatrix C(A.cols, B.cols);
    for (std::size_t k = 0; k < A.rows; ++k) {
        const double* arow = A.row(k);
        const double* brow = B.row(k);
        for (std::size_t i = 0; i < A.cols; ++i) {
            double* crow = C.row(i);
            const double a = arow[i];
            for (std::size_t j = 0; j < B.cols; ++j) crow[j] += a * brow[j];
        }
    }
    return C;
}

DenseMatrix matmul_transB(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.cols != B.cols) throw ContractViolation("matmul_transB: inner dimensions differ");
    DenseMatrix C(A.rows, B.rows);
    for (std::size_t i = 0; i < A.rows; ++i) {
        const double* arow = A.row(i);
        double* crow = C.row(i);
        for (std::size_t j = 0; j < B.rows; ++j) {
            const double* brow = B.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < A.cols; ++k) s += arow[k] * brow[k];
            crow[j] = s;
        }
    }
    return C;
}

DenseMatrix transpose(const DenseMatrix& A) {
    DenseMatrix T(A.cols, A.rows);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
    return T;
}

DenseMatrix hadamard(const DenseMatrix& A, const DenseMatrix& B) {
    if (!A.same_shape(B)) throw ContractViolation("hadamard: shape mismatch");
    DenseMatrix C(A.rows, A.cols);
    for (std::size_t i = 0; i < A.size(); ++i) C.data[i] = A.data[i] * B.data[i];
    return C;
}

void add_inplace(DenseMatrix& A, const DenseMatrix& B, double scale) {
    if (!A.same_shape(B)) throw ContractViolation("add_inplace: shape mismatch");
    for (std::size_t i = 0; i < A.size(); ++i) A.data[i] += scale * B.data[i];
}

void scale_inplace(DenseMatrix& A, double s) {
    for (double& x : A.data) x *= s;
}

DenseMatrix scaled(const DenseMatrix& A, double s) {
    DenseMatrix C = A;
    scale_inplace(C, s);
    return C;
}

DenseMatrix add(const DenseMatrix& A, const DenseMatrix& B) {
    DenseMatrix C = A;
    add_inplace(C, B);
    return C;
}

DenseMatrix sub(const DenseMatrix& A, const DenseMatrix& B) {
    DenseMatrix C = A;
    add_inplace(C, B, -1.0);
    return C;
}

void add_col_broadcast(DenseMatrix& M, const DenseMatrix& v) {
    if (v.rows != M.rows || v.cols != 1)
        throw ContractViolation("add_col_broadcast: bias must be rows x 1");
    for (std::size_t i = 0; i < M.rows; ++i) {
        double* mrow = M.row(i);
        const double b = v(i, 0);
        for (std::size_t j = 0; j < M.cols; ++j) mrow[j] += b;
    }
}

DenseMatrix row_sum(const DenseMatrix& M) {
    DenseMatrix s(M.rows, 1);
    for (std::size_t i = 0; i < M.rows; ++i) {
        const double* mrow = M.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < M.cols; ++j) acc += mrow[j];
        s(i, 0) = acc;
    }
    return s;
}

double frobenius_norm(const DenseMatrix& A) {
    double s = 0.0;
    for (double x : A.data) s += x * x;
    return std::sqrt(s);
}

double sum_all(const DenseMatrix& A) {
    double s = 0.0;
    for (double x : A.data) s += x;
    return s;
}

double max_abs(const DenseMatrix& A) {
    double m = 0.0;
    for (double x : A.data) m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(const DenseMatrix& A, const DenseMatrix& B) {
    if (!A.same_shape(B)) throw ContractViolation("max_abs_diff: shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) m = std::max(m, std::abs(A.data[i] - B.data[i]));
    return m;
}

DenseMatrix solve(const DenseMatrix& A, const DenseMatrix& B) {
    if (A.rows != A.cols) throw ContractViolation("solve: A must be square");
    if (A.rows != B.rows) throw ContractViolation("solve: dimension mismatch");
    const std::size_t n = A.rows;
    DenseMatrix lu = A;
    DenseMatrix X = B;
    std::vector<std::size_t> piv(n);
    for (std::size_t i = 0; i < n; ++i) piv[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        double best = std::abs(lu(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = std::abs(lu(i, k));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0) throw SolverFailure("solve: singular matrix", 0.0);
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(p, j));
            for (std::size_t j = 0; j < X.cols; ++j) std::swap(X(k, j), X(p, j));
        }
        const double pivot = lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / pivot;
            lu(i, k) = f;
            if (f == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            for (std::size_t j = 0; j < X.cols; ++j) X(i, j) -= f * X(k, j);
        }
    }
    // back substitution
    for (std::size_t ri = n; ri-- > 0;) {
        for (std::size_t j = 0; j < X.cols; ++j) {
            double acc = X(ri, j);
            for (std::size_t k = ri + 1; k < n; ++k) acc -= lu(ri, k) * X(k, j);
            X(ri, j) = acc / lu(ri, ri);
        }
    }
    return X;
}

}  // namespace enrnn
