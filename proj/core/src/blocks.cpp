#include "enrnn/blocks.hpp"

#include <cmath>

namespace enrnn {

DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
    if (rows == 0 || cols == 0) return DenseMatrix(rows, cols);
    const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
    DenseMatrix M(rows, cols);
    for (double& x : M.data) x = rng.uniform(-s, s);
    return M;
}

RotationBlockInit RotationBlockInit::sample(std::size_t n, Rng& rng) {
    RotationBlockInit init;
    const std::size_t pairs = n / 2;
    init.thetas.reserve(pairs);
    init.gammas.reserve(pairs);
    for (std::size_t j = 0; j < pairs; ++j) {
        init.thetas.push_back(rng.uniform(0.0, M_PI / 2.0));
        init.gammas.push_back(rng.uniform(-1.0, 1.0));
    }
    if (n % 2 == 1) init.tail_gamma = rng.uniform(-1.0, 1.0);
    return init;
}

DenseMatrix RotationBlockInit::materialize() const {
    const std::size_t n = dim();
    DenseMatrix T(n, n);
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        const double ct = std::cos(thetas[j]), st = std::sin(thetas[j]);
        const double g = gammas[j];
        const std::size_t k = 2 * j;
        T(k, k) = g * ct;
        T(k, k + 1) = -g * st;
        T(k + 1, k) = g * st;
        T(k + 1, k + 1) = g * ct;
    }
    if (tail_gamma) T(n - 1, n - 1) = *tail_gamma;
    return T;
}

std::vector<std::complex<double>> RotationBlockInit::expected_eigenvalues() const {
    std::vector<std::complex<double>> eigs;
    for (std::size_t j = 0; j < thetas.size(); ++j) {
        const std::complex<double> lam =
            gammas[j] * std::complex<double>(std::cos(thetas[j]), std::sin(thetas[j]));
        eigs.push_back(lam);
        eigs.push_back(std::conj(lam));
    }
    if (tail_gamma) eigs.emplace_back(*tail_gamma, 0.0);
    return eigs;
}

DenseMatrix init_rotation_blocks(std::size_t n, Rng& rng) {
    if (n == 0) return DenseMatrix(0, 0);
    return RotationBlockInit::sample(n, rng).materialize();
}

EigenNormBlock EigenNormBlock::init(std::size_t dim, double epsilon, Rng& rng) {
    EigenNormBlock b;
    b.epsilon = epsilon;
    b.t_ = init_rotation_blocks(dim, rng);
    b.normalize();
    return b;
}

EigenNormBlock EigenNormBlock::from_matrix(DenseMatrix T, double epsilon, bool active) {
    if (T.rows != T.cols) throw ContractViolation("EigenNormBlock: T must be square");
    EigenNormBlock b;
    b.epsilon = epsilon;
    b.t_ = std::move(T);
    b.active_ = active;
    b.normalize();
    return b;
}

DenseMatrix& EigenNormBlock::mutable_T() {
    fresh_ = false;
    return t_;
}

void EigenNormBlock::activate() {
    if (!active_) {
        active_ = true;
        fresh_ = false;
    }
}

const DenseMatrix& EigenNormBlock::normalize() {
    if (dim() == 0) {
        w_ = t_;
        eig_ = DominantEigenData{};
        fresh_ = true;
        return w_;
    }
    eig_ = dominant_eigenpair(t_);
    if (active_) {
        w_ = scaled(t_, 1.0 / (eig_.rho + epsilon));
    } else {
        w_ = t_;
    }
    fresh_ = true;
    return w_;
}

DenseMatrix eigennorm_gradient_from_eig(const DenseMatrix& dL_dW, const DenseMatrix& W,
                                        double rho_tilde, const DominantEigenData& eig) {
    if (!dL_dW.same_shape(W)) throw ContractViolation("eigennorm gradient: shape mismatch");
    const double coupling = sum_all(hadamard(dL_dW, W)) / rho_tilde;
    DenseMatrix g = dL_dW;
    add_inplace(g, eig.C, -coupling);
    scale_inplace(g, 1.0 / rho_tilde);
    return g;
}

DenseMatrix EigenNormBlock::gradient(const DenseMatrix& dL_dW) const {
    if (!active_) throw ContractViolation("eigennorm gradient: block not active");
    if (!fresh_) throw ContractViolation("eigennorm gradient: stale eigen cache");
    if (eig_.defect_score < kDefectThreshold)
        throw DefectiveEigenvalue("eigennorm gradient: dominant eigenvalue near-multiple");
    return eigennorm_gradient_from_eig(dL_dW, w_, eig_.rho + epsilon, eig_);
}

UpdateOutcome update_step(EigenNormBlock& block, const DenseMatrix& dL_dW,
                          const ApplyUpdateFn& apply) {
    UpdateOutcome out;
    if (block.dim() == 0) return out;
    if (!dL_dW.same_shape(block.T()))
        throw ContractViolation("update_step: gradient shape mismatch");

    if (!block.active()) {
        // W == T, so the loss gradient w.r.t. T is dL_dW itself.
        apply(block.mutable_T(), dL_dW);
        block.normalize();
        if (block.eig().rho > 1.0) {
            block.activate();
            block.normalize();
            out.activated = true;
        }
        return out;
    }

    if (!block.cache_fresh())
        throw ContractViolation("update_step: stale eigen cache on active block");
    if (block.eig().defect_score < EigenNormBlock::kDefectThreshold) {
        // near-multiple dominant eigenvalue: skip normalization-aware routing
        // for this step and re-test after the update
        apply(block.mutable_T(), dL_dW);
        out.defective_fallback = true;
    } else {
        const DenseMatrix dT = block.gradient(dL_dW);
        apply(block.mutable_T(), dT);
    }
    block.normalize();
    return out;
}

CayleyOrthogonalBlock CayleyOrthogonalBlock::init(std::size_t dim, std::size_t n_negative,
                                                  Rng& rng) {
    CayleyOrthogonalBlock b;
    b.dim_ = dim;
    if (n_negative > dim) throw ContractViolation("CayleyOrthogonalBlock: n_negative > dim");
    b.d_.assign(dim, 1.0);
    for (std::size_t i = 0; i < n_negative; ++i) b.d_[i] = -1.0;

    // Block-diagonal skew init whose Cayley image is a rotation by -theta_j
    // per 2x2 block, theta_j ~ U[0, pi/2).
    DenseMatrix A(dim, dim);
    for (std::size_t j = 0; j + 1 < dim; j += 2) {
        const double theta = rng.uniform(0.0, M_PI / 2.0);
        const double t = std::sqrt((1.0 - std::cos(theta)) / (1.0 + std::cos(theta)));
        A(j, j + 1) = t;
        A(j + 1, j) = -t;
    }
    b.packed_ = pack_upper(A);
    b.forward();
    return b;
}

CayleyOrthogonalBlock CayleyOrthogonalBlock::from_packed(std::size_t dim, DenseMatrix packed,
                                                         std::vector<double> d_signs) {
    CayleyOrthogonalBlock b;
    b.dim_ = dim;
    if (packed.size() != b.packed_size())
        throw ContractViolation("CayleyOrthogonalBlock: packed size mismatch");
    if (d_signs.size() != dim)
        throw ContractViolation("CayleyOrthogonalBlock: diagonal size mismatch");
    b.packed_ = std::move(packed);
    b.d_ = std::move(d_signs);
    b.forward();
    return b;
}

DenseMatrix& CayleyOrthogonalBlock::mutable_packed() {
    fresh_ = false;
    return packed_;
}

DenseMatrix CayleyOrthogonalBlock::pack_upper(const DenseMatrix& skew) {
    if (skew.rows != skew.cols) throw ContractViolation("pack_upper: matrix must be square");
    const std::size_t n = skew.rows;
    DenseMatrix packed(1, n == 0 ? 0 : n * (n - 1) / 2);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) packed.data[k++] = skew(i, j);
    return packed;
}

DenseMatrix CayleyOrthogonalBlock::unpack_upper(std::size_t dim, const DenseMatrix& packed) {
    DenseMatrix A(dim, dim);
    std::size_t k = 0;
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            A(i, j) = packed.data[k];
            A(j, i) = -packed.data[k];
            ++k;
        }
    return A;
}

DenseMatrix CayleyOrthogonalBlock::skew() const { return unpack_upper(dim_, packed_); }

const DenseMatrix& CayleyOrthogonalBlock::forward() {
    if (dim_ == 0) {
        w_ = DenseMatrix(0, 0);
        fresh_ = true;
        return w_;
    }
    const DenseMatrix A = skew();
    DenseMatrix I_plus = DenseMatrix::identity(dim_);
    add_inplace(I_plus, A);
    DenseMatrix I_minus = DenseMatrix::identity(dim_);
    add_inplace(I_minus, A, -1.0);
    DenseMatrix X = solve(I_plus, I_minus);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) X(i, j) *= d_[j];
    w_ = std::move(X);
    fresh_ = true;
    return w_;
}

DenseMatrix CayleyOrthogonalBlock::gradient(const DenseMatrix& dL_dW) const {
    if (!fresh_) throw ContractViolation("cayley gradient: stale W cache");
    if (dim_ == 0) return DenseMatrix(0, 0);
    if (dL_dW.rows != dim_ || dL_dW.cols != dim_)
        throw ContractViolation("cayley gradient: shape mismatch");
    const DenseMatrix A = skew();
    DenseMatrix I_plus_T = DenseMatrix::identity(dim_);  // (I + A)^T = I - A
    add_inplace(I_plus_T, A, -1.0);
    const DenseMatrix Y = solve(I_plus_T, dL_dW);  // (I+A)^{-T} dL/dW
    DenseMatrix WD = w_;
    for (std::size_t i = 0; i < dim_; ++i) WD(i, i) += d_[i];
    DenseMatrix M = matmul_transB(Y, WD);
    scale_inplace(M, -1.0);
    // skew projection
    DenseMatrix G(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) G(i, j) = 0.5 * (M(i, j) - M(j, i));
    return G;
}

}  // namespace enrnn
