#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "enrnn/eig.hpp"
#include "enrnn/matrix.hpp"
#include "enrnn/rng.hpp"

namespace enrnn {

// Entries ~ U[-s, s], s = sqrt(6/(rows+cols)).
DenseMatrix glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng);

// Sampled parameters of the block-diagonal scaled-rotation initializer:
// 2x2 blocks gamma_j * [[cos t, -sin t],[sin t, cos t]] with t ~ U[0, pi/2)
// and gamma ~ U[-1, 1), plus one 1x1 block gamma for odd dimensions. The
// eigenvalue multiset is exactly {gamma_j e^{+-i t_j}}, uniform on the unit
// disc.
struct RotationBlockInit {
    std::vector<double> thetas;  // floor(n/2) angles
    std::vector<double> gammas;  // floor(n/2) radii
    std::optional<double> tail_gamma;  // present iff n is odd

    static RotationBlockInit sample(std::size_t n, Rng& rng);
    std::size_t dim() const { return 2 * thetas.size() + (tail_gamma ? 1 : 0); }
    DenseMatrix materialize() const;
    std::vector<std::complex<double>> expected_eigenvalues() const;
};

DenseMatrix init_rotation_blocks(std::size_t n, Rng& rng);

// Short-term recurrent block: W = T / (rho(T) + epsilon) once normalization
// has been triggered, W = T before that. The trigger (rho(T) > 1 after an
// update) is permanent.
class EigenNormBlock {
public:
    double epsilon = 0.0;

    EigenNormBlock() = default;
    static EigenNormBlock init(std::size_t dim, double epsilon, Rng& rng);
    static EigenNormBlock from_matrix(DenseMatrix T, double epsilon, bool active);

    std::size_t dim() const { return t_.rows; }
    const DenseMatrix& T() const { return t_; }
    // Mutating access invalidates the cached eigen data and W.
    DenseMatrix& mutable_T();
    bool active() const { return active_; }
    void activate();  // one-way switch
    bool cache_fresh() const { return fresh_; }
    const DominantEigenData& eig() const { return eig_; }
    const DenseMatrix& W() const { return w_; }

    // Recomputes the dominant eigen data and the effective W for the current
    // T. Returns W.
    const DenseMatrix& normalize();

    // dL/dT = (1/rt) [ dL/dW - (1/rt) * sum(dL/dW .* W) * C ],  rt = rho+eps.
    // Requires an active block with a fresh cache and a non-defective
    // dominant eigenvalue.
    DenseMatrix gradient(const DenseMatrix& dL_dW) const;

    static constexpr double kDefectThreshold = 1e-8;

private:
    DenseMatrix t_;
    DenseMatrix w_;
    DominantEigenData eig_;
    bool active_ = false;
    bool fresh_ = false;
};

// Gradient of the normalization given externally supplied eigen data; lets
// callers probe conjugate-choice invariance.
DenseMatrix eigennorm_gradient_from_eig(const DenseMatrix& dL_dW, const DenseMatrix& W,
                                        double rho_tilde, const DominantEigenData& eig);

struct UpdateOutcome {
    bool activated = false;          // trigger fired on this step
    bool defective_fallback = false; // unnormalized gradient was applied
};

// One training step on the block: applies the optimizer closure to T with
// the routed gradient, evaluates the activation trigger after the update,
// and refreshes W. A defective dominant eigenvalue falls back to the
// unnormalized gradient for this step only.
using ApplyUpdateFn = std::function<void(DenseMatrix& param, const DenseMatrix& grad)>;
UpdateOutcome update_step(EigenNormBlock& block, const DenseMatrix& dL_dW,
                          const ApplyUpdateFn& apply);

// Long-term recurrent block: W = (I + A)^{-1} (I - A) D with skew-symmetric
// A and a fixed +-1 diagonal D. Storage keeps only the strict upper triangle
// of A; materialization antisymmetrizes, so A = -A^T holds exactly.
class CayleyOrthogonalBlock {
public:
    CayleyOrthogonalBlock() = default;
    static CayleyOrthogonalBlock init(std::size_t dim, std::size_t n_negative, Rng& rng);
    static CayleyOrthogonalBlock from_packed(std::size_t dim, DenseMatrix packed,
                                             std::vector<double> d_signs);

    std::size_t dim() const { return dim_; }
    std::size_t packed_size() const { return dim_ == 0 ? 0 : dim_ * (dim_ - 1) / 2; }
    const DenseMatrix& packed() const { return packed_; }
    DenseMatrix& mutable_packed();
    const std::vector<double>& d_signs() const { return d_; }

    DenseMatrix skew() const;  // materialized A
    bool cache_fresh() const { return fresh_; }
    const DenseMatrix& W() const { return w_; }
    const DenseMatrix& forward();  // refresh W from A, D

    // Skew projection (M - M^T)/2 of M = -(I+A)^{-T} dL/dW (W + D)^T; its
    // strict upper triangle drives the update of the packed parameters.
    DenseMatrix gradient(const DenseMatrix& dL_dW) const;

    static DenseMatrix pack_upper(const DenseMatrix& skew);
    static DenseMatrix unpack_upper(std::size_t dim, const DenseMatrix& packed);

private:
    std::size_t dim_ = 0;
    DenseMatrix packed_;      // 1 x packed_size strict upper triangle, row-major (i<j)
    std::vector<double> d_;   // +-1 diagonal
    DenseMatrix w_;
    bool fresh_ = false;
};

}  // namespace enrnn
