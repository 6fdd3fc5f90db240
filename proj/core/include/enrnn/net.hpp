#pragma once
#include <cstddef>
#include <vector>

#include "enrnn/blocks.hpp"
#include "enrnn/matrix.hpp"
#include "enrnn/tensor.hpp"

namespace enrnn {

enum class Activation { ModReLU, ReLU, Linear };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation a);

// sign(z) * max(|z| + b, 0); output 0 at z = 0.
DenseMatrix modrelu(const DenseMatrix& z, const DenseMatrix& b);

struct EnrnnDims {
    std::size_t input = 0;       // m
    std::size_t output = 0;      // p
    std::size_t long_size = 0;   // q
    std::size_t short_size = 0;  // n - q
    bool coupled = false;

    std::size_t hidden() const { return long_size + short_size; }
};

// All trainable tensors of the two-block recurrent cell. The long-term
// block is an orthogonal Cayley parameterization, the short-term block is
// spectral-radius normalized, and an optional upper-right coupling feeds
// the short state into the long update (never the reverse: the recurrent
// matrix stays block upper triangular).
//
// With ModReLU the bias vectors live inside the nonlinearity; with ReLU or
// Linear they are added to the pre-activation.
struct EnrnnParams {
    EnrnnDims dims;
    Activation activation = Activation::ModReLU;
    DenseMatrix U_L;  // q x m
    DenseMatrix U_S;  // s x m
    CayleyOrthogonalBlock W_L;  // q
    EigenNormBlock W_S;         // s
    DenseMatrix W_C;  // q x s when coupled, else 0 x 0
    DenseMatrix b_L;  // q x 1
    DenseMatrix b_S;  // s x 1
    DenseMatrix V_L;  // p x q
    DenseMatrix V_S;  // p x s
    DenseMatrix c;    // p x 1

    static EnrnnParams init(const EnrnnDims& dims, Activation act, double epsilon,
                            std::size_t n_negative, Rng& rng);
    void validate() const;
    // Recompute the effective recurrent matrices from their parameters.
    void refresh_recurrent();
};

struct CellOutput {
    DenseMatrix h_L, h_S, y;
    DenseMatrix z_L, z_S;  // pre-activations
};

// One step of the recurrence; inputs and states are (dim x batch).
CellOutput cell_forward(const EnrnnParams& p, const DenseMatrix& x,
                        const DenseMatrix& h_prev_L, const DenseMatrix& h_prev_S);

// Every intermediate needed for exact backpropagation through time.
// h*[0] are the zero (non-trainable) initial states; h*[t+1] pairs with
// x[t], z*[t], y[t].
struct ForwardTape {
    std::size_t tau = 0;
    std::size_t batch = 0;
    std::vector<DenseMatrix> x;
    std::vector<DenseMatrix> z_L, z_S;
    std::vector<DenseMatrix> h_L, h_S;
    std::vector<DenseMatrix> y;
};

ForwardTape sequence_forward(const EnrnnParams& p, const Tensor3& inputs);

// Gradients mirror EnrnnParams; W_L and W_S are w.r.t. the effective
// recurrent matrices and get routed through the block parameterizations.
struct GradientSet {
    DenseMatrix U_L, U_S, W_L, W_S, W_C, b_L, b_S, V_L, V_S, c;
    static GradientSet zeros_like(const EnrnnParams& p);
};

GradientSet sequence_backward(const EnrnnParams& p, const ForwardTape& tape,
                              const std::vector<DenseMatrix>& dL_dy);

// Batch-mean squared error, summed over output dimensions.
std::pair<double, DenseMatrix> loss_mse_terminal(const DenseMatrix& y_final,
                                                 const DenseMatrix& target);

// Softmax cross-entropy averaged over batch and unmasked steps. logits[t]
// is p x batch; targets are class indices in [0, p), batch-major
// (index b*tau + t). An empty mask means all positions count.
struct XentResult {
    double loss;
    std::vector<DenseMatrix> dy;
};
XentResult loss_xent_sequence(const std::vector<DenseMatrix>& logits,
                              const std::vector<int>& targets,
                              const std::vector<std::uint8_t>& mask = {});

}  // namespace enrnn
