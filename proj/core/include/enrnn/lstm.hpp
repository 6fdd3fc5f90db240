#pragma once
#include <cstddef>
#include <vector>

#include "enrnn/matrix.hpp"
#include "enrnn/rng.hpp"
#include "enrnn/tensor.hpp"

namespace enrnn {

// Standard single-layer LSTM used as the comparison baseline. Gate order in
// the stacked tensors is [input; forget; candidate; output].
struct LstmParams {
    std::size_t input = 0, hidden = 0, output = 0;
    DenseMatrix Wx;  // 4H x m
    DenseMatrix Wh;  // 4H x H
    DenseMatrix b;   // 4H x 1 (forget rows start at forget_bias)
    DenseMatrix V;   // p x H
    DenseMatrix c;   // p x 1

    static LstmParams init(std::size_t m, std::size_t hidden, std::size_t p,
                           double forget_bias, Rng& rng);
};

struct LstmTape {
    std::size_t tau = 0, batch = 0;
    std::vector<DenseMatrix> x;
    std::vector<DenseMatrix> gi, gf, gg, go;  // post-activation gates
    std::vector<DenseMatrix> cell;            // tau+1, cell[0] = 0
    std::vector<DenseMatrix> tanh_c;
    std::vector<DenseMatrix> h;               // tau+1, h[0] = 0
    std::vector<DenseMatrix> y;
};

LstmTape lstm_forward(const LstmParams& p, const Tensor3& inputs);

struct LstmGrads {
    DenseMatrix Wx, Wh, b, V, c;
    static LstmGrads zeros_like(const LstmParams& p);
};

LstmGrads lstm_backward(const LstmParams& p, const LstmTape& tape,
                        const std::vector<DenseMatrix>& dL_dy);

// Global gradient-norm clipping; rescales in place when the joint norm
// exceeds the threshold and returns the pre-clip norm.
double clip_global_norm(std::vector<DenseMatrix*> grads, double threshold);

}  // namespace enrnn
