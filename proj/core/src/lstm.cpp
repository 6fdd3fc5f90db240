#include "enrnn/lstm.hpp"

#include <cmath>

#include "enrnn/blocks.hpp"

namespace enrnn {

namespace {
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
}

LstmParams LstmParams::init(std::size_t m, std::size_t hidden, std::size_t p,
                            double forget_bias, Rng& rng) {
    LstmParams lp;
    lp.input = m;
    lp.hidden = hidden;
    lp.output = p;
    lp.Wx = glorot_uniform(4 * hidden, m, rng);
    lp.Wh = glorot_uniform(4 * hidden, hidden, rng);
    lp.b = DenseMatrix(4 * hidden, 1);
    for (std::size_t i = 0; i < hidden; ++i) lp.b(hidden + i, 0) = forget_bias;
    lp.V = glorot_uniform(p, hidden, rng);
    lp.c = DenseMatrix(p, 1);
    return lp;
}

LstmTape lstm_forward(const LstmParams& p, const Tensor3& inputs) {
    if (inputs.features != p.input) throw ContractViolation("lstm_forward: feature dim != m");
    const std::size_t H = p.hidden, B = inputs.batch;
    LstmTape tape;
    tape.tau = inputs.steps;
    tape.batch = B;
    tape.cell.push_back(DenseMatrix(H, B));
    tape.h.push_back(DenseMatrix(H, B));
    for (std::size_t t = 0; t < inputs.steps; ++t) {
        tape.x.push_back(step_matrix(inputs, t));
        DenseMatrix z = matmul(p.Wx, tape.x.back());
        add_inplace(z, matmul(p.Wh, tape.h.back()));
        add_col_broadcast(z, p.b);
        DenseMatrix gi(H, B), gf(H, B), gg(H, B), go(H, B), cnew(H, B), tc(H, B), h(H, B);
        const DenseMatrix& cprev = tape.cell.back();
        for (std::size_t i = 0; i < H; ++i) {
            for (std::size_t j = 0; j < B; ++j) {
                const double zi = z(i, j);
                const double zf = z(H + i, j);
                const double zg = z(2 * H + i, j);
                const double zo = z(3 * H + i, j);
                const double vi = sigmoid(zi), vf = sigmoid(zf);
                const double vg = std::tanh(zg), vo = sigmoid(zo);
                const double cv = vf * cprev(i, j) + vi * vg;
                gi(i, j) = vi;
                gf(i, j) = vf;
                gg(i, j) = vg;
                go(i, j) = vo;
                cnew(i, j) = cv;
                tc(i, j) = std::tanh(cv);
                h(i, j) = vo * tc(i, j);
            }
        }
        DenseMatrix y = matmul(p.V, h);
        add_col_broadcast(y, p.c);
        tape.gi.push_back(std::move(gi));
        tape.gf.push_back(std::move(gf));
        tape.gg.push_back(std::move(gg));
        tape.go.push_back(std::move(go));
        tape.cell.push_back(std::move(cnew));
        tape.tanh_c.push_back(std::move(tc));
        tape.h.push_back(std::move(h));
        tape.y.push_back(std::move(y));
    }
    return tape;
}

LstmGrads LstmGrads::zeros_like(const LstmParams& p) {
    LstmGrads g;
    g.Wx = DenseMatrix(4 * p.hidden, p.input);
    g.Wh = DenseMatrix(4 * p.hidden, p.hidden);
    g.b = DenseMatrix(4 * p.hidden, 1);
    g.V = DenseMatrix(p.output, p.hidden);
    g.c = DenseMatrix(p.output, 1);
    return g;
}

LstmGrads lstm_backward(const LstmParams& p, const LstmTape& tape,
                        const std::vector<DenseMatrix>& dL_dy) {
    if (dL_dy.size() != tape.tau) throw ContractViolation("lstm_backward: dL_dy length != tau");
    const std::size_t H = p.hidden, B = tape.batch;
    LstmGrads g = LstmGrads::zeros_like(p);
    DenseMatrix dh(H, B), dc(H, B);

    for (std::size_t ti = tape.tau; ti-- > 0;) {
        const DenseMatrix& dy = dL_dy[ti];
        add_inplace(g.V, matmul_transB(dy, tape.h[ti + 1]));
        add_inplace(g.c, row_sum(dy));
        add_inplace(dh, matmul_transA(p.V, dy));

        DenseMatrix dz(4 * H, B);
        const DenseMatrix& cprev = tape.cell[ti];
        for (std::size_t i = 0; i < H; ++i) {
            for (std::size_t j = 0; j < B; ++j) {
                const double vi = tape.gi[ti](i, j), vf = tape.gf[ti](i, j);
                const double vg = tape.gg[ti](i, j), vo = tape.go[ti](i, j);
                const double tc = tape.tanh_c[ti](i, j);
                const double dhv = dh(i, j);
                const double dcv = dc(i, j) + dhv * vo * (1.0 - tc * tc);
                dz(i, j) = dcv * vg * vi * (1.0 - vi);
                dz(H + i, j) = dcv * cprev(i, j) * vf * (1.0 - vf);
                dz(2 * H + i, j) = dcv * vi * (1.0 - vg * vg);
                dz(3 * H + i, j) = dhv * tc * vo * (1.0 - vo);
                dc(i, j) = dcv * vf;
            }
        }
        add_inplace(g.Wx, matmul_transB(dz, tape.x[ti]));
        add_inplace(g.Wh, matmul_transB(dz, tape.h[ti]));
        add_inplace(g.b, row_sum(dz));
        dh = matmul_transA(p.Wh, dz);
    }
    return g;
}

double clip_global_norm(std::vector<DenseMatrix*> grads, double threshold) {
    double sq = 0.0;
    for (const DenseMatrix* g : grads)
        for (double x : g->data) sq += x * x;
    const double norm = std::sqrt(sq);
    if (threshold > 0.0 && norm > threshold) {
        const double f = threshold / norm;
        for (DenseMatrix* g : grads) scale_inplace(*g, f);
    }
    return norm;
}

}  // namespace enrnn
