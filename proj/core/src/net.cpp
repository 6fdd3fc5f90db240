#include "enrnn/net.hpp"

#include <cmath>

namespace enrnn {

namespace {

// h and the (dz, db) backward rule per activation. For ModReLU the bias is
// part of the nonlinearity: h = z + b*sign(z) on the active set, so
// dh/dz = 1 and dh/db = sign(z) there. Subgradient 0 at kinks and at z = 0.
DenseMatrix activation_apply(Activation act, const DenseMatrix& z, const DenseMatrix& b) {
    DenseMatrix h(z.rows, z.cols);
    switch (act) {
        case Activation::ModReLU:
            for (std::size_t i = 0; i < z.rows; ++i) {
                const double bi = b(i, 0);
                for (std::size_t j = 0; j < z.cols; ++j) {
                    const double zv = z(i, j);
                    if (zv == 0.0) {
                        h(i, j) = 0.0;
                    } else {
                        const double m = std::abs(zv) + bi;
                        h(i, j) = m > 0.0 ? (zv > 0.0 ? m : -m) : 0.0;
                    }
                }
            }
            break;
        case Activation::ReLU:
            for (std::size_t i = 0; i < z.size(); ++i)
                h.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;
            break;
        case Activation::Linear:
            h = z;
            break;
    }
    return h;
}

void activation_backward(Activation act, const DenseMatrix& dh, const DenseMatrix& z,
                         const DenseMatrix& b, DenseMatrix& dz, DenseMatrix& db) {
    dz = DenseMatrix(z.rows, z.cols);
    switch (act) {
        case Activation::ModReLU:
            for (std::size_t i = 0; i < z.rows; ++i) {
                const double bi = b(i, 0);
                double dbi = 0.0;
                for (std::size_t j = 0; j < z.cols; ++j) {
                    const double zv = z(i, j);
                    if (zv != 0.0 && std::abs(zv) + bi > 0.0) {
                        dz(i, j) = dh(i, j);
                        dbi += dh(i, j) * (zv > 0.0 ? 1.0 : -1.0);
                    }
                }
                db(i, 0) += dbi;
            }
            break;
        case Activation::ReLU:
            for (std::size_t i = 0; i < z.size(); ++i)
                dz.data[i] = z.data[i] > 0.0 ? dh.data[i] : 0.0;
            add_inplace(db, row_sum(dz));
            break;
        case Activation::Linear:
            dz = dh;
            add_inplace(db, row_sum(dz));
            break;
    }
}

}  // namespace

Activation activation_from_string(const std::string& name) {
    if (name == "modrelu") return Activation::ModReLU;
    if (name == "relu") return Activation::ReLU;
    if (name == "linear") return Activation::Linear;
    throw ContractViolation("unknown activation: " + name);
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::ModReLU: return "modrelu";
        case Activation::ReLU: return "relu";
        case Activation::Linear: return "linear";
    }
    return "?";
}

DenseMatrix modrelu(const DenseMatrix& z, const DenseMatrix& b) {
    if (z.rows != b.rows || b.cols != 1) throw ContractViolation("modrelu: bias shape");
    return activation_apply(Activation::ModReLU, z, b);
}

EnrnnParams EnrnnParams::init(const EnrnnDims& dims, Activation act, double epsilon,
                              std::size_t n_negative, Rng& rng) {
    EnrnnParams p;
    p.dims = dims;
    p.activation = act;
    const std::size_t q = dims.long_size, s = dims.short_size;
    p.U_L = glorot_uniform(q, dims.input, rng);
    p.U_S = glorot_uniform(s, dims.input, rng);
    p.W_L = CayleyOrthogonalBlock::init(q, n_negative, rng);
    p.W_S = EigenNormBlock::init(s, epsilon, rng);
    p.W_C = dims.coupled ? glorot_uniform(q, s, rng) : DenseMatrix(0, 0);
    p.b_L = DenseMatrix(q, 1);
    p.b_S = DenseMatrix(s, 1);
    p.V_L = glorot_uniform(dims.output, q, rng);
    p.V_S = glorot_uniform(dims.output, s, rng);
    p.c = DenseMatrix(dims.output, 1);
    return p;
}

void EnrnnParams::validate() const {
    const std::size_t q = dims.long_size, s = dims.short_size;
    const std::size_t m = dims.input, p_ = dims.output;
    auto expect = [](const DenseMatrix& M, std::size_t r, std::size_t c, const char* name) {
        if (M.rows != r || M.cols != c)
            throw ContractViolation(std::string("EnrnnParams: bad shape for ") + name);
    };
    expect(U_L, q, m, "U_L");
    expect(U_S, s, m, "U_S");
    if (W_L.dim() != q) throw ContractViolation("EnrnnParams: bad W_L size");
    if (W_S.dim() != s) throw ContractViolation("EnrnnParams: bad W_S size");
    if (dims.coupled)
        expect(W_C, q, s, "W_C");
    else if (!W_C.empty())
        throw ContractViolation("EnrnnParams: W_C present but coupling disabled");
    expect(b_L, q, 1, "b_L");
    expect(b_S, s, 1, "b_S");
    expect(V_L, p_, q, "V_L");
    expect(V_S, p_, s, "V_S");
    expect(c, p_, 1, "c");
}

void EnrnnParams::refresh_recurrent() {
    W_L.forward();
    W_S.normalize();
}

CellOutput cell_forward(const EnrnnParams& p, const DenseMatrix& x,
                        const DenseMatrix& h_prev_L, const DenseMatrix& h_prev_S) {
    const std::size_t q = p.dims.long_size, s = p.dims.short_size;
    if (x.rows != p.dims.input) throw ContractViolation("cell_forward: input rows != m");
    if (h_prev_L.rows != q || h_prev_S.rows != s ||
        h_prev_L.cols != x.cols || h_prev_S.cols != x.cols)
        throw ContractViolation("cell_forward: state shape mismatch");
    if (!p.W_L.cache_fresh() || !p.W_S.cache_fresh())
        throw ContractViolation("cell_forward: stale recurrent matrices; call refresh_recurrent");
    const bool bias_in_pre = (p.activation != Activation::ModReLU);

    CellOutput out;
    // short state never reads the long state
    out.z_S = matmul(p.U_S, x);
    add_inplace(out.z_S, matmul(p.W_S.W(), h_prev_S));
    if (bias_in_pre && s > 0) add_col_broadcast(out.z_S, p.b_S);
    out.h_S = activation_apply(p.activation, out.z_S, p.b_S);

    out.z_L = matmul(p.U_L, x);
    add_inplace(out.z_L, matmul(p.W_L.W(), h_prev_L));
    if (p.dims.coupled) add_inplace(out.z_L, matmul(p.W_C, h_prev_S));
    if (bias_in_pre && q > 0) add_col_broadcast(out.z_L, p.b_L);
    out.h_L = activation_apply(p.activation, out.z_L, p.b_L);

    out.y = matmul(p.V_L, out.h_L);
    add_inplace(out.y, matmul(p.V_S, out.h_S));
    add_col_broadcast(out.y, p.c);
    return out;
}

ForwardTape sequence_forward(const EnrnnParams& p, const Tensor3& inputs) {
    if (inputs.steps == 0) throw ContractViolation("sequence_forward: empty sequence");
    if (inputs.features != p.dims.input)
        throw ContractViolation("sequence_forward: feature dim != m");
    ForwardTape tape;
    tape.tau = inputs.steps;
    tape.batch = inputs.batch;
    tape.h_L.push_back(DenseMatrix(p.dims.long_size, inputs.batch));
    tape.h_S.push_back(DenseMatrix(p.dims.short_size, inputs.batch));
    for (std::size_t t = 0; t < inputs.steps; ++t) {
        tape.x.push_back(step_matrix(inputs, t));
        CellOutput o = cell_forward(p, tape.x.back(), tape.h_L.back(), tape.h_S.back());
        tape.z_L.push_back(std::move(o.z_L));
        tape.z_S.push_back(std::move(o.z_S));
        tape.h_L.push_back(std::move(o.h_L));
        tape.h_S.push_back(std::move(o.h_S));
        tape.y.push_back(std::move(o.y));
    }
    return tape;
}

GradientSet GradientSet::zeros_like(const EnrnnParams& p) {
    GradientSet g;
    g.U_L = DenseMatrix(p.U_L.rows, p.U_L.cols);
    g.U_S = DenseMatrix(p.U_S.rows, p.U_S.cols);
    g.W_L = DenseMatrix(p.dims.long_size, p.dims.long_size);
    g.W_S = DenseMatrix(p.dims.short_size, p.dims.short_size);
    g.W_C = DenseMatrix(p.W_C.rows, p.W_C.cols);
    g.b_L = DenseMatrix(p.b_L.rows, 1);
    g.b_S = DenseMatrix(p.b_S.rows, 1);
    g.V_L = DenseMatrix(p.V_L.rows, p.V_L.cols);
    g.V_S = DenseMatrix(p.V_S.rows, p.V_S.cols);
    g.c = DenseMatrix(p.c.rows, 1);
    return g;
}

GradientSet sequence_backward(const EnrnnParams& p, const ForwardTape& tape,
                              const std::vector<DenseMatrix>& dL_dy) {
    if (dL_dy.size() != tape.tau)
        throw ContractViolation("sequence_backward: dL_dy length != tau");
    if (tape.h_L.size() != tape.tau + 1)
        throw ContractViolation("sequence_backward: tape/params mismatch");
    GradientSet g = GradientSet::zeros_like(p);
    DenseMatrix dh_L(p.dims.long_size, tape.batch);
    DenseMatrix dh_S(p.dims.short_size, tape.batch);

    for (std::size_t ti = tape.tau; ti-- > 0;) {
        const DenseMatrix& dy = dL_dy[ti];
        add_inplace(g.V_L, matmul_transB(dy, tape.h_L[ti + 1]));
        add_inplace(g.V_S, matmul_transB(dy, tape.h_S[ti + 1]));
        add_inplace(g.c, row_sum(dy));
        add_inplace(dh_L, matmul_transA(p.V_L, dy));
        add_inplace(dh_S, matmul_transA(p.V_S, dy));

        DenseMatrix dz_L;
        activation_backward(p.activation, dh_L, tape.z_L[ti], p.b_L, dz_L, g.b_L);
        add_inplace(g.U_L, matmul_transB(dz_L, tape.x[ti]));
        add_inplace(g.W_L, matmul_transB(dz_L, tape.h_L[ti]));
        if (p.dims.coupled) add_inplace(g.W_C, matmul_transB(dz_L, tape.h_S[ti]));

        DenseMatrix dz_S;
        activation_backward(p.activation, dh_S, tape.z_S[ti], p.b_S, dz_S, g.b_S);
        add_inplace(g.U_S, matmul_transB(dz_S, tape.x[ti]));
        add_inplace(g.W_S, matmul_transB(dz_S, tape.h_S[ti]));

        dh_L = matmul_transA(p.W_L.W(), dz_L);
        dh_S = matmul_transA(p.W_S.W(), dz_S);
        if (p.dims.coupled) add_inplace(dh_S, matmul_transA(p.W_C, dz_L));
    }
    return g;
}

std::pair<double, DenseMatrix> loss_mse_terminal(const DenseMatrix& y_final,
                                                 const DenseMatrix& target) {
    if (!y_final.same_shape(target)) throw ContractViolation("loss_mse_terminal: shape mismatch");
    const double inv_batch = y_final.cols > 0 ? 1.0 / static_cast<double>(y_final.cols) : 0.0;
    double loss = 0.0;
    DenseMatrix dy(y_final.rows, y_final.cols);
    for (std::size_t i = 0; i < y_final.size(); ++i) {
        const double d = y_final.data[i] - target.data[i];
        loss += d * d;
        dy.data[i] = 2.0 * d * inv_batch;
    }
    return {loss * inv_batch, dy};
}

XentResult loss_xent_sequence(const std::vector<DenseMatrix>& logits,
                              const std::vector<int>& targets,
                              const std::vector<std::uint8_t>& mask) {
    const std::size_t tau = logits.size();
    if (tau == 0) throw ContractViolation("loss_xent_sequence: no steps");
    const std::size_t batch = logits[0].cols;
    const std::size_t p = logits[0].rows;
    if (targets.size() != batch * tau)
        throw ContractViolation("loss_xent_sequence: targets size mismatch");
    if (!mask.empty() && mask.size() != batch * tau)
        throw ContractViolation("loss_xent_sequence: mask size mismatch");

    std::size_t count = 0;
    for (std::size_t i = 0; i < batch * tau; ++i)
        if (mask.empty() || mask[i]) ++count;
    if (count == 0) throw ContractViolation("loss_xent_sequence: all positions masked");
    const double inv = 1.0 / static_cast<double>(count);

    XentResult res;
    res.loss = 0.0;
    res.dy.reserve(tau);
    std::vector<double> prob(p);
    for (std::size_t t = 0; t < tau; ++t) {
        DenseMatrix dy(p, batch);
        for (std::size_t b = 0; b < batch; ++b) {
            const bool live = mask.empty() || mask[b * tau + t];
            if (!live) continue;
            const int cls = targets[b * tau + t];
            if (cls < 0 || static_cast<std::size_t>(cls) >= p)
                throw ContractViolation("loss_xent_sequence: class index out of range");
            double mx = logits[t](0, b);
            for (std::size_t k = 1; k < p; ++k) mx = std::max(mx, logits[t](k, b));
            double z = 0.0;
            for (std::size_t k = 0; k < p; ++k) {
                prob[k] = std::exp(logits[t](k, b) - mx);
                z += prob[k];
            }
            res.loss += (std::log(z) - (logits[t](cls, b) - mx)) * inv;
            for (std::size_t k = 0; k < p; ++k) {
                dy(k, b) = (prob[k] / z - (static_cast<std::size_t>(cls) == k ? 1.0 : 0.0)) * inv;
            }
        }
        res.dy.push_back(std::move(dy));
    }
    return res;
}

}  // namespace enrnn
