#pragma once
#include <cstddef>
#include <vector>

#include "enrnn/matrix.hpp"

namespace enrnn {

// Batch-major rank-3 tensor [batch, time, feature], row-major storage.
struct Tensor3 {
    std::size_t batch = 0;
    std::size_t steps = 0;
    std::size_t features = 0;
    std::vector<double> data;

    Tensor3() = default;
    Tensor3(std::size_t b, std::size_t t, std::size_t f)
        : batch(b), steps(t), features(f), data(b * t * f, 0.0) {}

    double& at(std::size_t b, std::size_t t, std::size_t f) {
        return data[(b * steps + t) * features + f];
    }
    double at(std::size_t b, std::size_t t, std::size_t f) const {
        return data[(b * steps + t) * features + f];
    }
    std::size_t size() const { return data.size(); }
};

// features x batch slice of one time step (columns are batch examples).
inline DenseMatrix step_matrix(const Tensor3& x, std::size_t t) {
    DenseMatrix M(x.features, x.batch);
    for (std::size_t b = 0; b < x.batch; ++b)
        for (std::size_t f = 0; f < x.features; ++f) M(f, b) = x.at(b, t, f);
    return M;
}

}  // namespace enrnn
