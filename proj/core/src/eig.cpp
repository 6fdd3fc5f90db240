#include "enrnn/eig.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace enrnn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Hessenberg reduction by Householder reflectors; H is overwritten, Q
// accumulates the similarity so that input = Q H Q^T.
void hessenberg(DenseMatrix& H, DenseMatrix& Q) {
    const int n = static_cast<int>(H.rows);
    for (int k = 0; k + 2 < n; ++k) {
        const int len = n - k - 1;  // rows k+1..n-1
        double norm2 = 0.0;
        for (int i = 0; i < len; ++i) {
            const double x = H(k + 1 + i, k);
            norm2 += x * x;
        }
        const double norm = std::sqrt(norm2);
        if (norm == 0.0) continue;
        std::vector<double> w(len);
        const double x0 = H(k + 1, k);
        const double alpha = (x0 >= 0.0) ? -norm : norm;
        w[0] = x0 - alpha;
        for (int i = 1; i < len; ++i) w[i] = H(k + 1 + i, k);
        double wnorm2 = 0.0;
        for (double v : w) wnorm2 += v * v;
        if (wnorm2 == 0.0) continue;
        const double wnorm = std::sqrt(wnorm2);
        for (double& v : w) v /= wnorm;

        // left: rows k+1..n-1
        for (int j = k; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < len; ++i) s += w[i] * H(k + 1 + i, j);
            s *= 2.0;
            for (int i = 0; i < len; ++i) H(k + 1 + i, j) -= s * w[i];
        }
        // right: columns k+1..n-1
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < len; ++j) s += w[j] * H(i, k + 1 + j);
            s *= 2.0;
            for (int j = 0; j < len; ++j) H(i, k + 1 + j) -= s * w[j];
        }
        // accumulate into Q
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < len; ++j) s += w[j] * Q(i, k + 1 + j);
            s *= 2.0;
            for (int j = 0; j < len; ++j) Q(i, k + 1 + j) -= s * w[j];
        }
        // entries below the first subdiagonal are zero by construction
        for (int i = k + 2; i < n; ++i) H(i, k) = 0.0;
    }
}

// Rotates a trailing 2x2 diagonal block into upper-triangular form when its
// eigenvalues are real; genuine complex-pair blocks are kept.
void split_or_keep_2x2(DenseMatrix& H, DenseMatrix& Q, int i) {
    const int n = static_cast<int>(H.rows);
    const double a = H(i, i), b = H(i, i + 1), c = H(i + 1, i), d = H(i + 1, i + 1);
    if (c == 0.0) return;
    const double half = 0.5 * (a - d);
    const double disc = half * half + b * c;
    if (disc < 0.0) return;  // complex conjugate pair
    const double sq = std::sqrt(disc);
    const double lam = 0.5 * (a + d) + (half >= 0.0 ? sq : -sq);
    // eigenvector for lam, picking the better-conditioned defining row
    double v0, v1;
    if (std::abs(b) + std::abs(a - lam) >= std::abs(c) + std::abs(d - lam)) {
        v0 = b;
        v1 = lam - a;
    } else {
        v0 = lam - d;
        v1 = c;
    }
    double nv = std::hypot(v0, v1);
    if (nv == 0.0) {
        v0 = 1.0;
        v1 = 0.0;
        nv = 1.0;
    }
    const double cs = v0 / nv, sn = v1 / nv;
    for (int j = 0; j < n; ++j) {  // G^T from the left
        const double r0 = H(i, j), r1 = H(i + 1, j);
        H(i, j) = cs * r0 + sn * r1;
        H(i + 1, j) = -sn * r0 + cs * r1;
    }
    for (int r = 0; r <= i + 1; ++r) {  // G from the right
        const double c0 = H(r, i), c1 = H(r, i + 1);
        H(r, i) = cs * c0 + sn * c1;
        H(r, i + 1) = -sn * c0 + cs * c1;
    }
    for (int r = 0; r < n; ++r) {
        const double c0 = Q(r, i), c1 = Q(r, i + 1);
        Q(r, i) = cs * c0 + sn * c1;
        Q(r, i + 1) = -sn * c0 + cs * c1;
    }
    H(i + 1, i) = 0.0;
}

// Francis double-shift QR with deflation on an upper Hessenberg matrix.
void francis_qr(DenseMatrix& H, DenseMatrix& Q, std::size_t max_sweeps) {
    const int n = static_cast<int>(H.rows);
    const double hnorm = frobenius_norm(H);
    std::size_t sweeps = 0;
    int ihi = n - 1;
    int iter_block = 0;

    while (ihi >= 0) {
        if (ihi == 0) break;  // 1x1 remainder
        // deflation scan: l = start of the active window
        int l = ihi;
        while (l > 0) {
            double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
            if (s == 0.0) s = (hnorm == 0.0) ? 1.0 : hnorm;
            if (std::abs(H(l, l - 1)) <= kEps * s) {
                H(l, l - 1) = 0.0;
                break;
            }
            --l;
        }
        if (l == ihi) {
            ihi -= 1;
            iter_block = 0;
            continue;
        }
        if (l == ihi - 1) {
            split_or_keep_2x2(H, Q, l);
            ihi -= 2;
            iter_block = 0;
            continue;
        }
        if (sweeps >= max_sweeps)
            throw SolverFailure("real_schur: QR sweep budget exhausted",
                                std::abs(H(ihi, ihi - 1)));
        ++sweeps;
        ++iter_block;

        double s_sum, s_prod;
        if (iter_block % 10 == 0) {
            // exceptional shift to break symmetric stalls
            const double ex = std::abs(H(ihi, ihi - 1)) + std::abs(H(ihi - 1, ihi - 2));
            const double sh = H(ihi, ihi) + 0.75 * ex;
            s_sum = 2.0 * sh;
            s_prod = sh * sh;
        } else {
            s_sum = H(ihi - 1, ihi - 1) + H(ihi, ihi);
            s_prod = H(ihi - 1, ihi - 1) * H(ihi, ihi) - H(ihi - 1, ihi) * H(ihi, ihi - 1);
        }

        // first column of (H - s1)(H - s2) at the window start
        double p = H(l, l) * H(l, l) + H(l, l + 1) * H(l + 1, l) - s_sum * H(l, l) + s_prod;
        double q = H(l + 1, l) * (H(l, l) + H(l + 1, l + 1) - s_sum);
        double r = (l + 2 <= ihi) ? H(l + 1, l) * H(l + 2, l + 1) : 0.0;

        for (int k = l; k <= ihi - 1; ++k) {
            if (k > l) {
                p = H(k, k - 1);
                q = H(k + 1, k - 1);
                r = (k + 2 <= ihi) ? H(k + 2, k - 1) : 0.0;
            }
            const bool three = (k + 2 <= ihi);
            if (!three) r = 0.0;
            const double scale = std::abs(p) + std::abs(q) + std::abs(r);
            if (scale == 0.0) continue;
            double ps = p / scale, qs = q / scale, rs = r / scale;
            double norm = std::sqrt(ps * ps + qs * qs + rs * rs);
            if (norm == 0.0) continue;
            const double s = (ps >= 0.0) ? norm : -norm;
            double w0 = ps + s, w1 = qs, w2 = rs;
            const double wnorm = std::sqrt(w0 * w0 + w1 * w1 + w2 * w2);
            if (wnorm == 0.0) continue;
            w0 /= wnorm;
            w1 /= wnorm;
            w2 /= wnorm;
            const int m = three ? 3 : 2;
            const double w[3] = {w0, w1, w2};

            if (k > l) {
                // the reflector annihilates the bulge column analytically
                H(k, k - 1) = -s * scale;
                H(k + 1, k - 1) = 0.0;
                if (three) H(k + 2, k - 1) = 0.0;
            }
            // left: rows k..k+m-1, columns k..n-1
            for (int j = k; j < n; ++j) {
                double acc = 0.0;
                for (int t = 0; t < m; ++t) acc += w[t] * H(k + t, j);
                acc *= 2.0;
                for (int t = 0; t < m; ++t) H(k + t, j) -= acc * w[t];
            }
            // right: columns k..k+m-1, rows 0..min(k+3, n-1)
            const int rmax = std::min(k + 3, n - 1);
            for (int i = 0; i <= rmax; ++i) {
                double acc = 0.0;
                for (int t = 0; t < m; ++t) acc += w[t] * H(i, k + t);
                acc *= 2.0;
                for (int t = 0; t < m; ++t) H(i, k + t) -= acc * w[t];
            }
            for (int i = 0; i < n; ++i) {
                double acc = 0.0;
                for (int t = 0; t < m; ++t) acc += w[t] * Q(i, k + t);
                acc *= 2.0;
                for (int t = 0; t < m; ++t) Q(i, k + t) -= acc * w[t];
            }
        }
    }
}

struct Block {
    int start;
    bool is_pair;  // 2x2 with complex eigenvalues
    std::complex<double> lambda;  // canonical member (beta >= 0)
};

std::vector<Block> diagonal_blocks(const DenseMatrix& R) {
    const int n = static_cast<int>(R.rows);
    std::vector<Block> blocks;
    int i = 0;
    while (i < n) {
        if (i + 1 < n && R(i + 1, i) != 0.0) {
            const double a = R(i, i), b = R(i, i + 1), c = R(i + 1, i), d = R(i + 1, i + 1);
            const double mu = 0.5 * (a + d);
            const double disc = 0.25 * (a - d) * (a - d) + b * c;
            if (disc < 0.0) {
                blocks.push_back({i, true, {mu, std::sqrt(-disc)}});
            } else {
                // not expected after standardization; enumerate as two reals
                const double sq = std::sqrt(disc);
                blocks.push_back({i, false, {mu + sq, 0.0}});
                blocks.push_back({i, false, {mu - sq, 0.0}});
            }
            i += 2;
        } else {
            blocks.push_back({i, false, {R(i, i), 0.0}});
            i += 1;
        }
    }
    return blocks;
}

// Back-substitution on the quasi-triangular factor for the eigenvector of
// the block starting at `k`, then rotation back by Q. Guarded divisions keep
// the solve defined for (near-)multiple eigenvalues; accuracy in that case
// is reflected by the defect score downstream.
ComplexVector schur_right_eigenvector(const SchurResult& s, const Block& blk) {
    const DenseMatrix& R = s.R;
    const int n = static_cast<int>(R.rows);
    const double guard = kEps * std::max(frobenius_norm(R), 1.0);
    std::vector<std::complex<double>> y(n, 0.0);
    const std::complex<double> lambda = blk.lambda;
    const int k = blk.start;

    if (!blk.is_pair) {
        y[k] = 1.0;
    } else {
        const double a = R(k, k), b = R(k, k + 1), c = R(k + 1, k), d = R(k + 1, k + 1);
        std::complex<double> v0a = b, v1a = lambda - a;
        std::complex<double> v0b = lambda - d, v1b = c;
        if (std::norm(v0a) + std::norm(v1a) >= std::norm(v0b) + std::norm(v1b)) {
            y[k] = v0a;
            y[k + 1] = v1a;
        } else {
            y[k] = v0b;
            y[k + 1] = v1b;
        }
    }

    int i = k - 1;
    while (i >= 0) {
        if (i > 0 && R(i, i - 1) != 0.0) {
            std::complex<double> r1 = 0.0, r2 = 0.0;
            for (int j = i + 1; j <= (blk.is_pair ? k + 1 : k); ++j) {
                r1 += R(i - 1, j) * y[j];
                r2 += R(i, j) * y[j];
            }
            const std::complex<double> d11 = R(i - 1, i - 1) - lambda;
            const std::complex<double> d12 = R(i - 1, i);
            const std::complex<double> d21 = R(i, i - 1);
            const std::complex<double> d22 = R(i, i) - lambda;
            std::complex<double> det = d11 * d22 - d12 * d21;
            if (std::abs(det) < guard * guard) det = guard * guard;
            y[i - 1] = (-r1 * d22 + r2 * d12) / det;
            y[i] = (-r2 * d11 + r1 * d21) / det;
            i -= 2;
        } else {
            std::complex<double> rsum = 0.0;
            for (int j = i + 1; j <= (blk.is_pair ? k + 1 : k); ++j) rsum += R(i, j) * y[j];
            std::complex<double> den = R(i, i) - lambda;
            if (std::abs(den) < guard) den = guard;
            y[i] = -rsum / den;
            i -= 1;
        }
    }

    // rotate back: x = Q y, then normalize
    ComplexVector x(n);
    for (int r = 0; r < n; ++r) {
        std::complex<double> acc = 0.0;
        for (int c2 = 0; c2 <= (blk.is_pair ? k + 1 : k); ++c2) acc += s.Q(r, c2) * y[c2];
        x.re[r] = acc.real();
        x.im[r] = acc.imag();
    }
    const double nx = x.norm();
    if (nx > 0.0) {
        for (int r = 0; r < n; ++r) {
            x.re[r] /= nx;
            x.im[r] /= nx;
        }
    }
    return x;
}

// Dominant block under the tie-break: max modulus, then (within relative
// 1e-12) largest real part, then positive imaginary part.
Block select_dominant(const std::vector<Block>& blocks) {
    double rho = 0.0;
    for (const Block& b : blocks) rho = std::max(rho, std::abs(b.lambda));
    const double lo = rho * (1.0 - 1e-12);
    const Block* best = nullptr;
    for (const Block& b : blocks) {
        if (std::abs(b.lambda) < lo) continue;
        if (!best || b.lambda.real() > best->lambda.real() ||
            (b.lambda.real() == best->lambda.real() &&
             b.lambda.imag() > best->lambda.imag()))
            best = &b;
    }
    return *best;
}

}  // namespace

SchurResult real_schur(const DenseMatrix& T, std::size_t max_sweeps) {
    if (T.rows != T.cols) throw ContractViolation("real_schur: matrix must be square");
    if (!T.all_finite()) throw ContractViolation("real_schur: non-finite entry");
    const std::size_t n = T.rows;
    SchurResult s{DenseMatrix::identity(n), T};
    if (n <= 1) return s;
    if (max_sweeps == 0) max_sweeps = 30 * n;
    hessenberg(s.R, s.Q);
    francis_qr(s.R, s.Q, max_sweeps);
    return s;
}

std::vector<std::complex<double>> schur_eigenvalues(const DenseMatrix& R) {
    std::vector<std::complex<double>> out;
    for (const Block& b : diagonal_blocks(R)) {
        out.push_back(b.lambda);
        if (b.is_pair) out.push_back(std::conj(b.lambda));
    }
    return out;
}

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& T) {
    if (T.rows == 0) return {};
    return schur_eigenvalues(real_schur(T).R);
}

double spectral_radius(const DenseMatrix& T) {
    if (T.rows != T.cols) throw ContractViolation("spectral_radius: matrix must be square");
    double rho = 0.0;
    for (const auto& lam : eigenvalues(T)) rho = std::max(rho, std::abs(lam));
    return rho;
}

double spectral_norm(const DenseMatrix& A, double rel_tol, std::size_t max_iters) {
    if (A.rows == 0 || A.cols == 0) return 0.0;
    if (!A.all_finite()) throw ContractViolation("spectral_norm: non-finite entry");
    const DenseMatrix G = matmul_transA(A, A);
    const std::size_t n = G.rows;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 / static_cast<double>(i + 1);
    double nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    for (double& x : v) x /= nv;

    double sigma_prev = -1.0;
    std::size_t restarts = 0;
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* grow = G.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += grow[j] * v[j];
            w[i] = acc;
        }
        double rayleigh = 0.0, nw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rayleigh += v[i] * w[i];
            nw += w[i] * w[i];
        }
        nw = std::sqrt(nw);
        const double sigma = std::sqrt(std::max(rayleigh, 0.0));
        if (nw == 0.0) {
            // start vector fell in the null space; restart on a basis vector
            if (restarts >= n) return 0.0;
            std::fill(v.begin(), v.end(), 0.0);
            v[restarts++] = 1.0;
            sigma_prev = -1.0;
            continue;
        }
        if (sigma_prev >= 0.0 &&
            std::abs(sigma - sigma_prev) <= rel_tol * std::max(sigma, 1e-300))
            return sigma;
        sigma_prev = sigma;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    }
    throw SolverFailure("spectral_norm: power iteration cap exceeded", sigma_prev);
}

DominantEigenData make_eigen_data(double alpha, double beta, const ComplexVector& u,
                                  const ComplexVector& v) {
    const std::size_t n = u.size();
    if (v.size() != n) throw ContractViolation("make_eigen_data: length mismatch");
    DominantEigenData d;
    d.alpha = alpha;
    d.beta = beta;
    d.rho = std::hypot(alpha, beta);
    d.u = u;
    d.v = v;

    // v* u
    double dot_re = 0.0, dot_im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dot_re += v.re[i] * u.re[i] + v.im[i] * u.im[i];
        dot_im += v.re[i] * u.im[i] - v.im[i] * u.re[i];
    }
    const double dot_abs = std::hypot(dot_re, dot_im);
    const double nu = u.norm(), nv2 = v.norm();
    d.defect_score = (nu > 0.0 && nv2 > 0.0) ? dot_abs / (nu * nv2) : 0.0;

    d.S_re = DenseMatrix(n, n);
    d.S_im = DenseMatrix(n, n);
    d.C = DenseMatrix(n, n);
    if (d.defect_score < 1e-14 || dot_abs == 0.0) return d;  // S undefined, left zero

    const std::complex<double> denom(dot_re, dot_im);
    for (std::size_t i = 0; i < n; ++i) {
        const std::complex<double> cv(v.re[i], -v.im[i]);  // conj(v)_i
        for (std::size_t j = 0; j < n; ++j) {
            const std::complex<double> uj(u.re[j], u.im[j]);
            const std::complex<double> sij = cv * uj / denom;
            d.S_re(i, j) = sij.real();
            d.S_im(i, j) = sij.imag();
            d.C(i, j) = alpha * sij.real() + beta * sij.imag();
        }
    }
    return d;
}

DominantEigenData dominant_eigenpair(const DenseMatrix& T) {
    if (T.rows != T.cols) throw ContractViolation("dominant_eigenpair: matrix must be square");
    if (T.rows == 0) throw ContractViolation("dominant_eigenpair: empty matrix");

    const SchurResult s = real_schur(T);
    const Block dom = select_dominant(diagonal_blocks(s.R));
    const ComplexVector u = schur_right_eigenvector(s, dom);

    // left eigenvector: right eigenvector of T^T for the same eigenvalue,
    // conjugated (v* T = lambda v*)
    const SchurResult st = real_schur(transpose(T));
    const auto blocks_t = diagonal_blocks(st.R);
    const Block* match = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const Block& b : blocks_t) {
        const double dist = std::abs(b.lambda - dom.lambda);
        if (dist < best) {
            best = dist;
            match = &b;
        }
    }
    const ComplexVector w = schur_right_eigenvector(st, *match);
    ComplexVector v(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        v.re[i] = w.re[i];
        v.im[i] = -w.im[i];
    }
    return make_eigen_data(dom.lambda.real(), dom.lambda.imag(), u, v);
}

}  // namespace enrnn
