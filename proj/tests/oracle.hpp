#pragma once

// Independent reference implementations the tests compare the library
// against: definition-style transforms (full basis contractions, no
// separability tricks) and random-search checks for the allocator.

#include <cmath>
#include <random>
#include <vector>

#include "nlcast/chunks.hpp"
#include "nlcast/tensor.hpp"

namespace oracle {

inline double rel_err(double got, double want) {
    const double denom = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / denom;
}

// --- transforms --------------------------------------------------------

// Type-II orthonormal DCT basis straight from the definition.
inline std::vector<double> dct_matrix(int n) {
    std::vector<double> c(static_cast<std::size_t>(n) * n);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < n; ++k) {
        const double s = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
        for (int j = 0; j < n; ++j)
            c[static_cast<std::size_t>(k) * n + j] = s * std::cos((2 * j + 1) * k * pi / (2.0 * n));
    }
    return c;
}

// Full triple contraction against the product basis; O(N^2), fine for
// the small shapes it is used on.
inline nlcast::Tensor3 dct3_reference(const nlcast::Tensor3& x) {
    const auto ct = dct_matrix(x.nt), ch = dct_matrix(x.nh), cw = dct_matrix(x.nw);
    nlcast::Tensor3 out(x.nt, x.nh, x.nw);
    for (int kt = 0; kt < x.nt; ++kt)
        for (int kh = 0; kh < x.nh; ++kh)
            for (int kw = 0; kw < x.nw; ++kw) {
                double acc = 0.0;
                for (int t = 0; t < x.nt; ++t)
                    for (int h = 0; h < x.nh; ++h)
                        for (int w = 0; w < x.nw; ++w)
                            acc += x.at(t, h, w) * ct[static_cast<std::size_t>(kt) * x.nt + t] *
                                   ch[static_cast<std::size_t>(kh) * x.nh + h] *
                                   cw[static_cast<std::size_t>(kw) * x.nw + w];
                out.at(kt, kh, kw) = acc;
            }
    return out;
}

// Sylvester-ordered orthonormal Hadamard matrix by recursive doubling.
inline std::vector<double> hadamard_matrix(std::size_t n) {
    std::vector<double> h{1.0};
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t m = 1; m < n; m *= 2) {
        std::vector<double> next(4 * m * m);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t c = 0; c < m; ++c) {
                const double v = h[r * m + c] * inv_sqrt2;
                next[r * 2 * m + c] = v;
                next[r * 2 * m + c + m] = v;
                next[(r + m) * 2 * m + c] = v;
                next[(r + m) * 2 * m + c + m] = -v;
            }
        h = std::move(next);
    }
    return h;
}

inline std::vector<double> wht_reference(const std::vector<double>& x) {
    const std::size_t n = x.size();
    const auto h = hadamard_matrix(n);
    std::vector<double> out(n, 0.0);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) out[r] += h[r * n + c] * x[c];
    return out;
}

// --- allocation --------------------------------------------------------

// High-SNR distortion proxy with unit noise variance.
inline double alloc_objective(const std::vector<nlcast::ChunkStats>& stats,
                              const std::vector<double>& b, double a) {
    double j = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) j += a * a * stats[i].var2 / (b[i] * b[i]);
    return j;
}

inline double alloc_power(const std::vector<nlcast::ChunkStats>& stats,
                          const std::vector<double>& b) {
    double p = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) p += b[i] * b[i] * stats[i].var1;
    return p;
}

// A random allocation meeting the power constraint exactly: draw
// positive weights and scale them onto the constraint surface.
inline std::vector<double> random_feasible(const std::vector<nlcast::ChunkStats>& stats, double p,
                                           std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> t(stats.size());
    double denom = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        t[i] = u(g);
        denom += t[i] * stats[i].var1;
    }
    std::vector<double> b(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) b[i] = std::sqrt(t[i] * p / denom);
    return b;
}

// --- random inputs ------------------------------------------------------

inline nlcast::Tensor3 random_tensor(int nt, int nh, int nw, std::mt19937_64& g,
                                     double sigma = 1.0, double mean = 0.0) {
    std::normal_distribution<double> n(mean, sigma);
    nlcast::Tensor3 x(nt, nh, nw);
    for (double& v : x.v) v = n(g);
    return x;
}

inline nlcast::Frame random_frame(int w, int h, std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.0, 255.0);
    nlcast::Frame f(w, h);
    for (double& v : f.samples) v = u(g);
    return f;
}

inline nlcast::Frame random_frame(int w, int h, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    return random_frame(w, h, g);
}

} // namespace oracle
