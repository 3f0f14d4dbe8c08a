#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "nlcast/errors.hpp"
#include "nlcast/tensor.hpp"

namespace nlcast {

/// sign(x) * |x|^p for p > 0. Odd, strictly increasing, and
/// signed_power(signed_power(x, 1/a), a) == x up to rounding.
inline double signed_power(double x, double p) {
    if (!(p > 0.0)) throw contract_error("signed_power: exponent must be > 0");
    if (p == 1.0) return x; // keep the identity exponent exact
    return x < 0.0 ? -std::pow(-x, p) : std::pow(x, p);
}

namespace detail {

/// Row-major orthonormal DCT-II matrix: B[k][n] = s(k) cos(pi (2n+1) k / 2N).
inline std::vector<double> dct_basis(int n) {
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    const double s0 = std::sqrt(1.0 / n);
    const double s = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            b[static_cast<std::size_t>(k) * n + j] =
                (k == 0 ? s0 : s) *
                std::cos(std::numbers::pi * (2 * j + 1) * k / (2.0 * n));
    return b;
}

/// out = B * in for an r x c matrix `in`; `bt` selects B transposed.
inline void mat_left(const std::vector<double>& b, bool bt, const double* in,
                     double* out, int r, int c) {
    for (int k = 0; k < r; ++k) {
        double* o = out + static_cast<std::size_t>(k) * c;
        for (int j = 0; j < c; ++j) o[j] = 0.0;
        for (int n = 0; n < r; ++n) {
            const double w = bt ? b[static_cast<std::size_t>(n) * r + k]
                                : b[static_cast<std::size_t>(k) * r + n];
            const double* i = in + static_cast<std::size_t>(n) * c;
            for (int j = 0; j < c; ++j) o[j] += w * i[j];
        }
    }
}

/// out = in * B^T for an r x c matrix `in`; `bt` selects B transposed instead.
inline void mat_right(const std::vector<double>& b, bool bt, const double* in,
                      double* out, int r, int c) {
    for (int y = 0; y < r; ++y) {
        const double* i = in + static_cast<std::size_t>(y) * c;
        double* o = out + static_cast<std::size_t>(y) * c;
        for (int k = 0; k < c; ++k) {
            double acc = 0.0;
            for (int n = 0; n < c; ++n) {
                const double w = bt ? b[static_cast<std::size_t>(n) * c + k]
                                    : b[static_cast<std::size_t>(k) * c + n];
                acc += w * i[n];
            }
            o[k] = acc;
        }
    }
}

/// Separable 3-D transform: time, then height, then width. `inverse`
/// applies the transposed (inverse) basis on every axis.
inline Tensor3 dct3_apply(const Tensor3& x, bool inverse) {
    if (x.nt < 1 || x.nh < 1 || x.nw < 1)
        throw contract_error("dct3: all dimensions must be >= 1");
    const int nt = x.nt, nh = x.nh, nw = x.nw;
    const auto bt = dct_basis(nt), bh = dct_basis(nh), bw = dct_basis(nw);

    Tensor3 a(nt, nh, nw), out(nt, nh, nw);
    // time axis: view as nt x (nh*nw)
    mat_left(bt, inverse, x.v.data(), a.v.data(), nt, nh * nw);
    // height axis: per temporal plane, nh x nw
    for (int t = 0; t < nt; ++t)
        mat_left(bh, inverse, a.v.data() + static_cast<std::size_t>(t) * nh * nw,
                 out.v.data() + static_cast<std::size_t>(t) * nh * nw, nh, nw);
    // width axis
    for (int t = 0; t < nt; ++t)
        mat_right(bw, inverse, out.v.data() + static_cast<std::size_t>(t) * nh * nw,
                  a.v.data() + static_cast<std::size_t>(t) * nh * nw, nh, nw);
    return a;
}

} // namespace detail

/// Orthonormal type-II 3D-DCT, energy preserving.
inline Tensor3 dct3_forward(const Tensor3& gop) { return detail::dct3_apply(gop, false); }

/// Exact inverse of dct3_forward.
inline Tensor3 dct3_inverse(const Tensor3& coeffs) { return detail::dct3_apply(coeffs, true); }

/// In-place orthonormal Walsh-Hadamard transform of a power-of-two block.
/// Self-inverse.
inline void wht_block_inplace(std::span<double> x) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw contract_error("wht_block: length must be a power of two");
    const double inv_sqrt2 = std::sqrt(0.5);
    for (std::size_t h = 1; h < n; h <<= 1) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double u = x[j], w = x[j + h];
                x[j] = (u + w) * inv_sqrt2;
                x[j + h] = (u - w) * inv_sqrt2;
            }
        }
    }
}

inline std::vector<double> wht_block(std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    wht_block_inplace(y);
    return y;
}

} // namespace nlcast
