#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "nlcast/errors.hpp"
#include "nlcast/tensor.hpp"

namespace nlcast {

/// Peak signal-to-noise ratio in dB against a 255 peak. Identical
/// frames (zero MSE) report the cap value 99 dB.
inline double psnr(const Frame& reference, const Frame& test) {
    if (reference.width != test.width || reference.height != test.height)
        throw contract_error("psnr: frame dimensions differ");
    double se = 0.0;
    for (std::size_t i = 0; i < reference.samples.size(); ++i) {
        const double d = reference.samples[i] - test.samples[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(reference.samples.size());
    if (mse == 0.0) return 99.0;
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace detail {

inline const std::vector<double>& ssim_window() {
    static const std::vector<double> w = [] {
        std::vector<double> v(11);
        double sum = 0.0;
        for (int i = 0; i < 11; ++i) {
            const double d = i - 5.0;
            v[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            sum += v[i];
        }
        for (double& x : v) x /= sum;
        return v;
    }();
    return w;
}

// Separable 11-tap filter, valid region only: out is (h-10) x (w-10).
inline std::vector<double> filter_valid(const std::vector<double>& img, int w, int h) {
    const auto& win = ssim_window();
    const int ow = w - 10, oh = h - 10;
    std::vector<double> rows(static_cast<std::size_t>(h) * ow);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 11; ++k) acc += win[k] * img[static_cast<std::size_t>(y) * w + x + k];
            rows[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    std::vector<double> out(static_cast<std::size_t>(oh) * ow);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 11; ++k) acc += win[k] * rows[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    return out;
}

} // namespace detail

/// Mean structural similarity with the reference parameters: 11x11
/// Gaussian window (sigma 1.5), C1 = (0.01*255)^2, C2 = (0.03*255)^2,
/// averaged over all valid window positions.
inline double mssim(const Frame& reference, const Frame& test) {
    if (reference.width != test.width || reference.height != test.height)
        throw contract_error("mssim: frame dimensions differ");
    if (reference.width < 11 || reference.height < 11)
        throw contract_error("mssim: frames must be at least 11x11");

    const int w = reference.width, h = reference.height;
    const std::size_t n = reference.samples.size();
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = reference.samples[i] * reference.samples[i];
        yy[i] = test.samples[i] * test.samples[i];
        xy[i] = reference.samples[i] * test.samples[i];
    }
    const auto mx = detail::filter_valid(reference.samples, w, h);
    const auto my = detail::filter_valid(test.samples, w, h);
    const auto mxx = detail::filter_valid(xx, w, h);
    const auto myy = detail::filter_valid(yy, w, h);
    const auto mxy = detail::filter_valid(xy, w, h);

    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < mx.size(); ++i) {
        const double vx = mxx[i] - mx[i] * mx[i];
        const double vy = myy[i] - my[i] * my[i];
        const double cov = mxy[i] - mx[i] * my[i];
        acc += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cov + c2)) /
               ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return acc / static_cast<double>(mx.size());
}

/// Quality scores of one decoded sequence, plus the model-side numbers
/// the experiment harness audits.
struct QualityReport {
    std::vector<double> frame_psnr;
    std::vector<double> frame_mssim;
    double psnr_avg = 0.0;
    double mssim_avg = 0.0;
    double predicted_distortion = 0.0; // model MSE per coefficient
    double measured_mse = 0.0;         // pixel-domain MSE, unclamped reconstruction
    std::size_t kept_chunks = 0;       // per GoP
    double power_check = 1.0;          // worst-case per-GoP sum(b^2 var1)/P
    std::size_t frames_processed = 0;
};

} // namespace nlcast
