#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "nlcast/chunks.hpp"
#include "nlcast/errors.hpp"

namespace nlcast {

/// Per-chunk scale factors minimizing expected distortion under the
/// total power constraint sum_i scale_i^2 * var1_i == power.
struct AllocationPlan {
    double a = 1.0;
    double power = 0.0;
    double alpha = 0.0;                       // Lagrange multiplier, (S/P)^2
    std::vector<double> scale;                // b_i, aligned with the input stats
    std::vector<double> noise_amplification;  // high-SNR chunk distortion per unit
                                              // noise variance: a^2 var2_i / b_i^2
};

/// Closed-form optimal scale factors for the nonlinear encoder:
/// b_i = sigma_{i1}^{-1/2} * sqrt(P sigma_{i2} / sum_j sigma_{j1} sigma_{j2})
/// with sigma the standard deviations of the stored moments.
inline AllocationPlan allocate_nonlinear(std::span<const ChunkStats> stats, double power,
                                         double a) {
    if (!(power > 0.0)) throw contract_error("allocate_nonlinear: power must be > 0");
    if (!(a >= 1.0)) throw contract_error("allocate_nonlinear: exponent a must be >= 1");
    if (stats.empty()) throw contract_error("allocate_nonlinear: no chunks");

    std::vector<double> sd1(stats.size()), sd2(stats.size());
    double cross = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        if (!(stats[i].var1 > 0.0))
            throw degenerate_chunk_error("allocate_nonlinear: chunk " + std::to_string(i) +
                                         " has zero signal variance");
        sd1[i] = std::sqrt(stats[i].var1);
        sd2[i] = std::sqrt(stats[i].var2);
        cross += sd1[i] * sd2[i];
    }

    AllocationPlan plan;
    plan.a = a;
    plan.power = power;
    plan.alpha = (cross / power) * (cross / power);
    plan.scale.resize(stats.size());
    plan.noise_amplification.resize(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double b = (1.0 / std::sqrt(sd1[i])) * std::sqrt(power * sd2[i] / cross);
        plan.scale[i] = b;
        plan.noise_amplification[i] = a * a * stats[i].var2 / (b * b);
    }
    return plan;
}

/// The linear baseline: scale factors g_i = sigma_{i0}^{-1/2} sqrt(P / sum_j sigma_{j0}).
/// Identical to allocate_nonlinear at a == 1 (where var1 == var0 and var2 == 1).
inline AllocationPlan allocate_softcast(std::span<const ChunkStats> stats, double power) {
    if (!(power > 0.0)) throw contract_error("allocate_softcast: power must be > 0");
    if (stats.empty()) throw contract_error("allocate_softcast: no chunks");

    std::vector<double> sd0(stats.size());
    double total = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        if (!(stats[i].var0 > 0.0))
            throw degenerate_chunk_error("allocate_softcast: chunk " + std::to_string(i) +
                                         " has zero signal variance");
        sd0[i] = std::sqrt(stats[i].var0);
        total += sd0[i];
    }

    AllocationPlan plan;
    plan.a = 1.0;
    plan.power = power;
    plan.alpha = (total / power) * (total / power);
    plan.scale.resize(stats.size());
    plan.noise_amplification.resize(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double g = (1.0 / std::sqrt(sd0[i])) * std::sqrt(power / total);
        plan.scale[i] = g;
        plan.noise_amplification[i] = 1.0 / (g * g);
    }
    return plan;
}

/// Model-predicted reconstruction distortion for kept chunks.
struct DistortionEstimate {
    double total = 0.0;              // sum over chunks of per-coefficient distortion
    std::vector<double> per_chunk;   // expected squared error per coefficient
};

/// Expected per-chunk distortion after LLSE decoding:
/// D_i = a^2 var2_i var0_i noise_var / (b_i^2 (var0_i + a^2 var2_i noise_var / b_i^2)).
inline DistortionEstimate predicted_distortion(std::span<const ChunkStats> stats,
                                               const AllocationPlan& plan, double noise_var) {
    if (stats.size() != plan.scale.size())
        throw integrity_error("predicted_distortion: stats/plan size mismatch");
    if (!(noise_var >= 0.0))
        throw contract_error("predicted_distortion: noise variance must be >= 0");

    DistortionEstimate est;
    est.per_chunk.resize(stats.size(), 0.0);
    const double a = plan.a;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double b = plan.scale[i];
        if (noise_var == 0.0 || b == 0.0 || stats[i].var0 == 0.0) {
            // Noiseless, or a chunk decoded from its mean alone: the model
            // predicts zero error for that chunk.
            est.per_chunk[i] = 0.0;
            continue;
        }
        const double k = a * a * stats[i].var2 * noise_var / (b * b);
        est.per_chunk[i] = k * stats[i].var0 / (stats[i].var0 + k);
        est.total += est.per_chunk[i];
    }
    return est;
}

} // namespace nlcast
