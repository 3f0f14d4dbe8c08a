#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "nlcast/allocate.hpp"
#include "nlcast/chunks.hpp"
#include "nlcast/errors.hpp"
#include "nlcast/transform.hpp"

namespace nlcast {

/// Per-chunk linear least-squares shrinkage factors.
struct LlseFactors {
    std::vector<double> omega; // kept chunks only, aligned with side-info records
    double noise_var = 0.0;
    double a = 1.0;
};

/// omega_i = var0_i / (b_i^a (var0_i + a^2 var2_i noise_var / b_i^2)).
/// Chunks carrying no symbols (b_i == 0) decode from their mean alone
/// and get omega 0; a noiseless channel gives exactly b_i^-a.
inline LlseFactors llse_factors(std::span<const ChunkStats> stats, const AllocationPlan& plan,
                                double noise_var) {
    if (stats.size() != plan.scale.size())
        throw integrity_error("llse_factors: stats/plan size mismatch");
    if (!(noise_var >= 0.0)) throw contract_error("llse_factors: noise variance must be >= 0");

    LlseFactors f;
    f.noise_var = noise_var;
    f.a = plan.a;
    f.omega.resize(stats.size());
    const double a = plan.a;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        const double b = plan.scale[i];
        if (b == 0.0 || stats[i].var0 == 0.0) {
            f.omega[i] = 0.0;
            continue;
        }
        const double ba = (a == 1.0) ? b : std::pow(b, a);
        if (noise_var == 0.0) {
            f.omega[i] = 1.0 / ba;
            continue;
        }
        f.omega[i] =
            stats[i].var0 / (ba * (stats[i].var0 + a * a * stats[i].var2 * noise_var / (b * b)));
    }
    return f;
}

/// Reconstruct the coefficient tensor from per-kept-chunk received
/// symbols: each value y becomes omega_i * signed_power(y, a) + mean_i.
/// Chunks that carried no symbols decode to their mean; dropped chunks
/// are zero-filled by reassembly.
inline Tensor3 decode_chunks(const std::vector<std::vector<double>>& received,
                             const LlseFactors& factors, const SideInfo& side) {
    if (received.size() != side.records.size())
        throw integrity_error("decode_chunks: received chunk count does not match side info");
    if (factors.omega.size() != side.records.size())
        throw integrity_error("decode_chunks: factor count does not match side info");

    const double a = factors.a;
    const std::size_t cell = side.cell_size();
    std::vector<std::vector<double>> decoded(side.records.size());
    for (std::size_t r = 0; r < side.records.size(); ++r) {
        const double mu = side.records[r].mean;
        if (received[r].empty()) {
            decoded[r].assign(cell, mu);
            continue;
        }
        if (received[r].size() != cell)
            throw integrity_error("decode_chunks: chunk " +
                                  std::to_string(side.records[r].index) +
                                  " has wrong symbol count");
        const double w = factors.omega[r];
        decoded[r].reserve(cell);
        if (a == 1.0) {
            for (double y : received[r]) decoded[r].push_back(w * y + mu);
        } else {
            for (double y : received[r]) decoded[r].push_back(w * signed_power(y, a) + mu);
        }
    }
    return reassemble(decoded, side);
}

} // namespace nlcast
