#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "nlcast/allocate.hpp"
#include "nlcast/channel.hpp"
#include "nlcast/chunks.hpp"
#include "nlcast/errors.hpp"
#include "nlcast/frame_io.hpp"
#include "nlcast/llse.hpp"
#include "nlcast/metrics.hpp"
#include "nlcast/transform.hpp"

namespace nlcast {

enum class Codec { softcast, nonlinear };

/// Knobs of one end-to-end run.
struct PipelineParams {
    Codec codec = Codec::nonlinear;
    double a = 1.0;               // power-function exponent (ignored by softcast)
    ChunkGrid grid{1, 8, 8};
    double keep_fraction = 1.0;
    std::size_t wht_block = 64;
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;
};

/// Outcome of transporting one GoP.
struct GopOutcome {
    Tensor3 recon;                // reconstructed GoP (pixel domain)
    double predicted_sq = 0.0;    // model total squared coefficient error
    double power_ratio = 1.0;     // sum(b^2 var1) / P
    std::size_t kept_chunks = 0;
    std::size_t symbols = 0;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step: decorrelates per-GoP noise streams
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace detail

/// Encode, transmit and decode one GoP. The dedicated SoftCast path is
/// straight-line linear code; the nonlinear path applies the signed
/// power transform around the same transport. `gop_stream` selects the
/// per-GoP noise stream.
inline GopOutcome run_gop(const GopTensor& gop, const PipelineParams& params,
                          std::uint64_t gop_stream) {
    const bool softcast = params.codec == Codec::softcast;
    const double a = softcast ? 1.0 : params.a;

    const Tensor3 coeffs = dct3_forward(gop.data);
    const ChunkSet cs = partition_chunks(coeffs, params.grid);
    const std::size_t m = cs.total_count();

    std::vector<ChunkStats> stats(m);
    for (std::size_t i = 0; i < m; ++i) stats[i] = compute_stats(cs.chunks[i], a);

    const std::vector<std::uint8_t> bitmap = select_chunks(stats, params.keep_fraction);

    // Kept chunks split into active (carry symbols) and degenerate
    // (constant chunks, decoded from the transmitted mean alone).
    std::vector<std::size_t> kept_idx, active_idx;
    for (std::size_t i = 0; i < m; ++i)
        if (bitmap[i]) {
            kept_idx.push_back(i);
            if (stats[i].var1 > 0.0) active_idx.push_back(i);
        }

    GopOutcome out;
    out.kept_chunks = kept_idx.size();

    // Power budget: one unit per active chunk, so mean transmit symbol
    // power is 1 and snr_db references it directly.
    const double power = static_cast<double>(active_idx.size());

    std::vector<ChunkStats> active_stats;
    active_stats.reserve(active_idx.size());
    for (std::size_t i : active_idx) active_stats.push_back(stats[i]);

    AllocationPlan active_plan;
    if (!active_idx.empty())
        active_plan = softcast ? allocate_softcast(active_stats, power)
                               : allocate_nonlinear(active_stats, power, a);

    const SideInfo side = build_side_info(stats, bitmap, params.grid, coeffs.nt, coeffs.nh,
                                          coeffs.nw, a, power);

    // Encode: center, apply the power function, scale.
    std::vector<std::vector<double>> scaled(active_idx.size());
    for (std::size_t k = 0; k < active_idx.size(); ++k) {
        const std::size_t i = active_idx[k];
        const double b = active_plan.scale[k];
        const auto& vals = cs.chunks[i].values;
        scaled[k].reserve(vals.size());
        if (softcast || a == 1.0) {
            for (double x : vals) scaled[k].push_back(b * (x - stats[i].mean));
        } else {
            for (double x : vals)
                scaled[k].push_back(b * signed_power(x - stats[i].mean, 1.0 / a));
        }
    }

    double power_sum = 0.0;
    for (std::size_t k = 0; k < active_idx.size(); ++k)
        power_sum += active_plan.scale[k] * active_plan.scale[k] * active_stats[k].var1;
    out.power_ratio = active_idx.empty() ? 1.0 : power_sum / power;

    // Transport.
    double noise_var = 0.0;
    std::vector<std::vector<double>> received_active;
    if (!active_idx.empty()) {
        const SymbolStream stream = serialize_symbols(scaled, params.wht_block);
        out.symbols = stream.symbols.size();
        const ChannelModel model = make_channel(params.snr_db, mean_symbol_power(stream),
                                                detail::mix_seed(params.seed, gop_stream));
        noise_var = model.noise_var;
        received_active = deserialize_symbols(transmit(stream, model));
    }

    // Decode: LLSE shrinkage over kept chunks (degenerate ones carry no
    // symbols and fall back to their mean).
    AllocationPlan kept_plan;
    kept_plan.a = a;
    kept_plan.power = power;
    kept_plan.alpha = active_plan.alpha;
    std::vector<ChunkStats> kept_stats;
    kept_stats.reserve(kept_idx.size());
    std::vector<std::vector<double>> received(kept_idx.size());
    {
        std::size_t next_active = 0;
        for (std::size_t k = 0; k < kept_idx.size(); ++k) {
            const std::size_t i = kept_idx[k];
            kept_stats.push_back(stats[i]);
            if (stats[i].var1 > 0.0) {
                kept_plan.scale.push_back(active_plan.scale[next_active]);
                received[k] = std::move(received_active[next_active]);
                ++next_active;
            } else {
                kept_plan.scale.push_back(0.0);
            }
        }
    }

    // decode_chunks branches to plain omega*y + mean when a == 1, which
    // is exactly the linear SoftCast decoder.
    const LlseFactors factors = llse_factors(kept_stats, kept_plan, noise_var);
    out.recon = dct3_inverse(decode_chunks(received, factors, side));

    // Model-side accounting: Eq-style prediction over active chunks,
    // zero-fill distortion var0 * cell for dropped chunks.
    const std::size_t cell = side.cell_size();
    if (!active_idx.empty()) {
        const DistortionEstimate est = predicted_distortion(active_stats, active_plan, noise_var);
        out.predicted_sq = est.total * static_cast<double>(cell);
    }
    for (std::size_t i = 0; i < m; ++i)
        if (!bitmap[i]) out.predicted_sq += stats[i].var0 * static_cast<double>(cell);

    return out;
}

/// Everything a caller may want from one sequence-level run.
struct RunResult {
    QualityReport report;
    FrameSequence recon; // clamped to [0, 255]
};

/// Run the full pipeline over a frame sequence, GoP by GoP, and score
/// the reconstruction.
inline RunResult run_sequence(const FrameSequence& seq, int gop_size,
                              const PipelineParams& params, std::string* warning = nullptr) {
    const std::vector<GopTensor> gops = assemble_gops(seq, gop_size, warning);
    if (gops.empty())
        throw contract_error("run_sequence: fewer frames than one GoP (" +
                             std::to_string(seq.frames.size()) + " < " +
                             std::to_string(gop_size) + ")");

    RunResult res;
    res.recon.width = seq.width;
    res.recon.height = seq.height;
    res.recon.fps_num = seq.fps_num;
    res.recon.fps_den = seq.fps_den;

    double se_sum = 0.0;
    std::size_t samples = 0;
    double predicted_sq = 0.0;
    double worst_power = 1.0;

    for (std::size_t g = 0; g < gops.size(); ++g) {
        const GopOutcome got = run_gop(gops[g], params, g);
        predicted_sq += got.predicted_sq;
        res.report.kept_chunks = got.kept_chunks;
        if (std::abs(got.power_ratio - 1.0) > std::abs(worst_power - 1.0))
            worst_power = got.power_ratio;

        for (int t = 0; t < gop_size; ++t) {
            const Frame& orig = seq.frames[gops[g].origin_index + t];
            Frame rec(seq.width, seq.height);
            for (int y = 0; y < seq.height; ++y)
                for (int x = 0; x < seq.width; ++x) {
                    const double v = got.recon.at(t, y, x);
                    const double d = v - orig.at(y, x);
                    se_sum += d * d;
                    rec.at(y, x) = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
                }
            samples += orig.samples.size();
            res.report.frame_psnr.push_back(psnr(orig, rec));
            res.report.frame_mssim.push_back(mssim(orig, rec));
            res.recon.frames.push_back(std::move(rec));
        }
    }

    res.report.frames_processed = res.report.frame_psnr.size();
    res.report.measured_mse = se_sum / static_cast<double>(samples);
    res.report.predicted_distortion = predicted_sq / static_cast<double>(samples);
    res.report.power_check = worst_power;

    double psum = 0.0, ssum = 0.0;
    for (double p : res.report.frame_psnr) psum += p;
    for (double s : res.report.frame_mssim) ssum += s;
    res.report.psnr_avg = psum / static_cast<double>(res.report.frame_psnr.size());
    res.report.mssim_avg = ssum / static_cast<double>(res.report.frame_mssim.size());
    return res;
}

} // namespace nlcast
