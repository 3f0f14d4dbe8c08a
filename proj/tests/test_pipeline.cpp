#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <string>

#include "nlcast/errors.hpp"
#include "nlcast/pipeline.hpp"
#include "nlcast/synthetic.hpp"

using nlcast::Codec;
using nlcast::FrameSequence;
using nlcast::PipelineParams;
using nlcast::RunResult;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PipelineParams base_params() {
    PipelineParams p;
    p.codec = Codec::nonlinear;
    p.a = 1.2;
    p.grid = {1, 8, 8};
    return p;
}

FrameSequence flat_sequence(int w, int h, int n, double value) {
    FrameSequence seq;
    seq.width = w;
    seq.height = h;
    for (int t = 0; t < n; ++t) seq.frames.emplace_back(w, h, value);
    return seq;
}

} // namespace

TEST(Pipeline, NoiselessFullBandwidthIsTransparent) {
    const FrameSequence seq = nlcast::make_slides(32, 32, 4, 7);
    for (double a : {1.0, 1.2}) {
        PipelineParams p = base_params();
        p.a = a;
        p.snr_db = kInf;
        const RunResult res = nlcast::run_sequence(seq, 4, p);
        EXPECT_GE(res.report.psnr_avg, 60.0) << "a=" << a;
        EXPECT_NEAR(res.report.measured_mse, 0.0, 1e-12);
        EXPECT_NEAR(res.report.predicted_distortion, 0.0, 1e-12);
    }
}

TEST(Pipeline, SoftcastEqualsUnitExponentBitForBit) {
    // Same seed, same noise stream: the two codec paths must agree on
    // every reconstructed sample, not just on average quality.
    const FrameSequence seq = nlcast::make_slides(32, 32, 4, 7);
    PipelineParams p = base_params();
    p.snr_db = 10.0;
    p.keep_fraction = 0.75;

    p.codec = Codec::softcast;
    const RunResult sc = nlcast::run_sequence(seq, 4, p);
    p.codec = Codec::nonlinear;
    p.a = 1.0;
    const RunResult nl = nlcast::run_sequence(seq, 4, p);

    EXPECT_EQ(sc.report.measured_mse, nl.report.measured_mse);
    EXPECT_EQ(sc.report.psnr_avg, nl.report.psnr_avg);
    EXPECT_EQ(sc.report.power_check, nl.report.power_check);
    ASSERT_EQ(sc.recon.frames.size(), nl.recon.frames.size());
    for (std::size_t t = 0; t < sc.recon.frames.size(); ++t)
        EXPECT_EQ(sc.recon.frames[t].samples, nl.recon.frames[t].samples);
}

TEST(Pipeline, RunsAreDeterministicPerSeed) {
    const FrameSequence seq = nlcast::make_noise(32, 32, 4, 3);
    PipelineParams p = base_params();
    p.snr_db = 8.0;
    const RunResult r1 = nlcast::run_sequence(seq, 4, p);
    const RunResult r2 = nlcast::run_sequence(seq, 4, p);
    EXPECT_EQ(r1.report.measured_mse, r2.report.measured_mse);
    for (std::size_t t = 0; t < r1.recon.frames.size(); ++t)
        EXPECT_EQ(r1.recon.frames[t].samples, r2.recon.frames[t].samples);

    p.seed = 2;
    const RunResult r3 = nlcast::run_sequence(seq, 4, p);
    EXPECT_NE(r1.report.measured_mse, r3.report.measured_mse);
}

TEST(Pipeline, BandwidthCutKeepsTheAnnouncedChunkCount) {
    const FrameSequence seq = nlcast::make_slides(32, 32, 4, 7);
    PipelineParams p = base_params();
    p.snr_db = kInf;
    p.keep_fraction = 0.5; // 64 chunks -> 32 kept
    const RunResult half = nlcast::run_sequence(seq, 4, p);
    EXPECT_EQ(half.report.kept_chunks, 32u);
    EXPECT_GT(half.report.predicted_distortion, 0.0); // dropped energy counted

    p.keep_fraction = 1.0;
    const RunResult full = nlcast::run_sequence(seq, 4, p);
    EXPECT_EQ(full.report.kept_chunks, 64u);
    EXPECT_GT(full.report.psnr_avg, half.report.psnr_avg);
}

TEST(Pipeline, HigherSnrGivesHigherQuality) {
    const FrameSequence seq = nlcast::make_slides(32, 32, 4, 7);
    PipelineParams p = base_params();
    p.keep_fraction = 0.5;
    p.snr_db = 5.0;
    const double low = nlcast::run_sequence(seq, 4, p).report.psnr_avg;
    p.snr_db = 20.0;
    const double high = nlcast::run_sequence(seq, 4, p).report.psnr_avg;
    EXPECT_GT(high, low);
}

TEST(Pipeline, ConstantContentSurvivesDegenerateChunks) {
    // A flat sequence leaves every AC chunk with zero variance; those
    // chunks must bypass allocation instead of blowing it up.
    const FrameSequence seq = flat_sequence(32, 32, 4, 128.0);
    for (double a : {1.0, 1.2}) {
        PipelineParams p = base_params();
        p.a = a;
        p.snr_db = kInf;
        const RunResult res = nlcast::run_sequence(seq, 4, p);
        EXPECT_GE(res.report.psnr_avg, 60.0) << "a=" << a;
        EXPECT_NEAR(res.report.power_check, 1.0, 1e-9);
    }
}

TEST(Pipeline, AllZeroContentTransmitsNothing) {
    const nlcast::GopTensor gop{nlcast::Tensor3(4, 32, 32, 0.0), 0};
    PipelineParams p = base_params();
    p.snr_db = 10.0;
    const nlcast::GopOutcome out = nlcast::run_gop(gop, p, 0);
    EXPECT_EQ(out.symbols, 0u);
    EXPECT_EQ(out.power_ratio, 1.0);
    for (double v : out.recon.v) EXPECT_EQ(v, 0.0);
}

TEST(Pipeline, PartialGopAtTheTailIsDroppedWithAWarning) {
    FrameSequence seq = nlcast::make_gradient(32, 32, 6);
    PipelineParams p = base_params();
    p.snr_db = kInf;
    std::string warning;
    const RunResult res = nlcast::run_sequence(seq, 4, p, &warning);
    EXPECT_EQ(res.report.frames_processed, 4u);
    EXPECT_FALSE(warning.empty());
}

TEST(Pipeline, TooFewFramesForOneGopRejected) {
    const FrameSequence seq = nlcast::make_gradient(32, 32, 3);
    EXPECT_THROW(nlcast::run_sequence(seq, 4, base_params()), nlcast::contract_error);
}

TEST(Pipeline, PowerBudgetHoldsOnRealContent) {
    for (std::uint64_t s : {1u, 2u, 3u}) {
        const FrameSequence seq = nlcast::make_noise(32, 32, 4, s);
        PipelineParams p = base_params();
        p.snr_db = 10.0;
        p.keep_fraction = 0.6;
        p.seed = s;
        const RunResult res = nlcast::run_sequence(seq, 4, p);
        EXPECT_NEAR(res.report.power_check, 1.0, 1e-6);
    }
}
