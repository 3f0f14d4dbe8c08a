// Minimal library walkthrough: send a synthetic slide sequence through
// the simulated channel with the linear baseline and with the power
// transform, and compare reconstruction quality.

#include <cstdio>

#include "nlcast/pipeline.hpp"
#include "nlcast/synthetic.hpp"

int main() {
    const nlcast::FrameSequence seq = nlcast::make_slides(64, 64, 8, 7);

    nlcast::PipelineParams params;
    params.grid = {1, 8, 8};      // chunks of 1x8x8 coefficients
    params.keep_fraction = 0.5;   // transmit only the strongest half
    params.seed = 1;

    std::printf("%10s  %6s  %9s  %7s\n", "codec", "snr_db", "psnr_db", "mssim");
    for (double snr : {5.0, 15.0}) {
        params.snr_db = snr;
        for (double a : {1.0, 1.2}) {
            params.codec = a == 1.0 ? nlcast::Codec::softcast : nlcast::Codec::nonlinear;
            params.a = a;
            const nlcast::RunResult res = nlcast::run_sequence(seq, 8, params);
            std::printf("%10s  %6g  %9.3f  %7.4f\n",
                        params.codec == nlcast::Codec::softcast ? "softcast" : "nonlinear", snr,
                        res.report.psnr_avg, res.report.mssim_avg);
        }
    }
    return 0;
}
