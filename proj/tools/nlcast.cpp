// Command-line front end: single runs, (a, snr, seed) sweeps with CSV
// reports, and chunk histogram dumps.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "nlcast/experiment.hpp"
#include "nlcast/frame_io.hpp"
#include "nlcast/pipeline.hpp"

namespace {

// One bundle of flag storage shared by all subcommands (only one parses).
struct CommonFlags {
    std::string config_path;
    std::string input;
    int gop = 0;
    std::string grid_text;
    double keep = 0.0;
    std::vector<double> a;
    std::vector<std::string> snr;
    std::vector<std::uint64_t> seeds;
    std::size_t wht = 0;
    std::size_t frames = 0;
    std::string out_dir;

    CLI::Option* o_input = nullptr;
    CLI::Option* o_gop = nullptr;
    CLI::Option* o_grid = nullptr;
    CLI::Option* o_keep = nullptr;
    CLI::Option* o_a = nullptr;
    CLI::Option* o_snr = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_wht = nullptr;
    CLI::Option* o_frames = nullptr;
    CLI::Option* o_out = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "key-value config file; flags override its values");
    f.o_input = cmd->add_option("--input", f.input, "input: a .y4m file or synth:kind:WxHxN "
                                                    "(kinds: gradient, slides, noise)");
    f.o_gop = cmd->add_option("--gop", f.gop, "frames per GoP");
    f.o_grid = cmd->add_option("--grid", f.grid_text, "chunk grid TxHxW; T 0 spans the GoP");
    f.o_keep = cmd->add_option("--keep", f.keep, "fraction of chunks to transmit, (0, 1]");
    f.o_a = cmd->add_option("--a", f.a, "power-function exponent(s), each >= 1");
    f.o_snr = cmd->add_option("--snr", f.snr, "channel SNR(s) in dB, or inf for noiseless");
    f.o_seed = cmd->add_option("--seed", f.seeds, "channel noise seed(s)");
    f.o_wht = cmd->add_option("--wht", f.wht, "Hadamard block length (power of two)");
    f.o_frames = cmd->add_option("--frames", f.frames, "use at most this many input frames");
    f.o_out = cmd->add_option("--out", f.out_dir, "output directory");
}

nlcast::ExperimentConfig build_config(const CommonFlags& f) {
    nlcast::ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = nlcast::load_config_file(f.config_path);
    if (f.o_input->count()) cfg.input = f.input;
    if (f.o_gop->count()) cfg.gop_size = f.gop;
    if (f.o_grid->count()) cfg.grid = nlcast::parse_grid(f.grid_text, "--grid");
    if (f.o_keep->count()) cfg.keep_fraction = f.keep;
    if (f.o_a->count()) cfg.a_values = f.a;
    if (f.o_snr->count()) {
        cfg.snr_db.clear();
        for (const std::string& tok : f.snr) cfg.snr_db.push_back(nlcast::parse_snr(tok, "--snr"));
    }
    if (f.o_seed->count()) cfg.seeds = f.seeds;
    if (f.o_wht->count()) cfg.wht_block = f.wht;
    if (f.o_frames->count()) cfg.max_frames = f.frames;
    if (f.o_out->count()) cfg.out_dir = f.out_dir;
    return cfg;
}

double single(const std::vector<double>& v, const char* flag) {
    if (v.size() != 1)
        throw nlcast::contract_error(std::string("run takes exactly one ") + flag + " value, got " +
                                     std::to_string(v.size()));
    return v[0];
}

int cmd_run(const CommonFlags& flags, bool softcast, const std::string& recon_path) {
    nlcast::ExperimentConfig cfg = build_config(flags);
    // run is a single shot: collapse untouched sweep defaults to one
    // value; an explicitly configured list must have exactly one entry.
    const nlcast::ExperimentConfig defaults;
    if (!flags.o_a->count() && cfg.a_values == defaults.a_values) cfg.a_values = {1.2};
    if (!flags.o_snr->count() && cfg.snr_db == defaults.snr_db) cfg.snr_db = {10.0};
    nlcast::validate_config(cfg);
    const double a = softcast ? 1.0 : single(cfg.a_values, "--a");
    const double snr = single(cfg.snr_db, "--snr");
    if (cfg.seeds.size() != 1)
        throw nlcast::contract_error("run takes exactly one --seed value, got " +
                                     std::to_string(cfg.seeds.size()));

    std::string warning;
    const nlcast::RunResult res =
        nlcast::run_full(cfg, softcast ? nlcast::Codec::softcast : nlcast::Codec::nonlinear, a,
                         snr, cfg.seeds[0], &warning);
    if (!warning.empty()) std::fprintf(stderr, "nlcast: %s\n", warning.c_str());

    std::printf("codec %s   a %g   snr %g dB   seed %llu\n", softcast ? "softcast" : "nonlinear",
                a, snr, static_cast<unsigned long long>(cfg.seeds[0]));
    std::printf("frame   psnr_db    mssim\n");
    for (std::size_t i = 0; i < res.report.frame_psnr.size(); ++i)
        std::printf("%5zu  %8.3f  %7.4f\n", i, res.report.frame_psnr[i],
                    res.report.frame_mssim[i]);
    std::printf("average  psnr %.3f dB   mssim %.4f\n", res.report.psnr_avg,
                res.report.mssim_avg);
    std::printf("model    predicted D %.6g   measured mse %.6g\n",
                res.report.predicted_distortion, res.report.measured_mse);
    std::printf("checks   kept chunks %zu   power ratio %.8f\n", res.report.kept_chunks,
                res.report.power_check);

    if (!recon_path.empty()) {
        nlcast::write_y4m(res.recon, recon_path);
        std::printf("wrote %s\n", recon_path.c_str());
    }
    return 0;
}

void print_delta(const char* title, const nlcast::DeltaTable& t) {
    std::printf("%s\n", title);
    std::printf("%8s", "a \\ snr");
    for (double s : t.snr_db) std::printf("  %8g", s);
    std::printf("\n");
    for (std::size_t i = 0; i < t.a_values.size(); ++i) {
        std::printf("%8g", t.a_values[i]);
        for (double d : t.delta[i]) std::printf("  %+8.4f", d);
        std::printf("\n");
    }
}

int cmd_sweep(const CommonFlags& flags) {
    const nlcast::SweepResult res = nlcast::sweep(build_config(flags));
    std::printf("%zu runs on %s\n\n", res.rows.size(), res.sequence.c_str());
    print_delta("delta psnr vs softcast (dB, mean over seeds)", res.delta_psnr);
    std::printf("\n");
    print_delta("delta mssim vs softcast (mean over seeds)", res.delta_mssim);
    std::printf("\nwrote %s\n", res.results_csv.string().c_str());
    std::printf("wrote %s\n", res.delta_psnr_csv.string().c_str());
    std::printf("wrote %s\n", res.delta_mssim_csv.string().c_str());
    return 0;
}

int cmd_hist(const CommonFlags& flags, std::size_t chunk_index) {
    const nlcast::ExperimentConfig cfg = build_config(flags);
    const double a = cfg.a_values.size() == 1 ? cfg.a_values[0] : 1.2;
    const nlcast::HistogramDump dump = nlcast::histogram_dump(cfg, chunk_index, a);
    const auto path = nlcast::write_histogram(cfg, dump);
    std::printf("chunk %zu, a %g: value range %.6g before, %.6g after the power transform\n",
                dump.chunk_index, dump.a, dump.before_range, dump.after_range);
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-analog video transmission over a simulated AWGN channel"};
    app.require_subcommand(1);

    // Each subcommand needs its own flag storage: option pointers are
    // per-App, and count() checks must hit the subcommand that parsed.
    CommonFlags run_flags, sweep_flags, hist_flags;
    bool softcast = false;
    std::string recon_path;
    std::size_t chunk_index = 0;

    CLI::App* run = app.add_subcommand("run",
                                       "one end-to-end run, scored per frame "
                                       "(a 1.2, snr 10 dB unless configured)");
    add_common_flags(run, run_flags);
    run->add_flag("--softcast", softcast, "use the linear baseline codec");
    run->add_option("--recon", recon_path, "write the reconstruction to this .y4m path");

    CLI::App* sweep = app.add_subcommand("sweep", "run the (a, snr, seed) grid and write CSVs");
    add_common_flags(sweep, sweep_flags);

    CLI::App* hist = app.add_subcommand("hist", "dump one chunk's coefficient histograms");
    add_common_flags(hist, hist_flags);
    hist->add_option("--chunk", chunk_index, "chunk index within the first GoP")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_flags, softcast, recon_path);
        if (sweep->parsed()) return cmd_sweep(sweep_flags);
        return cmd_hist(hist_flags, chunk_index);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "nlcast: %s\n", e.what());
        return 1;
    }
}
