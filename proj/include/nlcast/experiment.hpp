#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "nlcast/chunks.hpp"
#include "nlcast/errors.hpp"
#include "nlcast/frame_io.hpp"
#include "nlcast/pipeline.hpp"
#include "nlcast/synthetic.hpp"
#include "nlcast/transform.hpp"

namespace nlcast {

/// Knobs of an experiment: one input, one chunking layout, and the
/// (a, snr, seed) axes to sweep.
struct ExperimentConfig {
    std::string input;             // .y4m path, or synth:{gradient|slides|noise}:WxHxN
    int gop_size = 4;
    ChunkGrid grid{0, 8, 8};       // nt == 0 means "one chunk spans the whole GoP depth"
    double keep_fraction = 1.0;
    std::vector<double> a_values = {1.11, 1.12, 1.20, 1.29, 1.31};
    std::vector<double> snr_db = {5.0, 10.0, 15.0, 20.0};
    std::vector<std::uint64_t> seeds = {1};
    std::size_t wht_block = 64;
    std::size_t max_frames = 0;    // 0 = whole input
    std::string out_dir = ".";
};

namespace detail {

inline std::string fmt_num(double v) {
    // shortest round-trip decimal form
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string q = "\"";
    for (char c : s) {
        q += c;
        if (c == '"') q += '"';
    }
    q += '"';
    return q;
}

[[noreturn]] inline void bad_field(const std::string& field, const std::string& why) {
    throw contract_error("config field '" + field + "': " + why);
}

} // namespace detail

inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.input.empty()) detail::bad_field("input", "no input given");
    if (cfg.gop_size < 1) detail::bad_field("gop", "GoP size must be >= 1");
    if (cfg.grid.nt < 0 || cfg.grid.nh < 1 || cfg.grid.nw < 1)
        detail::bad_field("grid", "chunk grid must be TxHxW with H,W >= 1 (T 0 = GoP size)");
    if (!(cfg.keep_fraction > 0.0) || cfg.keep_fraction > 1.0)
        detail::bad_field("keep", "keep fraction must be in (0, 1]");
    if (cfg.a_values.empty()) detail::bad_field("a", "need at least one exponent");
    for (double a : cfg.a_values)
        if (!(a >= 1.0) || !std::isfinite(a))
            detail::bad_field("a", "exponent " + detail::fmt_num(a) + " out of range [1, inf)");
    if (cfg.snr_db.empty()) detail::bad_field("snr", "need at least one SNR");
    for (double s : cfg.snr_db)
        if (std::isnan(s)) detail::bad_field("snr", "SNR must be a number or inf");
    if (cfg.seeds.empty()) detail::bad_field("seed", "need at least one seed");
    if (cfg.wht_block == 0 || (cfg.wht_block & (cfg.wht_block - 1)) != 0)
        detail::bad_field("wht", "block length must be a power of two");
    if (cfg.out_dir.empty()) detail::bad_field("out", "no output directory given");
}

inline ChunkGrid effective_grid(const ExperimentConfig& cfg) {
    ChunkGrid g = cfg.grid;
    if (g.nt == 0) g.nt = cfg.gop_size;
    return g;
}

/// Resolve the input field: either a synth:kind:WxHxN spec or a Y4M
/// file path. Synthetic content uses fixed internal seeds so a config
/// names its input exactly.
inline FrameSequence load_input(const ExperimentConfig& cfg) {
    const std::string& in = cfg.input;
    if (in.rfind("synth:", 0) == 0) {
        const auto kind_end = in.find(':', 6);
        if (kind_end == std::string::npos)
            throw parse_error("synthetic input '" + in + "': expected synth:kind:WxHxN");
        const std::string kind = in.substr(6, kind_end - 6);
        const std::string dims = in.substr(kind_end + 1);
        int w = 0, h = 0, n = 0;
        const auto x1 = dims.find('x');
        const auto x2 = dims.find('x', x1 == std::string::npos ? x1 : x1 + 1);
        if (x1 == std::string::npos || x2 == std::string::npos)
            throw parse_error("synthetic input '" + in + "': expected dimensions WxHxN");
        auto geti = [&](std::size_t from, std::size_t to, int& out) {
            auto res = std::from_chars(dims.data() + from, dims.data() + to, out);
            if (res.ec != std::errc() || res.ptr != dims.data() + to)
                throw parse_error("synthetic input '" + in + "': bad dimension in '" + dims + "'");
        };
        geti(0, x1, w);
        geti(x1 + 1, x2, h);
        geti(x2 + 1, dims.size(), n);
        if (cfg.max_frames != 0) n = std::min(n, static_cast<int>(cfg.max_frames));
        if (kind == "gradient") return make_gradient(w, h, n);
        if (kind == "slides") return make_slides(w, h, n, 7);
        if (kind == "noise") return make_noise(w, h, n, 11);
        throw parse_error("synthetic input '" + in + "': unknown kind '" + kind +
                          "' (gradient, slides, noise)");
    }
    std::optional<std::size_t> limit;
    if (cfg.max_frames != 0) limit = cfg.max_frames;
    return load_y4m(in, limit);
}

namespace detail {

// Re-throw with a [stage] prefix, preserving the exception type so
// callers can still discriminate.
template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    auto tag = [&](const std::exception& e) {
        return std::string("[") + name + "] " + e.what();
    };
    try {
        return fn();
    } catch (const parse_error& e) {
        throw parse_error(tag(e));
    } catch (const io_error& e) {
        throw io_error(tag(e));
    } catch (const degenerate_chunk_error& e) {
        throw degenerate_chunk_error(tag(e));
    } catch (const contract_error& e) {
        throw contract_error(tag(e));
    } catch (const integrity_error& e) {
        throw integrity_error(tag(e));
    } catch (const error& e) {
        throw error(tag(e));
    }
}

} // namespace detail

/// One full run against an already-loaded sequence.
inline RunResult run_loaded(const FrameSequence& seq, const ExperimentConfig& cfg, Codec codec,
                            double a, double snr_db, std::uint64_t seed,
                            std::string* warning = nullptr) {
    PipelineParams p;
    p.codec = codec;
    p.a = a;
    p.grid = effective_grid(cfg);
    p.keep_fraction = cfg.keep_fraction;
    p.wht_block = cfg.wht_block;
    p.snr_db = snr_db;
    p.seed = seed;
    return detail::stage("pipeline", [&] { return run_sequence(seq, cfg.gop_size, p, warning); });
}

inline RunResult run_full(const ExperimentConfig& cfg, Codec codec, double a, double snr_db,
                          std::uint64_t seed, std::string* warning = nullptr) {
    detail::stage("config", [&] { validate_config(cfg); });
    const FrameSequence seq = detail::stage("input", [&] { return load_input(cfg); });
    return run_loaded(seq, cfg, codec, a, snr_db, seed, warning);
}

/// Single nonlinear run, scored.
inline QualityReport run_pipeline(const ExperimentConfig& cfg, double a, double snr_db,
                                  std::uint64_t seed) {
    return run_full(cfg, Codec::nonlinear, a, snr_db, seed).report;
}

struct SweepRow {
    std::string codec; // "softcast" or "nonlinear"
    double a = 1.0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    QualityReport report;
};

/// Gains over the baseline: delta[i][j] is (nonlinear at a_values[i],
/// snr_db[j]) minus (softcast, snr_db[j]), averaged over seeds.
struct DeltaTable {
    std::vector<double> a_values;
    std::vector<double> snr_db;
    std::vector<std::vector<double>> delta;
};

struct SweepResult {
    std::string sequence;
    std::vector<SweepRow> rows;
    DeltaTable delta_psnr;
    DeltaTable delta_mssim;
    std::filesystem::path results_csv;
    std::filesystem::path delta_psnr_csv;
    std::filesystem::path delta_mssim_csv;
};

namespace detail {

inline std::string results_csv_text(const std::string& sequence,
                                    const std::vector<SweepRow>& rows) {
    std::string out =
        "sequence,codec,a,snr_db,seed,psnr_db,mssim,predicted_D,measured_mse,kept_chunks,"
        "power_check\n";
    for (const SweepRow& r : rows) {
        out += csv_field(sequence);
        out += ',';
        out += r.codec;
        out += ',';
        out += fmt_num(r.a);
        out += ',';
        out += fmt_num(r.snr_db);
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += fmt_num(r.report.psnr_avg);
        out += ',';
        out += fmt_num(r.report.mssim_avg);
        out += ',';
        out += fmt_num(r.report.predicted_distortion);
        out += ',';
        out += fmt_num(r.report.measured_mse);
        out += ',';
        out += std::to_string(r.report.kept_chunks);
        out += ',';
        out += fmt_num(r.report.power_check);
        out += '\n';
    }
    return out;
}

inline std::string delta_csv_text(const std::string& sequence, const DeltaTable& t) {
    std::string out = "sequence,a";
    for (double s : t.snr_db) out += ",snr_" + fmt_num(s);
    out += '\n';
    for (std::size_t i = 0; i < t.a_values.size(); ++i) {
        out += csv_field(sequence);
        out += ',';
        out += fmt_num(t.a_values[i]);
        for (double d : t.delta[i]) {
            out += ',';
            out += fmt_num(d);
        }
        out += '\n';
    }
    return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path.string() + "' for writing");
    f << text;
    if (!f) throw io_error("failed writing '" + path.string() + "'");
}

} // namespace detail

/// Run the whole (baseline + a) x snr x seed grid and write
/// results.csv, delta_psnr.csv and delta_mssim.csv into out_dir.
/// Rows come out in a fixed order: the softcast baseline first, then
/// each exponent, each spanning snr (outer) and seed (inner) in config
/// order -- reruns of the same config are byte-identical.
inline SweepResult sweep(const ExperimentConfig& cfg) {
    detail::stage("config", [&] { validate_config(cfg); });
    const FrameSequence seq = detail::stage("input", [&] { return load_input(cfg); });

    SweepResult res;
    res.sequence = cfg.input;

    const std::size_t ns = cfg.snr_db.size();
    const std::size_t nseed = cfg.seeds.size();

    // baseline PSNR/MSSIM sums per snr, for the delta tables
    std::vector<double> base_psnr(ns, 0.0), base_mssim(ns, 0.0);

    auto run_group = [&](Codec codec, double a, std::vector<double>* psnr_sum,
                         std::vector<double>* mssim_sum) {
        for (std::size_t j = 0; j < ns; ++j)
            for (std::uint64_t seed : cfg.seeds) {
                SweepRow row;
                row.codec = codec == Codec::softcast ? "softcast" : "nonlinear";
                row.a = a;
                row.snr_db = cfg.snr_db[j];
                row.seed = seed;
                row.report = run_loaded(seq, cfg, codec, a, cfg.snr_db[j], seed).report;
                if (psnr_sum) {
                    (*psnr_sum)[j] += row.report.psnr_avg;
                    (*mssim_sum)[j] += row.report.mssim_avg;
                }
                res.rows.push_back(std::move(row));
            }
    };

    run_group(Codec::softcast, 1.0, &base_psnr, &base_mssim);

    res.delta_psnr.a_values = cfg.a_values;
    res.delta_psnr.snr_db = cfg.snr_db;
    res.delta_mssim.a_values = cfg.a_values;
    res.delta_mssim.snr_db = cfg.snr_db;
    for (double a : cfg.a_values) {
        std::vector<double> psnr_sum(ns, 0.0), mssim_sum(ns, 0.0);
        run_group(Codec::nonlinear, a, &psnr_sum, &mssim_sum);
        std::vector<double> dp(ns), dm(ns);
        for (std::size_t j = 0; j < ns; ++j) {
            dp[j] = (psnr_sum[j] - base_psnr[j]) / static_cast<double>(nseed);
            dm[j] = (mssim_sum[j] - base_mssim[j]) / static_cast<double>(nseed);
        }
        res.delta_psnr.delta.push_back(std::move(dp));
        res.delta_mssim.delta.push_back(std::move(dm));
    }

    const std::filesystem::path dir(cfg.out_dir);
    detail::stage("output", [&] {
        std::filesystem::create_directories(dir);
        res.results_csv = dir / "results.csv";
        res.delta_psnr_csv = dir / "delta_psnr.csv";
        res.delta_mssim_csv = dir / "delta_mssim.csv";
        detail::write_text_file(res.results_csv, detail::results_csv_text(res.sequence, res.rows));
        detail::write_text_file(res.delta_psnr_csv,
                                detail::delta_csv_text(res.sequence, res.delta_psnr));
        detail::write_text_file(res.delta_mssim_csv,
                                detail::delta_csv_text(res.sequence, res.delta_mssim));
    });
    return res;
}

/// Histograms of one chunk's centered coefficients, before and after
/// the signed power x^(1/a). 255 bins over each side's own symmetric
/// range [-R, R]; bin b spans [R(2b/255 - 1), R(2(b+1)/255 - 1)).
struct HistogramDump {
    std::size_t chunk_index = 0;
    double a = 1.0;
    double before_range = 0.0;
    double after_range = 0.0;
    std::vector<std::uint64_t> before_count; // 255 bins
    std::vector<std::uint64_t> after_count;  // 255 bins

    double before_center(std::size_t b) const {
        return before_range * (2.0 * (static_cast<double>(b) + 0.5) / 255.0 - 1.0);
    }
    double after_center(std::size_t b) const {
        return after_range * (2.0 * (static_cast<double>(b) + 0.5) / 255.0 - 1.0);
    }
};

namespace detail {

inline void hist_accumulate(std::span<const double> values, double range,
                            std::vector<std::uint64_t>& count) {
    count.assign(255, 0);
    if (range <= 0.0) range = 1.0; // constant chunk: everything lands mid-bin
    for (double v : values) {
        int b = static_cast<int>(std::floor((v + range) / (2.0 * range) * 255.0));
        if (b < 0) b = 0;
        if (b > 254) b = 254;
        ++count[static_cast<std::size_t>(b)];
    }
}

} // namespace detail

/// Build the before/after histogram of one chunk of the input's first
/// GoP under the configured grid.
inline HistogramDump histogram_dump(const ExperimentConfig& cfg, std::size_t chunk_index,
                                    double a) {
    detail::stage("config", [&] {
        validate_config(cfg);
        if (!(a >= 1.0)) detail::bad_field("a", "exponent " + detail::fmt_num(a) + " out of range");
    });
    const FrameSequence seq = detail::stage("input", [&] { return load_input(cfg); });
    return detail::stage("pipeline", [&] {
        const std::vector<GopTensor> gops = assemble_gops(seq, cfg.gop_size);
        if (gops.empty())
            throw contract_error("histogram_dump: fewer frames than one GoP");
        const Tensor3 coeffs = dct3_forward(gops[0].data);
        const ChunkSet cs = partition_chunks(coeffs, effective_grid(cfg));
        if (chunk_index >= cs.total_count())
            throw contract_error("histogram_dump: chunk index " + std::to_string(chunk_index) +
                                 " out of range [0, " + std::to_string(cs.total_count()) + ")");

        const auto& vals = cs.chunks[chunk_index].values;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());

        std::vector<double> centered(vals.size()), powered(vals.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
            centered[i] = vals[i] - mean;
            powered[i] = signed_power(centered[i], 1.0 / a);
        }

        HistogramDump dump;
        dump.chunk_index = chunk_index;
        dump.a = a;
        for (double v : centered) dump.before_range = std::max(dump.before_range, std::abs(v));
        for (double v : powered) dump.after_range = std::max(dump.after_range, std::abs(v));
        detail::hist_accumulate(centered, dump.before_range, dump.before_count);
        detail::hist_accumulate(powered, dump.after_range, dump.after_count);
        return dump;
    });
}

inline std::string histogram_csv(const HistogramDump& d) {
    std::string out = "bin,before_center,before_count,after_center,after_count\n";
    for (std::size_t b = 0; b < 255; ++b) {
        out += std::to_string(b);
        out += ',';
        out += detail::fmt_num(d.before_center(b));
        out += ',';
        out += std::to_string(d.before_count[b]);
        out += ',';
        out += detail::fmt_num(d.after_center(b));
        out += ',';
        out += std::to_string(d.after_count[b]);
        out += '\n';
    }
    return out;
}

/// Render and write a dump as out_dir/histogram.csv; returns the path.
inline std::filesystem::path write_histogram(const ExperimentConfig& cfg,
                                             const HistogramDump& d) {
    const std::filesystem::path dir(cfg.out_dir);
    return detail::stage("output", [&] {
        std::filesystem::create_directories(dir);
        const std::filesystem::path path = dir / "histogram.csv";
        detail::write_text_file(path, histogram_csv(d));
        return path;
    });
}

// ---------------------------------------------------------------------------
// Config files: plain "key value" lines mirroring the CLI flags.
//
//   input  synth:slides:128x128x8     # or a .y4m path
//   gop    8
//   grid   1x8x8
//   keep   0.5
//   a      1.05 1.1 1.15
//   snr    5 10 15 20
//   seed   1 2 3
//   wht    64
//   frames 0
//   out    results/
//
// '#' starts a comment; lists are whitespace- or comma-separated; an
// optional '=' may follow the key.
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string> config_tokens(std::string line) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    for (char& c : line)
        if (c == ',' || c == '=' || c == '\t' || c == '\r') c = ' ';
    std::vector<std::string> toks;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && line[i] == ' ') ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ') ++j;
        if (j > i) toks.push_back(line.substr(i, j - i));
        i = j;
    }
    return toks;
}

inline double parse_config_double(const std::string& tok, int lineno, const std::string& key) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw parse_error("config line " + std::to_string(lineno) + ": key '" + key +
                          "': bad number '" + tok + "'");
    return v;
}

template <class Int>
inline Int parse_config_int(const std::string& tok, int lineno, const std::string& key) {
    Int v = 0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw parse_error("config line " + std::to_string(lineno) + ": key '" + key +
                          "': bad integer '" + tok + "'");
    return v;
}

} // namespace detail

/// Parse a TxHxW grid spec such as "1x8x8". `where` names the source
/// (a flag or config line) in error messages.
inline ChunkGrid parse_grid(const std::string& tok, const std::string& where) {
    const auto x1 = tok.find('x');
    const auto x2 = tok.find('x', x1 == std::string::npos ? x1 : x1 + 1);
    if (x1 == std::string::npos || x2 == std::string::npos)
        throw parse_error(where + ": expected TxHxW, got '" + tok + "'");
    auto part = [&](std::size_t from, std::size_t to) {
        int v = 0;
        auto res = std::from_chars(tok.data() + from, tok.data() + to, v);
        if (res.ec != std::errc() || res.ptr != tok.data() + to)
            throw parse_error(where + ": bad dimension in '" + tok + "'");
        return v;
    };
    return ChunkGrid{part(0, x1), part(x1 + 1, x2), part(x2 + 1, tok.size())};
}

/// Parse an SNR token: a number in dB, or "inf" for a noiseless channel.
inline double parse_snr(const std::string& tok, const std::string& where) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw parse_error(where + ": bad SNR '" + tok + "' (number in dB, or inf)");
    return v;
}

/// Apply one config line (sans newline) on top of cfg. Returns false
/// for blank/comment lines, true when a key was set.
inline bool apply_config_line(ExperimentConfig& cfg, const std::string& line, int lineno) {
    const std::vector<std::string> toks = detail::config_tokens(line);
    if (toks.empty()) return false;
    const std::string& key = toks[0];
    const std::size_t nvals = toks.size() - 1;
    auto need = [&](std::size_t n) {
        if (nvals != n)
            throw parse_error("config line " + std::to_string(lineno) + ": key '" + key +
                              "' takes " + std::to_string(n) + " value(s), got " +
                              std::to_string(nvals));
    };
    auto need_some = [&] {
        if (nvals == 0)
            throw parse_error("config line " + std::to_string(lineno) + ": key '" + key +
                              "' needs at least one value");
    };

    if (key == "input") {
        need(1);
        cfg.input = toks[1];
    } else if (key == "gop") {
        need(1);
        cfg.gop_size = detail::parse_config_int<int>(toks[1], lineno, key);
    } else if (key == "grid") {
        need(1);
        cfg.grid = parse_grid(toks[1], "config line " + std::to_string(lineno) + ": key 'grid'");
    } else if (key == "keep") {
        need(1);
        cfg.keep_fraction = detail::parse_config_double(toks[1], lineno, key);
    } else if (key == "a") {
        need_some();
        cfg.a_values.clear();
        for (std::size_t i = 1; i < toks.size(); ++i)
            cfg.a_values.push_back(detail::parse_config_double(toks[i], lineno, key));
    } else if (key == "snr") {
        need_some();
        cfg.snr_db.clear();
        for (std::size_t i = 1; i < toks.size(); ++i)
            cfg.snr_db.push_back(
                parse_snr(toks[i], "config line " + std::to_string(lineno) + ": key 'snr'"));
    } else if (key == "seed") {
        need_some();
        cfg.seeds.clear();
        for (std::size_t i = 1; i < toks.size(); ++i)
            cfg.seeds.push_back(detail::parse_config_int<std::uint64_t>(toks[i], lineno, key));
    } else if (key == "wht") {
        need(1);
        cfg.wht_block = detail::parse_config_int<std::size_t>(toks[1], lineno, key);
    } else if (key == "frames") {
        need(1);
        cfg.max_frames = detail::parse_config_int<std::size_t>(toks[1], lineno, key);
    } else if (key == "out") {
        need(1);
        cfg.out_dir = toks[1];
    } else {
        throw parse_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return true;
}

/// Read a key-value config file on top of the built-in defaults.
inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open config file '" + path + "'");
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) apply_config_line(cfg, line, ++lineno);
    return cfg;
}

} // namespace nlcast
