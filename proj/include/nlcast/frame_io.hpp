#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nlcast/errors.hpp"
#include "nlcast/tensor.hpp"

namespace nlcast {

/// Ordered luma frames with shared geometry. Samples are real-valued;
/// they lie in [0, 255] on ingestion, reconstructions may exceed that
/// range and are clamped only when written back out.
struct FrameSequence {
    int width = 0;
    int height = 0;
    int fps_num = 30; // informational
    int fps_den = 1;
    std::vector<Frame> frames;
};

/// A group of pictures as one 3-D tensor (time, height, width).
struct GopTensor {
    Tensor3 data;
    std::size_t origin_index = 0; // index of the first frame in the source
};

namespace detail {

inline bool parse_int_token(const std::string& s, int& out) {
    if (s.empty()) return false;
    int v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
        if (v < 0) return false;
    }
    out = v;
    return true;
}

} // namespace detail

/// Read the luma plane of a YUV4MPEG2 file. Chroma planes (4:2:0) are
/// skipped over; only mono and 4:2:0 layouts are accepted.
inline FrameSequence load_y4m(const std::string& path,
                              std::optional<std::size_t> max_frames = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("load_y4m: cannot open '" + path + "'");

    std::string header;
    if (!std::getline(in, header) || header.rfind("YUV4MPEG2", 0) != 0)
        throw parse_error("load_y4m: missing YUV4MPEG2 signature in '" + path + "'");

    FrameSequence seq;
    bool have_w = false, have_h = false, have_f = false;
    std::string chroma = "420";

    std::istringstream toks(header);
    std::string tok;
    toks >> tok; // signature
    while (toks >> tok) {
        const std::string arg = tok.substr(1);
        switch (tok[0]) {
        case 'W':
            if (!detail::parse_int_token(arg, seq.width) || seq.width <= 0)
                throw parse_error("load_y4m: bad header token '" + tok + "'");
            have_w = true;
            break;
        case 'H':
            if (!detail::parse_int_token(arg, seq.height) || seq.height <= 0)
                throw parse_error("load_y4m: bad header token '" + tok + "'");
            have_h = true;
            break;
        case 'F': {
            const auto colon = arg.find(':');
            if (colon == std::string::npos ||
                !detail::parse_int_token(arg.substr(0, colon), seq.fps_num) ||
                !detail::parse_int_token(arg.substr(colon + 1), seq.fps_den) ||
                seq.fps_num <= 0 || seq.fps_den <= 0)
                throw parse_error("load_y4m: bad header token '" + tok + "'");
            have_f = true;
            break;
        }
        case 'C':
            chroma = arg;
            break;
        case 'I':
        case 'A':
        case 'X':
            break; // interlacing, aspect, comments: ignored
        default:
            throw parse_error("load_y4m: unknown header token '" + tok + "'");
        }
    }
    if (!have_w) throw parse_error("load_y4m: header missing required token 'W'");
    if (!have_h) throw parse_error("load_y4m: header missing required token 'H'");
    if (!have_f) throw parse_error("load_y4m: header missing required token 'F'");

    std::size_t chroma_bytes = 0;
    if (chroma == "mono") {
        chroma_bytes = 0;
    } else if (chroma == "420" || chroma == "420jpeg" || chroma == "420mpeg2" ||
               chroma == "420paldv") {
        if (seq.width % 2 != 0 || seq.height % 2 != 0)
            throw parse_error("load_y4m: bad header token 'C" + chroma +
                              "' (4:2:0 needs even dimensions)");
        chroma_bytes = 2 * static_cast<std::size_t>(seq.width / 2) * (seq.height / 2);
    } else {
        throw parse_error("load_y4m: unsupported header token 'C" + chroma + "'");
    }

    const std::size_t luma_bytes = static_cast<std::size_t>(seq.width) * seq.height;
    std::vector<std::uint8_t> buf(luma_bytes);

    while (!max_frames || seq.frames.size() < *max_frames) {
        std::string marker;
        if (!std::getline(in, marker)) break; // clean end of stream
        if (marker.rfind("FRAME", 0) != 0)
            throw parse_error("load_y4m: expected FRAME marker, got '" + marker + "'");

        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(luma_bytes));
        const std::size_t got = static_cast<std::size_t>(in.gcount());
        if (got != luma_bytes)
            throw io_error("load_y4m: truncated frame payload in '" + path + "': expected " +
                           std::to_string(luma_bytes + chroma_bytes) + " bytes, got " +
                           std::to_string(got));
        if (chroma_bytes > 0) {
            in.ignore(static_cast<std::streamsize>(chroma_bytes));
            const std::size_t skipped = static_cast<std::size_t>(in.gcount());
            if (skipped != chroma_bytes)
                throw io_error("load_y4m: truncated frame payload in '" + path +
                               "': expected " + std::to_string(luma_bytes + chroma_bytes) +
                               " bytes, got " + std::to_string(luma_bytes + skipped));
        }

        Frame f(seq.width, seq.height);
        for (std::size_t i = 0; i < luma_bytes; ++i) f.samples[i] = buf[i];
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

/// Split a sequence into consecutive non-overlapping GoPs of gop_size
/// frames. A trailing partial group is dropped; the warning (if any) is
/// reported through `warning`.
inline std::vector<GopTensor> assemble_gops(const FrameSequence& seq, int gop_size,
                                            std::string* warning = nullptr) {
    if (gop_size < 1) throw contract_error("assemble_gops: gop_size must be >= 1");
    if (warning) warning->clear();

    const std::size_t n = seq.frames.size();
    const std::size_t ngops = n / static_cast<std::size_t>(gop_size);
    const std::size_t dropped = n - ngops * gop_size;
    if (dropped > 0 && warning)
        *warning = "assemble_gops: dropping trailing partial group of " +
                   std::to_string(dropped) + " frame(s)";

    std::vector<GopTensor> gops;
    gops.reserve(ngops);
    for (std::size_t g = 0; g < ngops; ++g) {
        GopTensor gop;
        gop.origin_index = g * gop_size;
        gop.data = Tensor3(gop_size, seq.height, seq.width);
        for (int t = 0; t < gop_size; ++t) {
            const Frame& f = seq.frames[gop.origin_index + t];
            std::copy(f.samples.begin(), f.samples.end(),
                      gop.data.v.begin() + static_cast<std::size_t>(t) * f.samples.size());
        }
        gops.push_back(std::move(gop));
    }
    return gops;
}

/// Write a mono Y4M file. Samples are clamped to [0, 255] and rounded
/// to the nearest integer.
inline void write_y4m(const FrameSequence& seq, const std::string& path) {
    if (seq.frames.empty()) throw contract_error("write_y4m: no frames to write");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("write_y4m: cannot open '" + path + "' for writing");

    out << "YUV4MPEG2 W" << seq.width << " H" << seq.height << " F" << seq.fps_num << ":"
        << seq.fps_den << " Ip A1:1 Cmono\n";

    std::vector<std::uint8_t> buf(static_cast<std::size_t>(seq.width) * seq.height);
    for (const Frame& f : seq.frames) {
        if (f.width != seq.width || f.height != seq.height)
            throw contract_error("write_y4m: frame dimensions differ from sequence");
        out << "FRAME\n";
        for (std::size_t i = 0; i < buf.size(); ++i) {
            const double s = std::round(f.samples[i]);
            buf[i] = static_cast<std::uint8_t>(s < 0.0 ? 0.0 : (s > 255.0 ? 255.0 : s));
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw io_error("write_y4m: write failed for '" + path + "'");
}

} // namespace nlcast
