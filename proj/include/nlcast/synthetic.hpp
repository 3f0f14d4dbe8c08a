#pragma once

#include <cstdint>
#include <random>

#include "nlcast/channel.hpp"
#include "nlcast/errors.hpp"
#include "nlcast/frame_io.hpp"

namespace nlcast {

namespace detail {

inline void check_synth_dims(int width, int height, int frames) {
    if (width < 16 || height < 16)
        throw contract_error("synthetic: frame size must be at least 16x16");
    if (frames < 1) throw contract_error("synthetic: need at least one frame");
}

// Bounded draw for texture layout; modulo bias is irrelevant here and
// the generator output itself is portable.
inline int draw_below(std::mt19937_64& g, int n) {
    return static_cast<int>(g() % static_cast<std::uint64_t>(n));
}

} // namespace detail

/// Smooth moving diagonal gradient: the easy case for transform coding
/// (energy concentrated in a handful of low-frequency chunks).
inline FrameSequence make_gradient(int width, int height, int frames) {
    detail::check_synth_dims(width, height, frames);
    FrameSequence seq;
    seq.width = width;
    seq.height = height;
    const double span = static_cast<double>(width + height + 2 * frames);
    for (int t = 0; t < frames; ++t) {
        Frame f(width, height);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                f.at(y, x) = 16.0 + 219.0 * (x + y + 2 * t) / span;
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

/// Independent Gaussian noise around mid-gray, clipped to [0, 255]:
/// near-incompressible content where every chunk looks alike. Useful
/// for auditing the distortion model, since chunk statistics are
/// close to the Gaussian the model assumes.
inline FrameSequence make_noise(int width, int height, int frames, std::uint64_t seed) {
    detail::check_synth_dims(width, height, frames);
    FrameSequence seq;
    seq.width = width;
    seq.height = height;
    NoiseSource gauss(seed);
    for (int t = 0; t < frames; ++t) {
        Frame f(width, height);
        for (double& s : f.samples) {
            const double v = 128.0 + 25.0 * gauss.next();
            s = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
        }
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

/// Slide-show-like content: a bright static page with a title bar,
/// rows of dark text-like runs, and a small cursor that moves a few
/// pixels per frame. High-contrast edges on a flat background give
/// heavy-tailed coefficient chunks -- the regime where the power
/// transform has something to gain.
inline FrameSequence make_slides(int width, int height, int frames, std::uint64_t seed) {
    detail::check_synth_dims(width, height, frames);
    std::mt19937_64 g(seed);

    Frame page(width, height, 235.0);

    // Title bar.
    for (int y = 8; y < 20 && y < height; ++y)
        for (int x = 10; x < width - 10; ++x) page.at(y, x) = 40.0;

    // Text lines: runs of dark glyph blocks separated by short gaps.
    for (int y0 = 32; y0 + 6 < height - 28; y0 += 11) {
        int x = 12;
        while (x < width - 12) {
            if (detail::draw_below(g, 4) < 3) { // run with probability 3/4
                const int run = 4 + detail::draw_below(g, 11);    // width 4..14
                const double ink = 20.0 + detail::draw_below(g, 71); // value 20..90
                for (int y = y0; y < y0 + 6; ++y)
                    for (int dx = 0; dx < run && x + dx < width - 12; ++dx)
                        page.at(y, x + dx) = ink;
                x += run;
            }
            x += 2 + detail::draw_below(g, 5); // gap 2..6
        }
    }

    FrameSequence seq;
    seq.width = width;
    seq.height = height;
    for (int t = 0; t < frames; ++t) {
        Frame f = page;
        const int cx = 16 + (3 * t) % (width - 32);
        for (int y = height - 24; y < height - 16; ++y)
            for (int x = cx; x < cx + 8 && x < width; ++x) f.at(y, x) = 10.0;
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

} // namespace nlcast
