#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "nlcast/errors.hpp"
#include "nlcast/tensor.hpp"
#include "nlcast/transform.hpp"

namespace nlcast {

/// Deterministic standard-normal stream. Box-Muller on top of a
/// mt19937_64 with an explicit uniform mapping, so the sample sequence
/// is identical across platforms for a given seed.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

private:
    double uniform_open() {
        // (0, 1]: keeps log() finite
        return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    }

    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// noise_var = mean_symbol_power * 10^(-snr_db / 10).
/// An infinite snr_db models a noiseless channel.
inline double noise_variance_for_snr(double mean_symbol_power, double snr_db) {
    if (!(mean_symbol_power > 0.0))
        throw contract_error("noise_variance_for_snr: mean symbol power must be > 0");
    if (std::isinf(snr_db) && snr_db > 0.0) return 0.0;
    return mean_symbol_power * std::pow(10.0, -snr_db / 10.0);
}

/// AWGN channel description.
struct ChannelModel {
    double snr_db = std::numeric_limits<double>::infinity();
    double noise_var = 0.0;
    std::uint64_t seed = 0;
};

inline ChannelModel make_channel(double snr_db, double mean_symbol_power, std::uint64_t seed) {
    return {snr_db, noise_variance_for_snr(mean_symbol_power, snr_db), seed};
}

/// How a symbol stream was assembled, enabling exact inversion.
struct StreamLayout {
    std::vector<std::size_t> chunk_sizes; // per chunk, in stream order
    std::size_t wht_block = 64;
    std::size_t pad = 0; // zero symbols appended before the WHT
};

/// Flat sequence of real channel symbols.
struct SymbolStream {
    std::vector<double> symbols;
    StreamLayout layout;
};

/// Concatenate the scaled chunks, zero-pad to a multiple of the WHT
/// block size, whiten each disjoint block.
inline SymbolStream serialize_symbols(const std::vector<std::vector<double>>& scaled_chunks,
                                      std::size_t wht_block_size) {
    if (wht_block_size == 0 || (wht_block_size & (wht_block_size - 1)) != 0)
        throw contract_error("serialize_symbols: WHT block size must be a power of two");

    SymbolStream s;
    s.layout.wht_block = wht_block_size;
    std::size_t total = 0;
    for (const auto& c : scaled_chunks) {
        s.layout.chunk_sizes.push_back(c.size());
        total += c.size();
    }
    s.symbols.reserve((total + wht_block_size - 1) / wht_block_size * wht_block_size);
    for (const auto& c : scaled_chunks) s.symbols.insert(s.symbols.end(), c.begin(), c.end());

    s.layout.pad = (wht_block_size - s.symbols.size() % wht_block_size) % wht_block_size;
    s.symbols.resize(s.symbols.size() + s.layout.pad, 0.0);
    for (std::size_t off = 0; off < s.symbols.size(); off += wht_block_size)
        wht_block_inplace(std::span<double>(s.symbols.data() + off, wht_block_size));
    return s;
}

/// Exact inverse of serialize_symbols: inverse WHT, strip padding,
/// split back into per-chunk arrays.
inline std::vector<std::vector<double>> deserialize_symbols(const SymbolStream& s) {
    const std::size_t block = s.layout.wht_block;
    if (block == 0 || (block & (block - 1)) != 0)
        throw contract_error("deserialize_symbols: bad WHT block size in layout");
    if (s.symbols.size() % block != 0)
        throw integrity_error("deserialize_symbols: stream length not a block multiple");

    std::vector<double> flat = s.symbols;
    for (std::size_t off = 0; off < flat.size(); off += block)
        wht_block_inplace(std::span<double>(flat.data() + off, block)); // self-inverse

    std::size_t total = 0;
    for (std::size_t n : s.layout.chunk_sizes) total += n;
    if (total + s.layout.pad != flat.size())
        throw integrity_error("deserialize_symbols: layout does not match stream length");

    std::vector<std::vector<double>> chunks;
    chunks.reserve(s.layout.chunk_sizes.size());
    std::size_t pos = 0;
    for (std::size_t n : s.layout.chunk_sizes) {
        chunks.emplace_back(flat.begin() + pos, flat.begin() + pos + n);
        pos += n;
    }
    return chunks;
}

/// Add independent zero-mean Gaussian noise of the model's variance to
/// every symbol. Deterministic given the model seed.
inline SymbolStream transmit(const SymbolStream& stream, const ChannelModel& model) {
    if (!(model.noise_var >= 0.0))
        throw contract_error("transmit: noise variance must be >= 0");
    SymbolStream out = stream;
    if (model.noise_var == 0.0) return out;
    NoiseSource noise(model.seed);
    const double sigma = std::sqrt(model.noise_var);
    for (double& y : out.symbols) y += sigma * noise.next();
    return out;
}

inline double mean_symbol_power(const SymbolStream& s) {
    if (s.symbols.empty()) return 0.0;
    return sum_squares(s.symbols) / static_cast<double>(s.symbols.size());
}

} // namespace nlcast
