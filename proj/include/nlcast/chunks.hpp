#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nlcast/errors.hpp"
#include "nlcast/tensor.hpp"
#include "nlcast/transform.hpp"

namespace nlcast {

/// Partition geometry: number of cells along each tensor axis.
struct ChunkGrid {
    int nt = 1;
    int nh = 8;
    int nw = 8;

    int cell_count() const { return nt * nh * nw; }
};

/// Coefficients of one grid cell, flattened in cell raster order.
struct ChunkData {
    std::size_t index = 0;
    std::vector<double> values;
};

/// Deterministic tiling of a coefficient tensor.
struct ChunkSet {
    ChunkGrid grid;
    int tensor_nt = 0, tensor_nh = 0, tensor_nw = 0;
    std::vector<ChunkData> chunks; // raster order over the grid (t, then y, then x)

    std::size_t total_count() const { return chunks.size(); }
};

/// Per-chunk side statistics. var0/var1/var2 are second moments of the
/// mean-centered data, of its 1/a signed power, and of its 1-1/a signed
/// power. At a == 1 the degenerate exponent gives var1 == var0 and
/// var2 == 1 by convention.
struct ChunkStats {
    double mean = 0.0;
    double var0 = 0.0;
    double var1 = 0.0;
    double var2 = 0.0;
    double a = 1.0;
};

inline ChunkSet partition_chunks(const Tensor3& coeffs, const ChunkGrid& grid) {
    if (grid.nt < 1 || grid.nh < 1 || grid.nw < 1)
        throw contract_error("partition_chunks: grid counts must be >= 1");
    if (coeffs.nt % grid.nt != 0 || coeffs.nh % grid.nh != 0 || coeffs.nw % grid.nw != 0)
        throw contract_error("partition_chunks: grid (" + std::to_string(grid.nt) + "," +
                             std::to_string(grid.nh) + "," + std::to_string(grid.nw) +
                             ") does not divide tensor shape (" + std::to_string(coeffs.nt) +
                             "," + std::to_string(coeffs.nh) + "," + std::to_string(coeffs.nw) +
                             ")");

    const int ct = coeffs.nt / grid.nt, ch = coeffs.nh / grid.nh, cw = coeffs.nw / grid.nw;
    ChunkSet cs;
    cs.grid = grid;
    cs.tensor_nt = coeffs.nt;
    cs.tensor_nh = coeffs.nh;
    cs.tensor_nw = coeffs.nw;
    cs.chunks.reserve(static_cast<std::size_t>(grid.cell_count()));

    std::size_t idx = 0;
    for (int it = 0; it < grid.nt; ++it)
        for (int ih = 0; ih < grid.nh; ++ih)
            for (int iw = 0; iw < grid.nw; ++iw) {
                ChunkData cd;
                cd.index = idx++;
                cd.values.reserve(static_cast<std::size_t>(ct) * ch * cw);
                for (int t = it * ct; t < (it + 1) * ct; ++t)
                    for (int y = ih * ch; y < (ih + 1) * ch; ++y)
                        for (int x = iw * cw; x < (iw + 1) * cw; ++x)
                            cd.values.push_back(coeffs.at(t, y, x));
                cs.chunks.push_back(std::move(cd));
            }
    return cs;
}

inline ChunkStats compute_stats(std::span<const double> values, double a) {
    if (!(a >= 1.0)) throw contract_error("compute_stats: exponent a must be >= 1");
    if (values.empty()) throw contract_error("compute_stats: empty chunk");

    ChunkStats st;
    st.a = a;
    const double n = static_cast<double>(values.size());
    st.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;

    double s0 = 0.0;
    for (double x : values) {
        const double c = x - st.mean;
        s0 += c * c;
    }
    st.var0 = s0 / n;

    if (a == 1.0) {
        st.var1 = st.var0; // X^{1/a} is X itself
        st.var2 = 1.0;     // X^0 == 1
        return st;
    }
    double s1 = 0.0, s2 = 0.0;
    for (double x : values) {
        const double c = x - st.mean;
        const double p1 = signed_power(c, 1.0 / a);
        const double p2 = signed_power(c, 1.0 - 1.0 / a);
        s1 += p1 * p1;
        s2 += p2 * p2;
    }
    st.var1 = s1 / n;
    st.var2 = s2 / n;
    return st;
}

inline ChunkStats compute_stats(const ChunkData& chunk, double a) {
    return compute_stats(std::span<const double>(chunk.values), a);
}

/// Keep the ceil(keep_fraction * M) chunks with the largest var0;
/// ties broken toward the smaller index.
inline std::vector<std::uint8_t> select_chunks(std::span<const ChunkStats> stats,
                                               double keep_fraction) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw contract_error("select_chunks: keep_fraction must be in (0, 1]");
    const std::size_t m = stats.size();
    const std::size_t n_keep =
        std::min(m, static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(m))));

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (stats[i].var0 != stats[j].var0) return stats[i].var0 > stats[j].var0;
        return i < j;
    });

    std::vector<std::uint8_t> bitmap(m, 0);
    for (std::size_t k = 0; k < n_keep; ++k) bitmap[order[k]] = 1;
    return bitmap;
}

/// Statistics record of one kept chunk, as placed on the metadata channel.
struct SideInfoRecord {
    std::size_t index = 0;
    double mean = 0.0;
    double var0 = 0.0;
    double var1 = 0.0;
    double var2 = 0.0;
};

/// Everything the receiver needs besides the symbols: kept-chunk bitmap,
/// per-kept-chunk statistics, geometry, exponent and power budget.
/// Dropped chunks carry no record (their means are not transmitted).
struct SideInfo {
    ChunkGrid grid;
    int gop_nt = 0, gop_nh = 0, gop_nw = 0;
    double a = 1.0;
    double power = 0.0;
    std::vector<std::uint8_t> kept;       // length M
    std::vector<SideInfoRecord> records;  // kept chunks, ascending index

    std::size_t cell_size() const {
        return static_cast<std::size_t>(gop_nt / grid.nt) * (gop_nh / grid.nh) *
               (gop_nw / grid.nw);
    }
};

inline SideInfo build_side_info(std::span<const ChunkStats> stats,
                                std::span<const std::uint8_t> bitmap, const ChunkGrid& grid,
                                int gop_nt, int gop_nh, int gop_nw, double a, double power) {
    if (stats.size() != bitmap.size())
        throw integrity_error("build_side_info: stats/bitmap size mismatch");
    if (static_cast<std::size_t>(grid.cell_count()) != bitmap.size())
        throw integrity_error("build_side_info: bitmap length does not match grid");

    SideInfo side;
    side.grid = grid;
    side.gop_nt = gop_nt;
    side.gop_nh = gop_nh;
    side.gop_nw = gop_nw;
    side.a = a;
    side.power = power;
    side.kept.assign(bitmap.begin(), bitmap.end());
    for (std::size_t i = 0; i < stats.size(); ++i)
        if (bitmap[i])
            side.records.push_back(
                {i, stats[i].mean, stats[i].var0, stats[i].var1, stats[i].var2});
    return side;
}

/// Place per-kept-chunk values back into a full coefficient tensor;
/// grid cells of discarded chunks are zero-filled. Values are placed
/// verbatim (mean restoration happens during decoding).
inline Tensor3 reassemble(const std::vector<std::vector<double>>& kept_values,
                          const SideInfo& side) {
    if (kept_values.size() != side.records.size())
        throw integrity_error("reassemble: value list does not match kept records");
    if (side.kept.size() != static_cast<std::size_t>(side.grid.cell_count()))
        throw integrity_error("reassemble: bitmap length does not match grid");

    const int ct = side.gop_nt / side.grid.nt;
    const int ch = side.gop_nh / side.grid.nh;
    const int cw = side.gop_nw / side.grid.nw;
    Tensor3 out(side.gop_nt, side.gop_nh, side.gop_nw, 0.0);

    for (std::size_t r = 0; r < side.records.size(); ++r) {
        const std::size_t idx = side.records[r].index;
        if (idx >= side.kept.size() || !side.kept[idx])
            throw integrity_error("reassemble: record " + std::to_string(idx) +
                                  " not marked kept in bitmap");
        const std::vector<double>& vals = kept_values[r];
        if (vals.size() != side.cell_size())
            throw integrity_error("reassemble: chunk " + std::to_string(idx) +
                                  " has wrong value count");
        const int it = static_cast<int>(idx) / (side.grid.nh * side.grid.nw);
        const int ih = (static_cast<int>(idx) / side.grid.nw) % side.grid.nh;
        const int iw = static_cast<int>(idx) % side.grid.nw;
        std::size_t k = 0;
        for (int t = it * ct; t < (it + 1) * ct; ++t)
            for (int y = ih * ch; y < (ih + 1) * ch; ++y)
                for (int x = iw * cw; x < (iw + 1) * cw; ++x)
                    out.at(t, y, x) = vals[k++];
    }
    return out;
}

namespace detail {

// 17 significant decimal digits: enough for a bit-exact double round trip.
inline std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_double_field(const std::string& s, const char* what) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw parse_error(std::string("side info: bad ") + what + " '" + s + "'");
    return v;
}

} // namespace detail

/// Text serialization, one record per line. Doubles are printed with 17
/// significant digits so the round trip is bit-exact.
inline void write_side_info(const SideInfo& side, std::ostream& out) {
    out << "nlcast-side-info 1\n";
    out << "grid " << side.grid.nt << " " << side.grid.nh << " " << side.grid.nw << "\n";
    out << "gop " << side.gop_nt << " " << side.gop_nh << " " << side.gop_nw << "\n";
    out << "a " << detail::fmt_double(side.a) << "\n";
    out << "power " << detail::fmt_double(side.power) << "\n";
    out << "chunks " << side.kept.size() << "\n";
    out << "bitmap ";
    for (std::uint8_t b : side.kept) out << (b ? '1' : '0');
    out << "\n";
    for (const SideInfoRecord& r : side.records)
        out << "record " << r.index << " 1 " << detail::fmt_double(r.mean) << " "
            << detail::fmt_double(r.var0) << " " << detail::fmt_double(r.var1) << " "
            << detail::fmt_double(r.var2) << "\n";
    out << "end\n";
}

inline std::string side_info_to_string(const SideInfo& side) {
    std::ostringstream os;
    write_side_info(side, os);
    return os.str();
}

inline SideInfo read_side_info(std::istream& in) {
    SideInfo side;
    std::string line;
    if (!std::getline(in, line) || line != "nlcast-side-info 1")
        throw parse_error("side info: bad signature line");

    std::size_t m = 0;
    bool saw_end = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "grid") {
            if (!(ls >> side.grid.nt >> side.grid.nh >> side.grid.nw))
                throw parse_error("side info: bad grid line");
        } else if (key == "gop") {
            if (!(ls >> side.gop_nt >> side.gop_nh >> side.gop_nw))
                throw parse_error("side info: bad gop line");
        } else if (key == "a") {
            std::string v;
            ls >> v;
            side.a = detail::parse_double_field(v, "exponent");
        } else if (key == "power") {
            std::string v;
            ls >> v;
            side.power = detail::parse_double_field(v, "power");
        } else if (key == "chunks") {
            if (!(ls >> m)) throw parse_error("side info: bad chunks line");
        } else if (key == "bitmap") {
            std::string bits;
            ls >> bits;
            if (bits.size() != m) throw parse_error("side info: bitmap length mismatch");
            side.kept.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                if (bits[i] != '0' && bits[i] != '1')
                    throw parse_error("side info: bad bitmap digit");
                side.kept[i] = bits[i] == '1';
            }
        } else if (key == "record") {
            SideInfoRecord r;
            int kept_flag = 0;
            std::string mean, v0, v1, v2;
            if (!(ls >> r.index >> kept_flag >> mean >> v0 >> v1 >> v2))
                throw parse_error("side info: bad record line '" + line + "'");
            r.mean = detail::parse_double_field(mean, "mean");
            r.var0 = detail::parse_double_field(v0, "var0");
            r.var1 = detail::parse_double_field(v1, "var1");
            r.var2 = detail::parse_double_field(v2, "var2");
            side.records.push_back(r);
        } else if (key == "end") {
            saw_end = true;
            break;
        } else {
            throw parse_error("side info: unknown key '" + key + "'");
        }
    }
    if (!saw_end) throw parse_error("side info: missing end marker");
    if (side.kept.size() != m) throw parse_error("side info: missing bitmap");
    return side;
}

inline SideInfo side_info_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_side_info(is);
}

} // namespace nlcast
