#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlcast/errors.hpp"

namespace nlcast {

/// One luma plane, row-major, double precision.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<double> samples; // height * width

    Frame() = default;
    Frame(int w, int h, double fill = 0.0)
        : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int y, int x) { return samples[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return samples[static_cast<std::size_t>(y) * width + x]; }
};

/// Dense 3-D array, index order (t, y, x), row-major in x.
struct Tensor3 {
    int nt = 0;
    int nh = 0;
    int nw = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(int t, int h, int w, double fill = 0.0)
        : nt(t), nh(h), nw(w),
          v(static_cast<std::size_t>(t) * h * w, fill) {}

    std::size_t size() const { return v.size(); }

    double& at(int t, int y, int x) {
        return v[(static_cast<std::size_t>(t) * nh + y) * nw + x];
    }
    double at(int t, int y, int x) const {
        return v[(static_cast<std::size_t>(t) * nh + y) * nw + x];
    }

    bool same_shape(const Tensor3& o) const {
        return nt == o.nt && nh == o.nh && nw == o.nw;
    }
};

inline double sum_squares(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x * x;
    return s;
}

} // namespace nlcast
