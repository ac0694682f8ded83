#include "specedit/grid.hpp"

#include <cmath>
#include <string>

#include "specedit/errors.hpp"
#include "specedit/kernels.hpp"

namespace specedit {

LatentGrid::LatentGrid(std::size_t height, std::size_t width, std::size_t channels)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, 0.0) {
    if (height == 0 || width == 0 || channels == 0) {
        throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
    }
}

LatentGrid::LatentGrid(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (height == 0 || width == 0 || channels == 0) {
        throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
    }
    if (data_.size() != height * width * channels) {
        throw Error(ErrorCode::ShapeMismatch, "data length " + std::to_string(data_.size()) + " != " +
                                                  std::to_string(height * width * channels));
    }
    check_finite();
}

void LatentGrid::check_finite() const {
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw Error(ErrorCode::NonFiniteValue, "element " + std::to_string(i) + " is not finite");
        }
    }
}

bool is_valid_scale(std::size_t s) {
    return s == 1 || s == 2 || s == 4 || s == 8 || s == 16 || s == 32;
}

LatentGrid downsample(const LatentGrid& g, std::size_t s) {
    if (!is_valid_scale(s)) throw Error(ErrorCode::InvalidArgument, "unsupported scale " + std::to_string(s));
    if (g.height() % s != 0 || g.width() % s != 0) {
        throw Error(ErrorCode::NonDivisibleShape, std::to_string(g.height()) + "x" + std::to_string(g.width()) +
                                                      " is not divisible by " + std::to_string(s));
    }
    if (s == 1) return g;
    LatentGrid out(g.height() / s, g.width() / s, g.channels());
    kernels::downsample_mean(g.data(), {g.height(), g.width(), g.channels()}, s, out.data());
    return out;
}

LatentGrid upsample_nearest(const LatentGrid& g, std::size_t s) {
    if (!is_valid_scale(s)) throw Error(ErrorCode::InvalidArgument, "unsupported scale " + std::to_string(s));
    if (s == 1) return g;
    LatentGrid out(g.height() * s, g.width() * s, g.channels());
    kernels::upsample_nearest(g.data(), {g.height(), g.width(), g.channels()}, s, out.data());
    return out;
}

double max_abs_diff(const LatentGrid& a, const LatentGrid& b) {
    if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, "max_abs_diff on different shapes");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

std::vector<double> channel_means(const LatentGrid& g) {
    std::vector<double> sums(g.channels(), 0.0);
    for (std::size_t t = 0; t < g.tokens(); ++t) {
        for (std::size_t c = 0; c < g.channels(); ++c) sums[c] += g.data()[t * g.channels() + c];
    }
    for (auto& s : sums) s /= static_cast<double>(g.tokens());
    return sums;
}

}  // namespace specedit
