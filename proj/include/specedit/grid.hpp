#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace specedit {

/// Row-major H x W x C field of doubles, channel-fastest:
/// index = (row * W + col) * C + c.
class LatentGrid {
public:
    LatentGrid() = default;
    LatentGrid(std::size_t height, std::size_t width, std::size_t channels);
    LatentGrid(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t tokens() const noexcept { return height_ * width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::size_t index(std::size_t row, std::size_t col, std::size_t c = 0) const noexcept {
        return (row * width_ + col) * channels_ + c;
    }
    double& at(std::size_t row, std::size_t col, std::size_t c = 0) noexcept { return data_[index(row, col, c)]; }
    double at(std::size_t row, std::size_t col, std::size_t c = 0) const noexcept { return data_[index(row, col, c)]; }

    std::span<double> token(std::size_t row, std::size_t col) noexcept {
        return {data_.data() + index(row, col), channels_};
    }
    std::span<const double> token(std::size_t row, std::size_t col) const noexcept {
        return {data_.data() + index(row, col), channels_};
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    bool same_shape(const LatentGrid& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

    /// Throws NonFiniteValue if any element is NaN or infinite.
    void check_finite() const;

    friend bool operator==(const LatentGrid&, const LatentGrid&) = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

struct TokenIndex {
    std::uint32_t row = 0;
    std::uint32_t col = 0;

    friend auto operator<=>(const TokenIndex&, const TokenIndex&) = default;
};

/// Factors accepted by the resolution operators.
bool is_valid_scale(std::size_t s);

/// Area-average each s x s block. s must divide both spatial dimensions.
LatentGrid downsample(const LatentGrid& g, std::size_t s);

/// Replicate each token into an s x s block.
LatentGrid upsample_nearest(const LatentGrid& g, std::size_t s);

/// Largest absolute elementwise difference; grids must share a shape.
double max_abs_diff(const LatentGrid& a, const LatentGrid& b);

/// Per-channel mean over all tokens.
std::vector<double> channel_means(const LatentGrid& g);

}  // namespace specedit
