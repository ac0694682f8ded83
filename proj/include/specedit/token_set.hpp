#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "specedit/grid.hpp"

namespace specedit {

enum class Provenance : std::uint8_t { None = 0, Edit = 1, Uniform = 2, Both = 3 };

/// Set of coordinates on a coarse token grid, each tagged with where it came from.
/// Coordinates are kept in row-major order.
class TokenSet {
public:
    TokenSet() = default;
    TokenSet(std::size_t height, std::size_t width);
    /// `flags` is a dense row-major h*w array of Provenance values (None = absent).
    TokenSet(std::size_t height, std::size_t width, std::vector<Provenance> flags);

    static TokenSet from_coords(std::size_t height, std::size_t width, const std::vector<TokenIndex>& coords,
                                Provenance tag = Provenance::Edit);
    static TokenSet from_mask(std::size_t height, std::size_t width, const std::vector<std::uint8_t>& mask,
                              Provenance tag = Provenance::Edit);
    static TokenSet all(std::size_t height, std::size_t width, Provenance tag = Provenance::Edit);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t size() const noexcept { return coords_.size(); }
    bool empty() const noexcept { return coords_.empty(); }

    bool contains(TokenIndex t) const;
    bool contains(std::size_t row, std::size_t col) const { return flags_[row * width_ + col] != Provenance::None; }
    Provenance provenance(TokenIndex t) const;
    const std::vector<TokenIndex>& coords() const noexcept { return coords_; }

    /// Dense 0/1 membership mask, row-major.
    std::vector<std::uint8_t> mask() const;
    bool same_grid(const TokenSet& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }
    bool is_subset_of(const TokenSet& other) const;

    friend bool operator==(const TokenSet& a, const TokenSet& b) {
        return a.height_ == b.height_ && a.width_ == b.width_ && a.flags_ == b.flags_;
    }

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<Provenance> flags_;
    std::vector<TokenIndex> coords_;
};

}  // namespace specedit
