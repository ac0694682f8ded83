#include "specedit/token_set.hpp"

#include "specedit/errors.hpp"

namespace specedit {

TokenSet::TokenSet(std::size_t height, std::size_t width)
    : height_(height), width_(width), flags_(height * width, Provenance::None) {}

TokenSet::TokenSet(std::size_t height, std::size_t width, std::vector<Provenance> flags)
    : height_(height), width_(width), flags_(std::move(flags)) {
    if (flags_.size() != height * width) throw Error(ErrorCode::GridMismatch, "flag array does not match grid");
    for (std::size_t i = 0; i < flags_.size(); ++i) {
        if (flags_[i] != Provenance::None) {
            coords_.push_back({static_cast<std::uint32_t>(i / width), static_cast<std::uint32_t>(i % width)});
        }
    }
}

TokenSet TokenSet::from_coords(std::size_t height, std::size_t width, const std::vector<TokenIndex>& coords,
                               Provenance tag) {
    std::vector<Provenance> flags(height * width, Provenance::None);
    for (const auto& t : coords) {
        if (t.row >= height || t.col >= width) {
            throw Error(ErrorCode::GridMismatch, "token (" + std::to_string(t.row) + "," + std::to_string(t.col) +
                                                     ") outside grid");
        }
        flags[t.row * width + t.col] = tag;
    }
    return TokenSet(height, width, std::move(flags));
}

TokenSet TokenSet::from_mask(std::size_t height, std::size_t width, const std::vector<std::uint8_t>& mask,
                             Provenance tag) {
    if (mask.size() != height * width) throw Error(ErrorCode::GridMismatch, "mask does not match grid");
    std::vector<Provenance> flags(height * width, Provenance::None);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) flags[i] = tag;
    }
    return TokenSet(height, width, std::move(flags));
}

TokenSet TokenSet::all(std::size_t height, std::size_t width, Provenance tag) {
    return TokenSet(height, width, std::vector<Provenance>(height * width, tag));
}

bool TokenSet::contains(TokenIndex t) const {
    if (t.row >= height_ || t.col >= width_) return false;
    return flags_[t.row * width_ + t.col] != Provenance::None;
}

Provenance TokenSet::provenance(TokenIndex t) const {
    if (t.row >= height_ || t.col >= width_) return Provenance::None;
    return flags_[t.row * width_ + t.col];
}

std::vector<std::uint8_t> TokenSet::mask() const {
    std::vector<std::uint8_t> m(flags_.size());
    for (std::size_t i = 0; i < flags_.size(); ++i) m[i] = flags_[i] != Provenance::None ? 1 : 0;
    return m;
}

bool TokenSet::is_subset_of(const TokenSet& other) const {
    if (!same_grid(other)) return false;
    for (const auto& t : coords_) {
        if (!other.contains(t)) return false;
    }
    return true;
}

}  // namespace specedit
