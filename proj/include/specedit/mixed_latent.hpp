#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "specedit/grid.hpp"
#include "specedit/token_set.hpp"

namespace specedit {

/// One entry of the mixed token sequence seen by a denoiser. Positions are
/// in units of the fine (2x coarse) grid; coarse tokens sit at their
/// footprint center.
struct SequenceToken {
    double row;
    double col;
    std::uint8_t footprint;  // 2 for coarse tokens, 1 for fine cells
    TokenIndex source;       // coarse token this entry belongs to
    std::uint8_t sub;        // fine cell index dy * 2 + dx; 0 for coarse tokens
};

/// Coarse latent plus a 2x2xC fine patch for every expanded token.
/// Patch cells are stored as [dy][dx][c].
class MixedLatent {
public:
    MixedLatent() = default;
    /// `patches` holds 4*C values per expanded token, in expand_set coordinate order.
    MixedLatent(LatentGrid coarse, TokenSet expand_set, std::vector<double> patches);

    const LatentGrid& coarse() const noexcept { return coarse_; }
    LatentGrid& coarse() noexcept { return coarse_; }
    const TokenSet& expand_set() const noexcept { return expand_set_; }

    std::size_t patch_count() const noexcept { return expand_set_.size(); }
    std::size_t patch_stride() const noexcept { return 4 * coarse_.channels(); }
    std::span<const double> patch(std::size_t k) const {
        return {patches_.data() + k * patch_stride(), patch_stride()};
    }
    std::span<double> patch(std::size_t k) { return {patches_.data() + k * patch_stride(), patch_stride()}; }
    /// Slot of a token's patch, or -1 when the token is not expanded.
    std::int64_t slot(TokenIndex t) const { return slots_[t.row * coarse_.width() + t.col]; }

    std::span<const double> patch_data() const noexcept { return patches_; }
    std::span<double> patch_data() noexcept { return patches_; }

    /// h*w + 3*|T_expand|: every expanded token contributes four fine cells instead of one.
    std::int64_t sequence_length() const noexcept {
        return static_cast<std::int64_t>(coarse_.tokens() + 3 * expand_set_.size());
    }
    std::vector<SequenceToken> sequence() const;

    /// Fine (2h x 2w) grid: patches where expanded, replicated coarse values elsewhere.
    LatentGrid collapse_to_fine() const;

    /// Sets every expanded token's coarse value to the mean of its patch.
    void sync_coarse_from_patches();

private:
    LatentGrid coarse_;
    TokenSet expand_set_;
    std::vector<double> patches_;
    std::vector<std::int64_t> slots_;
};

}  // namespace specedit
