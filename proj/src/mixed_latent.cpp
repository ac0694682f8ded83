#include "specedit/mixed_latent.hpp"

#include "specedit/errors.hpp"

namespace specedit {

MixedLatent::MixedLatent(LatentGrid coarse, TokenSet expand_set, std::vector<double> patches)
    : coarse_(std::move(coarse)), expand_set_(std::move(expand_set)), patches_(std::move(patches)) {
    if (expand_set_.height() != coarse_.height() || expand_set_.width() != coarse_.width()) {
        throw Error(ErrorCode::GridMismatch, "expand set grid differs from coarse latent");
    }
    if (patches_.size() != expand_set_.size() * patch_stride()) {
        throw Error(ErrorCode::ShapeMismatch, "patch storage does not match expand set size");
    }
    slots_.assign(coarse_.tokens(), -1);
    const auto& coords = expand_set_.coords();
    for (std::size_t k = 0; k < coords.size(); ++k) {
        slots_[coords[k].row * coarse_.width() + coords[k].col] = static_cast<std::int64_t>(k);
    }
}

std::vector<SequenceToken> MixedLatent::sequence() const {
    std::vector<SequenceToken> seq;
    seq.reserve(static_cast<std::size_t>(sequence_length()));
    for (std::uint32_t i = 0; i < coarse_.height(); ++i) {
        for (std::uint32_t j = 0; j < coarse_.width(); ++j) {
            const TokenIndex t{i, j};
            if (slot(t) < 0) {
                seq.push_back({2.0 * i + 0.5, 2.0 * j + 0.5, 2, t, 0});
                continue;
            }
            for (std::uint8_t sub = 0; sub < 4; ++sub) {
                seq.push_back({2.0 * i + sub / 2, 2.0 * j + sub % 2, 1, t, sub});
            }
        }
    }
    return seq;
}

LatentGrid MixedLatent::collapse_to_fine() const {
    const std::size_t h = coarse_.height();
    const std::size_t w = coarse_.width();
    const std::size_t C = coarse_.channels();
    LatentGrid fine(2 * h, 2 * w, C);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const auto k = slots_[i * w + j];
            for (std::size_t sub = 0; sub < 4; ++sub) {
                const std::size_t fr = 2 * i + sub / 2;
                const std::size_t fc = 2 * j + sub % 2;
                for (std::size_t c = 0; c < C; ++c) {
                    fine.at(fr, fc, c) = k < 0 ? coarse_.at(i, j, c)
                                               : patches_[static_cast<std::size_t>(k) * 4 * C + sub * C + c];
                }
            }
        }
    }
    return fine;
}

void MixedLatent::sync_coarse_from_patches() {
    const std::size_t C = coarse_.channels();
    const auto& coords = expand_set_.coords();
    for (std::size_t k = 0; k < coords.size(); ++k) {
        const double* p = patches_.data() + k * 4 * C;
        for (std::size_t c = 0; c < C; ++c) {
            coarse_.at(coords[k].row, coords[k].col, c) = (p[c] + p[C + c] + p[2 * C + c] + p[3 * C + c]) * 0.25;
        }
    }
}

}  // namespace specedit
