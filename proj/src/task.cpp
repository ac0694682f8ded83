#include "specedit/task.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "specedit/draft_verify.hpp"
#include "specedit/errors.hpp"
#include "specedit/rng.hpp"

namespace specedit {
namespace {

struct Wave {
    double fy;
    double fx;
    double phase;
    double amplitude;
};

struct Texture {
    std::vector<double> offsets;            // per channel
    std::vector<std::vector<Wave>> waves;   // per channel
};

Texture make_texture(std::size_t channels, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> period(6.0, 40.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> amp(0.05, 0.2);
    std::uniform_real_distribution<double> off(0.8, 1.5);
    std::bernoulli_distribution coin(0.5);
    Texture tex;
    tex.offsets.resize(channels);
    tex.waves.resize(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        // Latents carry a per-task DC color; texture rides on top of it.
        tex.offsets[c] = coin(rng) ? off(rng) : -off(rng);
        for (int k = 0; k < 3; ++k) {
            const double theta = angle(rng);
            const double f = 1.0 / period(rng);
            tex.waves[c].push_back({f * std::sin(theta), f * std::cos(theta), angle(rng), amp(rng)});
        }
    }
    return tex;
}

double texture_value(const Texture& tex, std::size_t c, double y, double x, double phase_shift) {
    double v = tex.offsets[c];
    for (const auto& w : tex.waves[c]) {
        v += w.amplitude * std::sin(2.0 * std::numbers::pi * (w.fy * y + w.fx * x) + w.phase + phase_shift);
    }
    return v;
}

std::vector<std::uint8_t> draw_mask(const TaskParams& p, std::mt19937_64& rng) {
    const double H = static_cast<double>(p.height);
    const double W = static_cast<double>(p.width);
    const double area = p.mask_fraction * H * W;
    std::vector<std::uint8_t> mask(p.height * p.width, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto paint_disk = [&](double cy, double cx, double r) {
        for (std::size_t y = 0; y < p.height; ++y) {
            for (std::size_t x = 0; x < p.width; ++x) {
                const double dy = y + 0.5 - cy;
                const double dx = x + 0.5 - cx;
                if (dy * dy + dx * dx <= r * r) mask[y * p.width + x] = 1;
            }
        }
    };

    switch (p.mask) {
        case MaskShape::Rect: {
            const double aspect = 0.75 + unit(rng) * (4.0 / 3.0 - 0.75);
            auto w = static_cast<std::size_t>(std::lround(std::sqrt(area * aspect)));
            w = std::clamp<std::size_t>(w, 1, p.width);
            auto h = static_cast<std::size_t>(std::lround(area / static_cast<double>(w)));
            h = std::clamp<std::size_t>(h, 1, p.height);
            const auto y0 = static_cast<std::size_t>(unit(rng) * static_cast<double>(p.height - h + 1));
            const auto x0 = static_cast<std::size_t>(unit(rng) * static_cast<double>(p.width - w + 1));
            for (std::size_t y = y0; y < std::min(y0 + h, p.height); ++y) {
                for (std::size_t x = x0; x < std::min(x0 + w, p.width); ++x) mask[y * p.width + x] = 1;
            }
            break;
        }
        case MaskShape::Disk: {
            const double r = std::sqrt(area / std::numbers::pi);
            const double cy = r + unit(rng) * std::max(0.0, H - 2 * r);
            const double cx = r + unit(rng) * std::max(0.0, W - 2 * r);
            paint_disk(cy, cx, r);
            break;
        }
        case MaskShape::MultiBlob: {
            const int n = std::max(1, p.blobs);
            const double r = std::sqrt(area / n / std::numbers::pi);
            for (int b = 0; b < n; ++b) {
                const double cy = r + unit(rng) * std::max(0.0, H - 2 * r);
                const double cx = r + unit(rng) * std::max(0.0, W - 2 * r);
                paint_disk(cy, cx, r);
            }
            break;
        }
    }
    return mask;
}

double mask_fraction_of(const std::vector<std::uint8_t>& mask) {
    std::size_t n = 0;
    for (auto m : mask) n += m;
    return static_cast<double>(n) / static_cast<double>(mask.size());
}

void check_shape(const TaskParams& p) {
    if (p.height == 0 || p.width == 0 || p.channels == 0) throw Error(ErrorCode::InvalidArgument, "empty task shape");
    if (p.height % kCoarseFactor != 0 || p.width % kCoarseFactor != 0) {
        throw Error(ErrorCode::NonDivisibleShape, "task shape must be divisible by 4");
    }
    if (!(p.strength >= 0.0 && p.strength <= 1.0)) throw Error(ErrorCode::InvalidArgument, "strength outside [0,1]");
    if (!(p.prior_var >= 0.0)) throw Error(ErrorCode::InvalidArgument, "prior_var must be >= 0");
}

// Footprints of every coarse token holding at least one edited pixel.
std::vector<std::uint8_t> touched_footprint(const std::vector<std::uint8_t>& mask, std::size_t H, std::size_t W) {
    const std::size_t cw = W / kCoarseFactor;
    std::vector<std::uint8_t> touched((H / kCoarseFactor) * cw, 0);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            if (mask[y * W + x]) touched[(y / kCoarseFactor) * cw + x / kCoarseFactor] = 1;
        }
    }
    std::vector<std::uint8_t> region(H * W, 0);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) region[y * W + x] = touched[(y / kCoarseFactor) * cw + x / kCoarseFactor];
    }
    return region;
}

SyntheticTask finish_task(const TaskParams& p, LatentGrid base, LatentGrid edit, std::vector<std::uint8_t> mask,
                          LatentGrid z_ori) {
    SyntheticTask task;
    task.params = p;
    task.condition = EditCondition{std::move(base), std::move(edit), mask, p.strength};
    task.condition.validate();
    task.target = task.condition.target_mean();
    task.z_ori = std::move(z_ori);
    task.fine_fraction = mask_fraction_of(mask);
    task.truth = coarse_truth_mask(mask, p.height, p.width);
    task.edit_region = touched_footprint(mask, p.height, p.width);
    task.fine_mask = std::move(mask);
    return task;
}

}  // namespace

const char* mask_shape_name(MaskShape m) {
    switch (m) {
        case MaskShape::Rect: return "rect";
        case MaskShape::Disk: return "disk";
        case MaskShape::MultiBlob: return "multiblob";
    }
    return "unknown";
}

const char* edit_kind_name(EditKind e) {
    switch (e) {
        case EditKind::Recolor: return "recolor";
        case EditKind::TexturePhase: return "texture-phase";
        case EditKind::MeanShift: return "mean-shift";
    }
    return "unknown";
}

TokenSet coarse_truth_mask(const std::vector<std::uint8_t>& fine_mask, std::size_t height, std::size_t width) {
    if (fine_mask.size() != height * width) throw Error(ErrorCode::ShapeMismatch, "mask size mismatch");
    const std::size_t ch = height / kCoarseFactor;
    const std::size_t cw = width / kCoarseFactor;
    std::vector<std::uint8_t> coarse(ch * cw, 0);
    const std::size_t half = kCoarseFactor * kCoarseFactor / 2;
    for (std::size_t i = 0; i < ch; ++i) {
        for (std::size_t j = 0; j < cw; ++j) {
            std::size_t covered = 0;
            for (std::size_t dy = 0; dy < kCoarseFactor; ++dy) {
                for (std::size_t dx = 0; dx < kCoarseFactor; ++dx) {
                    covered += fine_mask[(i * kCoarseFactor + dy) * width + j * kCoarseFactor + dx];
                }
            }
            coarse[i * cw + j] = covered >= half ? 1 : 0;
        }
    }
    return TokenSet::from_mask(ch, cw, coarse);
}

SyntheticTask generate_task(const TaskParams& p) {
    if (p.kind == TaskKind::Adversarial) return make_adversarial_task(p);
    check_shape(p);
    if (!(p.mask_fraction > 0.01 && p.mask_fraction < 0.9)) {
        throw Error(ErrorCode::InvalidArgument, "mask_fraction must lie in (0.01, 0.9)");
    }
    std::mt19937_64 rng(derive_seed(p.seed, 0x7a5c));
    const std::size_t H = p.height;
    const std::size_t W = p.width;
    const std::size_t C = p.channels;

    std::vector<std::uint8_t> mask;
    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
        mask = draw_mask(p, rng);
        const double f = mask_fraction_of(mask);
        accepted = f > 0.0 && std::abs(f - p.mask_fraction) <= 0.1 * p.mask_fraction;
    }
    if (!accepted) throw Error(ErrorCode::GeneratorRetryExhausted, "no mask within 10% of the requested fraction");

    const Texture tex = make_texture(C, rng);
    std::uniform_real_distribution<double> color(-1.5, 1.5);
    std::vector<double> recolor(C);
    for (auto& v : recolor) v = color(rng);
    // The shift agrees with the DC color's sign on half the channels and opposes it on
    // the rest, so it rotates the feature direction instead of only scaling it.
    std::vector<double> shift_sign(C);
    for (std::size_t c = 0; c < C; ++c) shift_sign[c] = (c % 2 == 0) ? 1.0 : -1.0;
    std::shuffle(shift_sign.begin(), shift_sign.end(), rng);
    for (std::size_t c = 0; c < C; ++c) shift_sign[c] *= tex.offsets[c] > 0.0 ? 1.0 : -1.0;

    LatentGrid base(H, W, C);
    LatentGrid edit(H, W, C);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            for (std::size_t c = 0; c < C; ++c) {
                const double b = texture_value(tex, c, static_cast<double>(y), static_cast<double>(x), 0.0);
                base.at(y, x, c) = b;
                switch (p.edit) {
                    case EditKind::Recolor: edit.at(y, x, c) = recolor[c]; break;
                    case EditKind::TexturePhase:
                        edit.at(y, x, c) = texture_value(tex, c, static_cast<double>(y), static_cast<double>(x),
                                                         std::numbers::pi);
                        break;
                    case EditKind::MeanShift: edit.at(y, x, c) = b + p.delta * shift_sign[c]; break;
                }
            }
        }
    }

    LatentGrid z_ori = base;
    if (p.prior_var > 0.0) {
        NormalStream noise(derive_seed(p.seed, 0x2011));
        const double sd = std::sqrt(p.prior_var);
        for (auto& v : z_ori.data()) v += sd * noise.next();
    }
    return finish_task(p, std::move(base), std::move(edit), std::move(mask), std::move(z_ori));
}

SyntheticTask make_adversarial_task(const TaskParams& p, std::size_t side) {
    check_shape(p);
    const std::size_t H = p.height;
    const std::size_t W = p.width;
    const std::size_t C = p.channels;
    if (H % 16 != 0 || W % 16 != 0 || H < 64 || W < 64) {
        throw Error(ErrorCode::NonDivisibleShape, "adversarial fixture needs H, W >= 64 and divisible by 16");
    }
    if (side == 0) {
        const double target = std::sqrt(std::clamp(p.mask_fraction, 0.02, 0.5) * static_cast<double>(H * W));
        side = std::max<std::size_t>(16, static_cast<std::size_t>(std::lround(target / 16.0)) * 16);
    }
    side = std::min(side, std::min(H, W) - 32);
    std::mt19937_64 rng(derive_seed(p.seed, 0xad5));
    // Square origin on a 16-pixel lattice, at least 16 pixels from every border.
    const std::size_t slots_y = (H - side - 32) / 16 + 1;
    const std::size_t slots_x = (W - side - 32) / 16 + 1;
    const std::size_t y0 = 16 + 16 * std::uniform_int_distribution<std::size_t>(0, slots_y - 1)(rng);
    const std::size_t x0 = 16 + 16 * std::uniform_int_distribution<std::size_t>(0, slots_x - 1)(rng);

    std::vector<double> flat(C);
    std::vector<double> recolor(C);
    for (std::size_t c = 0; c < C; ++c) {
        flat[c] = (c % 2 == 0) ? 0.8 : -0.8;
        recolor[c] = (c % 2 == 0) ? -0.8 : 0.8;
    }
    if (C == 1) recolor[0] = -flat[0];

    std::vector<std::uint8_t> mask(H * W, 0);
    LatentGrid base(H, W, C);
    LatentGrid edit(H, W, C);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            const bool inside = y >= y0 && y < y0 + side && x >= x0 && x < x0 + side;
            const bool moat = y + 1 >= y0 && y <= y0 + side && x + 1 >= x0 && x <= x0 + side;
            if (inside) mask[y * W + x] = 1;
            for (std::size_t c = 0; c < C; ++c) {
                const double checker = ((y / 2 + x / 2 + c) % 2 == 0) ? 1.0 : -1.0;
                base.at(y, x, c) = moat ? flat[c] : checker;
                edit.at(y, x, c) = recolor[c];
            }
        }
    }
    // The input is the noise-free base so the edge map inside the square is exactly zero.
    LatentGrid z_ori = base;
    return finish_task(p, std::move(base), std::move(edit), std::move(mask), std::move(z_ori));
}

}  // namespace specedit
