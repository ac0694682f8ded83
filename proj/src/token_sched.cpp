#include "specedit/token_sched.hpp"

#include <cmath>

#include "specedit/errors.hpp"
#include "specedit/kernels.hpp"
#include "specedit/rng.hpp"

namespace specedit {

TokenSet uniform_coverage(std::size_t coarse_h, std::size_t coarse_w, std::size_t k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    std::vector<Provenance> flags(coarse_h * coarse_w, Provenance::None);
    for (std::size_t i = 0; i < coarse_h; i += k) {
        for (std::size_t j = 0; j < coarse_w; j += k) flags[i * coarse_w + j] = Provenance::Uniform;
    }
    return TokenSet(coarse_h, coarse_w, std::move(flags));
}

TokenSet build_expand_set(const TokenSet& t_edit, const TokenSet& t_uniform) {
    if (!t_edit.same_grid(t_uniform)) throw Error(ErrorCode::GridMismatch, "token sets on different grids");
    const std::size_t h = t_edit.height();
    const std::size_t w = t_edit.width();
    std::vector<Provenance> flags(h * w, Provenance::None);
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const bool e = t_edit.contains(i, j);
            const bool u = t_uniform.contains(i, j);
            flags[i * w + j] = e && u ? Provenance::Both : e ? Provenance::Edit : u ? Provenance::Uniform
                                                                                   : Provenance::None;
        }
    }
    return TokenSet(h, w, std::move(flags));
}

std::vector<double> expand_token(std::span<const double> token, const ExpandParams& p) {
    if (!(p.perturb_scale >= 0.0)) throw Error(ErrorCode::InvalidArgument, "perturbation scale must be >= 0");
    const std::size_t C = token.size();
    std::vector<double> patch(4 * C);
    NormalStream stream(p.seed);
    for (std::size_t c = 0; c < C; ++c) {
        std::array<double, 4> u{2.0 * token[c], 0.0, 0.0, 0.0};
        for (std::size_t r = 1; r < 4; ++r) {
            const double d = stream.next();
            u[r] = p.perturb_scale * d;
        }
        for (std::size_t m = 0; m < 4; ++m) {
            double f = 0.0;
            for (std::size_t r = 0; r < 4; ++r) f += kExpandBasis[r][m] * u[r];
            patch[m * C + c] = f;
        }
    }
    return patch;
}

std::uint64_t expand_token_seed(std::uint64_t seed, TokenIndex t) { return derive_seed(seed, t.row + 1, t.col + 1); }

MixedLatent assemble_mixed(const LatentGrid& coarse, const TokenSet& t_expand, const ExpandParams& p) {
    if (t_expand.height() != coarse.height() || t_expand.width() != coarse.width()) {
        throw Error(ErrorCode::GridMismatch, "expand set does not match the coarse grid");
    }
    const std::size_t stride = 4 * coarse.channels();
    std::vector<double> patches(t_expand.size() * stride);
    const auto& coords = t_expand.coords();
    const auto n = static_cast<std::int64_t>(coords.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const auto t = coords[static_cast<std::size_t>(k)];
        const auto patch = expand_token(coarse.token(t.row, t.col), {p.perturb_scale, expand_token_seed(p.seed, t)});
        std::copy(patch.begin(), patch.end(), patches.begin() + k * static_cast<std::int64_t>(stride));
    }
    return MixedLatent(coarse, t_expand, std::move(patches));
}

SelectiveStepResult selective_step(const MixedLatent& mixed, const EditCondition& c, int t, int t_prev,
                                   const NoiseSchedule& sched, const Denoiser& denoiser, std::uint64_t seed) {
    const double alpha = sched.transition_alpha(t, t_prev);
    const double ab = sched.alpha_bar(t);
    const double coef = alpha >= 1.0 ? 0.0 : (1.0 - alpha) / std::sqrt(1.0 - ab);
    const double sigma = sched.transition_sigma(t, t_prev);

    auto pred = denoiser.predict_mixed(mixed, c, t, sched);
    if (!pred.eps.coarse().same_shape(mixed.coarse()) || pred.eps.patch_data().size() != mixed.patch_data().size()) {
        throw Error(ErrorCode::ShapeMismatch, "denoiser output does not match the mixed latent");
    }

    // Noise for coarse entries comes first so an empty expand set reproduces reverse_step exactly.
    std::vector<double> coarse_noise;
    std::vector<double> patch_noise;
    if (sigma != 0.0) {
        NormalStream stream(seed);
        coarse_noise.resize(mixed.coarse().size());
        patch_noise.resize(mixed.patch_data().size());
        stream.fill(coarse_noise);
        stream.fill(patch_noise);
    }

    const LatentGrid& xc = mixed.coarse();
    LatentGrid next_coarse(xc.height(), xc.width(), xc.channels());
    kernels::reverse_update(xc.data(), pred.eps.coarse().data(), alpha, coef, sigma, coarse_noise,
                            next_coarse.data());
    std::vector<double> next_patches(mixed.patch_data().size());
    kernels::reverse_update(mixed.patch_data(), pred.eps.patch_data(), alpha, coef, sigma, patch_noise,
                            next_patches);

    MixedLatent next(std::move(next_coarse), mixed.expand_set(), std::move(next_patches));
    next.sync_coarse_from_patches();
    return {std::move(next), pred.tokens};
}

}  // namespace specedit
