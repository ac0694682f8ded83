#include "specedit/denoiser.hpp"

#include <string>

#include "specedit/errors.hpp"
#include "specedit/kernels.hpp"

namespace specedit {
namespace {

double checked_alpha_bar(const NoiseSchedule& sched, int t) {
    sched.check_step(t);
    const double ab = sched.alpha_bar(t);
    if (ab >= 1.0) throw Error(ErrorCode::InvalidArgument, "oracle denoiser undefined at alpha_bar = 1");
    return ab;
}

}  // namespace

void EditCondition::validate() const {
    if (!base_mean.same_shape(edit_mean)) throw Error(ErrorCode::ShapeMismatch, "base and edit means differ");
    if (edit_mask.size() != base_mean.tokens()) throw Error(ErrorCode::ShapeMismatch, "edit mask size mismatch");
    if (!(strength >= 0.0 && strength <= 1.0)) throw Error(ErrorCode::InvalidArgument, "strength outside [0,1]");
}

LatentGrid EditCondition::target_mean() const {
    validate();
    LatentGrid mu = base_mean;
    const std::size_t C = mu.channels();
    if (strength == 0.0) return mu;
    for (std::size_t p = 0; p < mu.tokens(); ++p) {
        if (!edit_mask[p]) continue;
        for (std::size_t c = 0; c < C; ++c) {
            const double b = base_mean.data()[p * C + c];
            mu.data()[p * C + c] = b + strength * (edit_mean.data()[p * C + c] - b);
        }
    }
    return mu;
}

LatentGrid EditCondition::target_mean_at(std::size_t s) const { return downsample(target_mean(), s); }

std::size_t EditCondition::scale_for(std::size_t h, std::size_t w) const {
    if (h == 0 || height() % h != 0 || width() % w != 0 || height() / h != width() / w ||
        !is_valid_scale(height() / h)) {
        throw Error(ErrorCode::ShapeMismatch, "grid " + std::to_string(h) + "x" + std::to_string(w) +
                                                  " is not a supported downsampling of " + std::to_string(height()) +
                                                  "x" + std::to_string(width()));
    }
    return height() / h;
}

LatentGrid gaussian_oracle_denoiser(const LatentGrid& x_t, const EditCondition& c, int t,
                                    const NoiseSchedule& sched, double prior_var) {
    const double ab = checked_alpha_bar(sched, t);
    const std::size_t s = c.scale_for(x_t.height(), x_t.width());
    const LatentGrid mu = c.target_mean_at(s);
    if (!mu.same_shape(x_t)) throw Error(ErrorCode::ShapeMismatch, "channel count differs from condition");
    LatentGrid eps(x_t.height(), x_t.width(), x_t.channels());
    kernels::oracle_eps(x_t.data(), mu.data(), prior_var / static_cast<double>(s * s), ab, eps.data());
    return eps;
}

GaussianOracleDenoiser::GaussianOracleDenoiser(double prior_var) : prior_var_(prior_var) {
    if (!(prior_var >= 0.0)) throw Error(ErrorCode::InvalidArgument, "prior variance must be non-negative");
}

DenoiseOutput GaussianOracleDenoiser::predict(const LatentGrid& x_t, const EditCondition& c, int t,
                                              const NoiseSchedule& sched) const {
    return {gaussian_oracle_denoiser(x_t, c, t, sched, prior_var_), static_cast<std::int64_t>(x_t.tokens())};
}

MixedDenoiseOutput GaussianOracleDenoiser::predict_mixed(const MixedLatent& x_t, const EditCondition& c, int t,
                                                         const NoiseSchedule& sched) const {
    const double ab = checked_alpha_bar(sched, t);
    const LatentGrid& coarse = x_t.coarse();
    const std::size_t s_coarse = c.scale_for(coarse.height(), coarse.width());
    if (s_coarse < 2) throw Error(ErrorCode::ShapeMismatch, "mixed latent coarse grid must be downsampled");
    const std::size_t s_fine = s_coarse / 2;
    const LatentGrid mu_coarse = c.target_mean_at(s_coarse);
    if (!mu_coarse.same_shape(coarse)) throw Error(ErrorCode::ShapeMismatch, "channel count differs");

    LatentGrid coarse_eps(coarse.height(), coarse.width(), coarse.channels());
    kernels::oracle_eps(coarse.data(), mu_coarse.data(), prior_var_ / static_cast<double>(s_coarse * s_coarse), ab,
                        coarse_eps.data());

    std::vector<double> patch_eps(x_t.patch_data().size());
    if (!patch_eps.empty()) {
        const LatentGrid mu_fine = c.target_mean_at(s_fine);
        const std::size_t C = coarse.channels();
        // Gather the fine-grid means in patch order so the kernel sees contiguous spans.
        std::vector<double> mu_patch(patch_eps.size());
        const auto& coords = x_t.expand_set().coords();
        for (std::size_t k = 0; k < coords.size(); ++k) {
            for (std::size_t sub = 0; sub < 4; ++sub) {
                const auto src = mu_fine.token(2 * coords[k].row + sub / 2, 2 * coords[k].col + sub % 2);
                std::copy(src.begin(), src.end(), mu_patch.begin() + static_cast<std::ptrdiff_t>(k * 4 * C + sub * C));
            }
        }
        kernels::oracle_eps(x_t.patch_data(), mu_patch, prior_var_ / static_cast<double>(s_fine * s_fine), ab,
                            patch_eps);
    }
    MixedLatent eps(std::move(coarse_eps), x_t.expand_set(), std::move(patch_eps));
    eps.sync_coarse_from_patches();
    return {std::move(eps), x_t.sequence_length()};
}

}  // namespace specedit
