#pragma once

#include <cstdint>
#include <vector>

#include "specedit/diffusion.hpp"
#include "specedit/grid.hpp"
#include "specedit/mixed_latent.hpp"

namespace specedit {

/// Synthetic conditioning: the data mean is base_mean outside the mask and
/// base + strength * (edit - base) inside it. All fields live on the full
/// resolution grid.
struct EditCondition {
    LatentGrid base_mean;
    LatentGrid edit_mean;
    std::vector<std::uint8_t> edit_mask;  // H*W, row-major
    double strength = 1.0;

    std::size_t height() const noexcept { return base_mean.height(); }
    std::size_t width() const noexcept { return base_mean.width(); }

    void validate() const;

    /// mu(c) at full resolution.
    LatentGrid target_mean() const;
    /// mu(c) area-averaged by `s`.
    LatentGrid target_mean_at(std::size_t s) const;
    /// Downsample factor that maps the full grid onto a grid of the given size.
    std::size_t scale_for(std::size_t height, std::size_t width) const;
};

struct DenoiseOutput {
    LatentGrid eps;
    std::int64_t tokens = 0;  // sequence length the step attended over
};

struct MixedDenoiseOutput {
    MixedLatent eps;
    std::int64_t tokens = 0;
};

/// Noise predictor contract. Outputs mirror input structure; implementations
/// must be deterministic and safe to call concurrently.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    virtual DenoiseOutput predict(const LatentGrid& x_t, const EditCondition& c, int t,
                                  const NoiseSchedule& sched) const = 0;

    /// Coarse tokens have footprint 2 and fine cells footprint 1 on the
    /// expanded grid; expanded tokens' coarse entries mirror their patch mean.
    virtual MixedDenoiseOutput predict_mixed(const MixedLatent& x_t, const EditCondition& c, int t,
                                             const NoiseSchedule& sched) const = 0;
};

/// eps-hat for x0 ~ N(mu, prior_var) elementwise at the grid's own resolution:
/// mu is c's target mean downsampled to the grid and the variance is prior_var / s^2.
LatentGrid gaussian_oracle_denoiser(const LatentGrid& x_t, const EditCondition& c, int t,
                                    const NoiseSchedule& sched, double prior_var);

/// Closed-form Bayes denoiser for the synthetic Gaussian data model.
class GaussianOracleDenoiser final : public Denoiser {
public:
    explicit GaussianOracleDenoiser(double prior_var);

    double prior_var() const noexcept { return prior_var_; }

    DenoiseOutput predict(const LatentGrid& x_t, const EditCondition& c, int t,
                          const NoiseSchedule& sched) const override;
    MixedDenoiseOutput predict_mixed(const MixedLatent& x_t, const EditCondition& c, int t,
                                     const NoiseSchedule& sched) const override;

private:
    double prior_var_;
};

}  // namespace specedit
