#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specedit/grid.hpp"

namespace specedit {

enum class SigmaMode { Zero, Ddpm };

/// Per-step alpha_t, cumulative alpha_bar_t and sigma_t for t = 1..T.
/// Step 0 is the clean endpoint with alpha_bar_0 = 1.
class NoiseSchedule {
public:
    /// alpha_bar ramps linearly from `alpha_bar_start` at t = 1 to `alpha_bar_end` at t = T.
    static NoiseSchedule linear_alpha_bar(int num_steps, double alpha_bar_start = 0.9999,
                                          double alpha_bar_end = 0.01, SigmaMode mode = SigmaMode::Zero);

    /// Builds from explicit per-step alphas (each in (0, 1]); alpha_bar is their running product.
    static NoiseSchedule from_alphas(std::vector<double> alphas, SigmaMode mode = SigmaMode::Zero);

    int num_steps() const noexcept { return static_cast<int>(alphas_.size()); }
    SigmaMode sigma_mode() const noexcept { return mode_; }

    double alpha(int t) const;
    double alpha_bar(int t) const;  // defined for 0..T
    double sigma(int t) const;

    /// Effective alpha for a jump t -> t_prev (alpha_bar_t / alpha_bar_{t_prev}).
    double transition_alpha(int t, int t_prev) const;
    /// Posterior standard deviation for t -> t_prev; 0 in Zero mode.
    double transition_sigma(int t, int t_prev) const;

    void check_step(int t) const;

private:
    NoiseSchedule(std::vector<double> alphas, SigmaMode mode);

    std::vector<double> alphas_;
    std::vector<double> alpha_bars_;  // index 0 holds alpha_bar_0 = 1
    SigmaMode mode_;
};

/// Evenly spaced descending subset of 1..entry_step with `count` members:
/// t_i = floor(entry_step - i * entry_step / count).
std::vector<int> select_steps(int entry_step, int count);

/// x_t = sqrt(ab_t) x0 + sqrt(1 - ab_t) eps with eps from the seeded stream.
LatentGrid forward_noise(const LatentGrid& x0, int t, const NoiseSchedule& sched, std::uint64_t seed);

/// Same, returning the injected noise through `noise_out`.
LatentGrid forward_noise(const LatentGrid& x0, int t, const NoiseSchedule& sched, std::uint64_t seed,
                         LatentGrid& noise_out);

/// One reverse update t -> t_prev using the transition alpha; sigma noise drawn from `seed`.
LatentGrid reverse_step(const LatentGrid& x_t, const LatentGrid& eps_hat, int t, int t_prev,
                        const NoiseSchedule& sched, std::uint64_t seed);

/// Consecutive reverse update t -> t - 1.
LatentGrid reverse_step(const LatentGrid& x_t, const LatentGrid& eps_hat, int t, const NoiseSchedule& sched,
                        std::uint64_t seed);

}  // namespace specedit
