#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "specedit/denoiser.hpp"
#include "specedit/mixed_latent.hpp"
#include "specedit/token_set.hpp"

namespace specedit {

/// {(i, j) : i mod k == 0 and j mod k == 0}, tagged Uniform.
TokenSet uniform_coverage(std::size_t coarse_h, std::size_t coarse_w, std::size_t k);

/// Set union; tokens present in both carry Provenance::Both.
TokenSet build_expand_set(const TokenSet& t_edit, const TokenSet& t_uniform);

struct ExpandParams {
    double perturb_scale = 0.05;  // sigma_e
    std::uint64_t seed = 0;
};

/// Q = H4 / 2, the orthonormal Sylvester-Hadamard matrix. Row 0 is all 1/2.
inline constexpr std::array<std::array<double, 4>, 4> kExpandBasis = {{
    {0.5, 0.5, 0.5, 0.5},
    {0.5, -0.5, 0.5, -0.5},
    {0.5, 0.5, -0.5, -0.5},
    {0.5, -0.5, -0.5, 0.5},
}};

/// Expands one coarse token into a 2x2 patch ([dy][dx][c], 4*C values).
/// Per channel f = Q^T (2c, s*d2, s*d3, s*d4): the patch mean is c exactly and
/// the patch energy is 4c^2 + s^2 * sum(d^2).
std::vector<double> expand_token(std::span<const double> token, const ExpandParams& p);

/// Seed used for the token at (row, col) so a token's perturbation does not
/// depend on which other tokens are expanded.
std::uint64_t expand_token_seed(std::uint64_t seed, TokenIndex t);

MixedLatent assemble_mixed(const LatentGrid& coarse, const TokenSet& t_expand, const ExpandParams& p);

struct SelectiveStepResult {
    MixedLatent latent;
    std::int64_t tokens = 0;  // N_mix = h*w + 3*|T_expand|
};

/// One denoising step on the mixed latent: fine patches of expanded tokens and
/// coarse values of the others are updated with the reverse rule t -> t_prev.
SelectiveStepResult selective_step(const MixedLatent& mixed, const EditCondition& c, int t, int t_prev,
                                   const NoiseSchedule& sched, const Denoiser& denoiser, std::uint64_t seed);

inline SelectiveStepResult selective_step(const MixedLatent& mixed, const EditCondition& c, int t,
                                          const NoiseSchedule& sched, const Denoiser& denoiser,
                                          std::uint64_t seed) {
    return selective_step(mixed, c, t, t - 1, sched, denoiser, seed);
}

}  // namespace specedit
