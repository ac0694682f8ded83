#pragma once

#include <cstdint>
#include <vector>

#include "specedit/denoiser.hpp"

namespace specedit {

struct SampleResult {
    LatentGrid output;
    std::vector<std::int64_t> step_tokens;  // denoiser-reported sequence length per step
};

/// Forward-noises `init` to the first selected step, then runs `nfe` reverse
/// steps down to t = 0. Steps are select_steps(entry_step, nfe); entry_step
/// defaults to T.
SampleResult sample(const LatentGrid& init, const EditCondition& c, const NoiseSchedule& sched,
                    const Denoiser& denoiser, int nfe, std::uint64_t seed, int entry_step = 0);

/// Per-step seed used by sample() and the selective sampler for sigma noise.
std::uint64_t step_seed(std::uint64_t seed, int step_index);
/// Seed for the initial forward noising.
std::uint64_t entry_noise_seed(std::uint64_t seed);

}  // namespace specedit
