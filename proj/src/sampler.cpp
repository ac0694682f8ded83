#include "specedit/sampler.hpp"

#include "specedit/errors.hpp"
#include "specedit/rng.hpp"

namespace specedit {

std::uint64_t step_seed(std::uint64_t seed, int step_index) {
    return derive_seed(seed, 1, static_cast<std::uint64_t>(step_index));
}

std::uint64_t entry_noise_seed(std::uint64_t seed) { return derive_seed(seed, 0); }

SampleResult sample(const LatentGrid& init, const EditCondition& c, const NoiseSchedule& sched,
                    const Denoiser& denoiser, int nfe, std::uint64_t seed, int entry_step) {
    if (entry_step == 0) entry_step = sched.num_steps();
    if (entry_step > sched.num_steps()) throw Error(ErrorCode::StepOutOfRange, "entry step beyond T");
    const auto steps = select_steps(entry_step, nfe);
    SampleResult result;
    result.output = forward_noise(init, steps.front(), sched, entry_noise_seed(seed));
    result.step_tokens.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const int t = steps[i];
        const int t_prev = i + 1 < steps.size() ? steps[i + 1] : 0;
        auto pred = denoiser.predict(result.output, c, t, sched);
        result.output = reverse_step(result.output, pred.eps, t, t_prev, sched, step_seed(seed, static_cast<int>(i)));
        result.step_tokens.push_back(pred.tokens);
    }
    return result;
}

}  // namespace specedit
