#include "specedit/diffusion.hpp"

#include <cmath>

#include "specedit/errors.hpp"
#include "specedit/kernels.hpp"
#include "specedit/rng.hpp"

namespace specedit {

NoiseSchedule::NoiseSchedule(std::vector<double> alphas, SigmaMode mode) : alphas_(std::move(alphas)), mode_(mode) {
    if (alphas_.empty()) throw Error(ErrorCode::InvalidArgument, "schedule needs at least one step");
    alpha_bars_.reserve(alphas_.size() + 1);
    alpha_bars_.push_back(1.0);
    for (double a : alphas_) {
        if (!(a > 0.0 && a <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
        alpha_bars_.push_back(alpha_bars_.back() * a);
    }
}

NoiseSchedule NoiseSchedule::linear_alpha_bar(int num_steps, double alpha_bar_start, double alpha_bar_end,
                                              SigmaMode mode) {
    if (num_steps < 1) throw Error(ErrorCode::InvalidArgument, "T must be positive");
    if (!(alpha_bar_start < 1.0 && alpha_bar_end > 0.0 && alpha_bar_end < alpha_bar_start)) {
        throw Error(ErrorCode::InvalidArgument, "need 1 > alpha_bar_start > alpha_bar_end > 0");
    }
    std::vector<double> alphas;
    alphas.reserve(static_cast<std::size_t>(num_steps));
    double prev = 1.0;
    for (int t = 1; t <= num_steps; ++t) {
        const double frac = num_steps == 1 ? 0.0 : static_cast<double>(t - 1) / (num_steps - 1);
        const double ab = alpha_bar_start + (alpha_bar_end - alpha_bar_start) * frac;
        alphas.push_back(ab / prev);
        prev = ab;
    }
    return NoiseSchedule(std::move(alphas), mode);
}

NoiseSchedule NoiseSchedule::from_alphas(std::vector<double> alphas, SigmaMode mode) {
    return NoiseSchedule(std::move(alphas), mode);
}

void NoiseSchedule::check_step(int t) const {
    if (t < 1 || t > num_steps()) {
        throw Error(ErrorCode::StepOutOfRange, "step " + std::to_string(t) + " outside 1.." +
                                                   std::to_string(num_steps()));
    }
}

double NoiseSchedule::alpha(int t) const {
    check_step(t);
    return alphas_[static_cast<std::size_t>(t - 1)];
}

double NoiseSchedule::alpha_bar(int t) const {
    if (t < 0 || t > num_steps()) throw Error(ErrorCode::StepOutOfRange, "step " + std::to_string(t));
    return alpha_bars_[static_cast<std::size_t>(t)];
}

double NoiseSchedule::sigma(int t) const { return transition_sigma(t, t - 1); }

double NoiseSchedule::transition_alpha(int t, int t_prev) const {
    check_step(t);
    if (t_prev < 0 || t_prev >= t) throw Error(ErrorCode::StepOutOfRange, "t_prev must lie in [0, t)");
    if (t_prev == t - 1) return alphas_[static_cast<std::size_t>(t - 1)];
    return alpha_bars_[static_cast<std::size_t>(t)] / alpha_bars_[static_cast<std::size_t>(t_prev)];
}

double NoiseSchedule::transition_sigma(int t, int t_prev) const {
    const double a = transition_alpha(t, t_prev);
    if (mode_ == SigmaMode::Zero) return 0.0;
    const double ab_t = alpha_bar(t);
    const double ab_prev = alpha_bar(t_prev);
    if (ab_t >= 1.0) return 0.0;
    return std::sqrt((1.0 - ab_prev) / (1.0 - ab_t) * (1.0 - a));
}

std::vector<int> select_steps(int entry_step, int count) {
    if (count < 1 || entry_step < 1 || count > entry_step) {
        throw Error(ErrorCode::StepOutOfRange, "cannot select " + std::to_string(count) + " steps from 1.." +
                                                   std::to_string(entry_step));
    }
    std::vector<int> steps;
    steps.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // floor(T - i*T/n) == T - ceil(i*T/n)
        const long long num = static_cast<long long>(i) * entry_step;
        const long long ceil_div = (num + count - 1) / count;
        steps.push_back(entry_step - static_cast<int>(ceil_div));
    }
    return steps;
}

LatentGrid forward_noise(const LatentGrid& x0, int t, const NoiseSchedule& sched, std::uint64_t seed,
                         LatentGrid& noise_out) {
    sched.check_step(t);
    const double ab = sched.alpha_bar(t);
    const double a = std::sqrt(ab);
    const double b = std::sqrt(1.0 - ab);
    noise_out = LatentGrid(x0.height(), x0.width(), x0.channels());
    NormalStream stream(seed);
    stream.fill(noise_out.data());
    LatentGrid out(x0.height(), x0.width(), x0.channels());
    auto src = x0.data();
    auto eps = noise_out.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = a * src[i] + b * eps[i];
    return out;
}

LatentGrid forward_noise(const LatentGrid& x0, int t, const NoiseSchedule& sched, std::uint64_t seed) {
    LatentGrid noise;
    return forward_noise(x0, t, sched, seed, noise);
}

LatentGrid reverse_step(const LatentGrid& x_t, const LatentGrid& eps_hat, int t, int t_prev,
                        const NoiseSchedule& sched, std::uint64_t seed) {
    if (!x_t.same_shape(eps_hat)) throw Error(ErrorCode::ShapeMismatch, "x_t and eps_hat shapes differ");
    const double alpha = sched.transition_alpha(t, t_prev);
    const double ab = sched.alpha_bar(t);
    const double coef = alpha >= 1.0 ? 0.0 : (1.0 - alpha) / std::sqrt(1.0 - ab);
    const double sigma = sched.transition_sigma(t, t_prev);
    LatentGrid noise;
    if (sigma != 0.0) {
        noise = LatentGrid(x_t.height(), x_t.width(), x_t.channels());
        NormalStream stream(seed);
        stream.fill(noise.data());
    }
    LatentGrid out(x_t.height(), x_t.width(), x_t.channels());
    kernels::reverse_update(x_t.data(), eps_hat.data(), alpha, coef, sigma, noise.data(), out.data());
    return out;
}

LatentGrid reverse_step(const LatentGrid& x_t, const LatentGrid& eps_hat, int t, const NoiseSchedule& sched,
                        std::uint64_t seed) {
    return reverse_step(x_t, eps_hat, t, t - 1, sched, seed);
}

}  // namespace specedit
