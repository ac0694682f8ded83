#pragma once

// Data-parallel inner loops. Every kernel in `specedit::kernels` has a
// single-threaded twin in `specedit::kernels::serial` that is kept as the
// reference for tests and the kernel benchmark. Both produce bit-identical
// results: outputs are written per element and no cross-thread reductions
// are performed.

#include <cstddef>
#include <span>

namespace specedit::kernels {

struct Shape {
    std::size_t height;
    std::size_t width;
    std::size_t channels;
};

/// out has shape (H/s, W/s, C).
void downsample_mean(std::span<const double> in, Shape shape, std::size_t s, std::span<double> out);

/// out has shape (H*s, W*s, C).
void upsample_nearest(std::span<const double> in, Shape shape, std::size_t s, std::span<double> out);

/// [1,2,1] x [1,2,1] / 16 smoothing with clamped borders, per channel.
void smooth_binomial3(std::span<const double> in, Shape shape, std::span<double> out);

/// Central differences with clamped borders: gx = (f(x+1) - f(x-1)) / 2.
void central_gradients(std::span<const double> in, Shape shape, std::span<double> gx, std::span<double> gy);

/// Sobel magnitude sqrt(gx^2 + gy^2) summed over channels; out is H x W.
void sobel_magnitude(std::span<const double> in, Shape shape, std::span<double> out);

/// Sum over channels of (a - b)^2 per location; out is H x W.
void squared_distance(std::span<const double> a, std::span<const double> b, Shape shape, std::span<double> out);

/// Normalize each location's feature vector to unit l2 norm; zero vectors stay zero.
void normalize_locations(std::span<double> data, Shape shape);

/// Bayes-optimal noise prediction for x0 ~ N(mu, prior_var), elementwise.
void oracle_eps(std::span<const double> x, std::span<const double> mu, double prior_var, double alpha_bar,
                std::span<double> eps);

/// x_prev = (x - coef * eps) / sqrt(alpha) + sigma * noise; noise may be empty when sigma == 0.
void reverse_update(std::span<const double> x, std::span<const double> eps, double alpha, double coef,
                    double sigma, std::span<const double> noise, std::span<double> out);

namespace serial {

void downsample_mean(std::span<const double> in, Shape shape, std::size_t s, std::span<double> out);
void upsample_nearest(std::span<const double> in, Shape shape, std::size_t s, std::span<double> out);
void smooth_binomial3(std::span<const double> in, Shape shape, std::span<double> out);
void central_gradients(std::span<const double> in, Shape shape, std::span<double> gx, std::span<double> gy);
void sobel_magnitude(std::span<const double> in, Shape shape, std::span<double> out);
void squared_distance(std::span<const double> a, std::span<const double> b, Shape shape, std::span<double> out);
void normalize_locations(std::span<double> data, Shape shape);
void oracle_eps(std::span<const double> x, std::span<const double> mu, double prior_var, double alpha_bar,
                std::span<double> eps);
void reverse_update(std::span<const double> x, std::span<const double> eps, double alpha, double coef,
                    double sigma, std::span<const double> noise, std::span<double> out);

}  // namespace serial

/// Posterior mean E[x0 | x_t] for a Gaussian prior with the given noise variance scale.
double posterior_mean(double x, double mu, double prior_var, double alpha_bar, double noise_scale = 1.0);

}  // namespace specedit::kernels
