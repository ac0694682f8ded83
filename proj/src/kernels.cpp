#include "specedit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace specedit::kernels {
namespace {

using Index = std::int64_t;

inline std::size_t clamp_index(Index i, std::size_t n) {
    if (i < 0) return 0;
    if (i >= static_cast<Index>(n)) return n - 1;
    return static_cast<std::size_t>(i);
}

// Row-level bodies shared by the serial and OpenMP drivers so both paths
// execute the same floating-point operations in the same order.

void downsample_row(std::span<const double> in, Shape sh, std::size_t s, std::span<double> out, std::size_t orow) {
    const std::size_t ow = sh.width / s;
    const std::size_t C = sh.channels;
    const double inv = 1.0 / static_cast<double>(s * s);
    for (std::size_t ocol = 0; ocol < ow; ++ocol) {
        double* dst = out.data() + (orow * ow + ocol) * C;
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (std::size_t dy = 0; dy < s; ++dy) {
                const std::size_t r = orow * s + dy;
                for (std::size_t dx = 0; dx < s; ++dx) {
                    acc += in[(r * sh.width + ocol * s + dx) * C + c];
                }
            }
            dst[c] = acc * inv;
        }
    }
}

void upsample_row(std::span<const double> in, Shape sh, std::size_t s, std::span<double> out, std::size_t orow) {
    const std::size_t ow = sh.width * s;
    const std::size_t C = sh.channels;
    const std::size_t irow = orow / s;
    for (std::size_t ocol = 0; ocol < ow; ++ocol) {
        const double* src = in.data() + (irow * sh.width + ocol / s) * C;
        std::copy(src, src + C, out.data() + (orow * ow + ocol) * C);
    }
}

void smooth_row(std::span<const double> in, Shape sh, std::span<double> out, std::size_t row) {
    static constexpr double w[3] = {1.0, 2.0, 1.0};
    const std::size_t C = sh.channels;
    for (std::size_t col = 0; col < sh.width; ++col) {
        for (std::size_t c = 0; c < C; ++c) {
            double acc = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const std::size_t r = clamp_index(static_cast<Index>(row) + dy, sh.height);
                for (int dx = -1; dx <= 1; ++dx) {
                    const std::size_t q = clamp_index(static_cast<Index>(col) + dx, sh.width);
                    acc += w[dy + 1] * w[dx + 1] * in[(r * sh.width + q) * C + c];
                }
            }
            out[(row * sh.width + col) * C + c] = acc / 16.0;
        }
    }
}

void gradient_row(std::span<const double> in, Shape sh, std::span<double> gx, std::span<double> gy, std::size_t row) {
    const std::size_t C = sh.channels;
    const std::size_t up = clamp_index(static_cast<Index>(row) - 1, sh.height);
    const std::size_t down = clamp_index(static_cast<Index>(row) + 1, sh.height);
    for (std::size_t col = 0; col < sh.width; ++col) {
        const std::size_t left = clamp_index(static_cast<Index>(col) - 1, sh.width);
        const std::size_t right = clamp_index(static_cast<Index>(col) + 1, sh.width);
        for (std::size_t c = 0; c < C; ++c) {
            const std::size_t i = (row * sh.width + col) * C + c;
            gx[i] = 0.5 * (in[(row * sh.width + right) * C + c] - in[(row * sh.width + left) * C + c]);
            gy[i] = 0.5 * (in[(down * sh.width + col) * C + c] - in[(up * sh.width + col) * C + c]);
        }
    }
}

void sobel_row(std::span<const double> in, Shape sh, std::span<double> out, std::size_t row) {
    static constexpr double kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    static constexpr double ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    const std::size_t C = sh.channels;
    for (std::size_t col = 0; col < sh.width; ++col) {
        double total = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            double gx = 0.0;
            double gy = 0.0;
            for (int dy = -1; dy <= 1; ++dy) {
                const std::size_t r = clamp_index(static_cast<Index>(row) + dy, sh.height);
                for (int dx = -1; dx <= 1; ++dx) {
                    const std::size_t q = clamp_index(static_cast<Index>(col) + dx, sh.width);
                    const double v = in[(r * sh.width + q) * C + c];
                    gx += kx[dy + 1][dx + 1] * v;
                    gy += ky[dy + 1][dx + 1] * v;
                }
            }
            total += std::sqrt(gx * gx + gy * gy);
        }
        out[row * sh.width + col] = total;
    }
}

void sqdist_row(std::span<const double> a, std::span<const double> b, Shape sh, std::span<double> out,
                std::size_t row) {
    const std::size_t C = sh.channels;
    for (std::size_t col = 0; col < sh.width; ++col) {
        const std::size_t base = (row * sh.width + col) * C;
        double acc = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            const double d = a[base + c] - b[base + c];
            acc += d * d;
        }
        out[row * sh.width + col] = acc;
    }
}

void normalize_row(std::span<double> data, Shape sh, std::size_t row) {
    const std::size_t C = sh.channels;
    for (std::size_t col = 0; col < sh.width; ++col) {
        double* v = data.data() + (row * sh.width + col) * C;
        double norm2 = 0.0;
        for (std::size_t c = 0; c < C; ++c) norm2 += v[c] * v[c];
        if (norm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t c = 0; c < C; ++c) v[c] *= inv;
    }
}

struct OracleCoefficients {
    double gain_x;
    double gain_mu;
    double sqrt_ab;
    double inv_sqrt_one_minus_ab;
};

OracleCoefficients oracle_coefficients(double prior_var, double alpha_bar) {
    const double sqrt_ab = std::sqrt(alpha_bar);
    const double denom = alpha_bar * prior_var + (1.0 - alpha_bar);
    return {sqrt_ab * prior_var / denom, (1.0 - alpha_bar) / denom, sqrt_ab, 1.0 / std::sqrt(1.0 - alpha_bar)};
}

inline double oracle_eps_one(double x, double mu, const OracleCoefficients& k) {
    const double mean = k.gain_x * x + k.gain_mu * mu;
    return (x - k.sqrt_ab * mean) * k.inv_sqrt_one_minus_ab;
}

inline double reverse_one(double x, double eps, double inv_sqrt_alpha, double coef) {
    return (x - coef * eps) * inv_sqrt_alpha;
}

}  // namespace

double posterior_mean(double x, double mu, double prior_var, double alpha_bar, double noise_scale) {
    const double sqrt_ab = std::sqrt(alpha_bar);
    const double noise_var = (1.0 - alpha_bar) * noise_scale;
    return (sqrt_ab * prior_var * x + noise_var * mu) / (alpha_bar * prior_var + noise_var);
}

namespace serial {

void downsample_mean(std::span<const double> in, Shape sh, std::size_t s, std::span<double> out) {
    for (std::size_t r = 0; r < sh.height / s; ++r) downsample_row(in, sh, s, out, r);
}

void upsample_nearest(std::span<const double> in, Shape sh, std::size_t s, std::span<double> out) {
    for (std::size_t r = 0; r < sh.height * s; ++r) upsample_row(in, sh, s, out, r);
}

void smooth_binomial3(std::span<const double> in, Shape sh, std::span<double> out) {
    for (std::size_t r = 0; r < sh.height; ++r) smooth_row(in, sh, out, r);
}

void central_gradients(std::span<const double> in, Shape sh, std::span<double> gx, std::span<double> gy) {
    for (std::size_t r = 0; r < sh.height; ++r) gradient_row(in, sh, gx, gy, r);
}

void sobel_magnitude(std::span<const double> in, Shape sh, std::span<double> out) {
    for (std::size_t r = 0; r < sh.height; ++r) sobel_row(in, sh, out, r);
}

void squared_distance(std::span<const double> a, std::span<const double> b, Shape sh, std::span<double> out) {
    for (std::size_t r = 0; r < sh.height; ++r) sqdist_row(a, b, sh, out, r);
}

void normalize_locations(std::span<double> data, Shape sh) {
    for (std::size_t r = 0; r < sh.height; ++r) normalize_row(data, sh, r);
}

void oracle_eps(std::span<const double> x, std::span<const double> mu, double prior_var, double alpha_bar,
                std::span<double> eps) {
    const auto k = oracle_coefficients(prior_var, alpha_bar);
    for (std::size_t i = 0; i < x.size(); ++i) eps[i] = oracle_eps_one(x[i], mu[i], k);
}

void reverse_update(std::span<const double> x, std::span<const double> eps, double alpha, double coef,
                    double sigma, std::span<const double> noise, std::span<double> out) {
    const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = reverse_one(x[i], eps[i], inv_sqrt_alpha, coef);
        if (sigma != 0.0) out[i] += sigma * noise[i];
    }
}

}  // namespace serial

void downsample_mean(std::span<const double> in, Shape sh, std::size_t s, std::span<double> out) {
    const Index rows = static_cast<Index>(sh.height / s);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) downsample_row(in, sh, s, out, static_cast<std::size_t>(r));
}

void upsample_nearest(std::span<const double> in, Shape sh, std::size_t s, std::span<double> out) {
    const Index rows = static_cast<Index>(sh.height * s);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) upsample_row(in, sh, s, out, static_cast<std::size_t>(r));
}

void smooth_binomial3(std::span<const double> in, Shape sh, std::span<double> out) {
    const Index rows = static_cast<Index>(sh.height);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) smooth_row(in, sh, out, static_cast<std::size_t>(r));
}

void central_gradients(std::span<const double> in, Shape sh, std::span<double> gx, std::span<double> gy) {
    const Index rows = static_cast<Index>(sh.height);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) gradient_row(in, sh, gx, gy, static_cast<std::size_t>(r));
}

void sobel_magnitude(std::span<const double> in, Shape sh, std::span<double> out) {
    const Index rows = static_cast<Index>(sh.height);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) sobel_row(in, sh, out, static_cast<std::size_t>(r));
}

void squared_distance(std::span<const double> a, std::span<const double> b, Shape sh, std::span<double> out) {
    const Index rows = static_cast<Index>(sh.height);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) sqdist_row(a, b, sh, out, static_cast<std::size_t>(r));
}

void normalize_locations(std::span<double> data, Shape sh) {
    const Index rows = static_cast<Index>(sh.height);
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) normalize_row(data, sh, static_cast<std::size_t>(r));
}

void oracle_eps(std::span<const double> x, std::span<const double> mu, double prior_var, double alpha_bar,
                std::span<double> eps) {
    const auto k = oracle_coefficients(prior_var, alpha_bar);
    const Index n = static_cast<Index>(x.size());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) eps[i] = oracle_eps_one(x[i], mu[i], k);
}

void reverse_update(std::span<const double> x, std::span<const double> eps, double alpha, double coef,
                    double sigma, std::span<const double> noise, std::span<double> out) {
    const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
    const Index n = static_cast<Index>(x.size());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i) {
        out[i] = reverse_one(x[i], eps[i], inv_sqrt_alpha, coef);
        if (sigma != 0.0) out[i] += sigma * noise[i];
    }
}

}  // namespace specedit::kernels
