// Serial vs OpenMP timings for the hot kernels, plus a bit-equality check.
// usage: kernel_bench [size=512] [channels=4] [reps=20]
#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <vector>

#include "specedit/kernels.hpp"
#include "specedit/rng.hpp"

using namespace specedit;
namespace k = specedit::kernels;

namespace {

double time_it(int reps, const std::function<void()>& fn) {
    fn();
    const double t0 = omp_get_wtime();
    for (int r = 0; r < reps; ++r) fn();
    return (omp_get_wtime() - t0) / reps;
}

bool same(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 512;
    const std::size_t C = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 4;
    const int reps = argc > 3 ? std::atoi(argv[3]) : 20;
    if (n == 0 || n % 4 != 0 || C == 0 || reps < 1) {
        std::fprintf(stderr, "size must be a positive multiple of 4\n");
        return 2;
    }
    const k::Shape shape{n, n, C};
    const std::size_t len = n * n * C;
    std::vector<double> x(len), y(len), mu(len);
    NormalStream rng(12345);
    rng.fill(x);
    rng.fill(y);
    rng.fill(mu);

    std::printf("grid %zux%zux%zu, %d threads, %d reps\n", n, n, C, omp_get_max_threads(), reps);
    std::printf("%-20s %12s %12s %8s %s\n", "kernel", "serial_ms", "omp_ms", "ratio", "bitwise");
    int mismatches = 0;
    auto report = [&](const char* name, std::vector<double>& a, std::vector<double>& b, const std::function<void()>& s,
                      const std::function<void()>& p) {
        const double ts = time_it(reps, s);
        const double tp = time_it(reps, p);
        const bool eq = same(a, b);
        mismatches += eq ? 0 : 1;
        std::printf("%-20s %12.3f %12.3f %8.2f %s\n", name, ts * 1e3, tp * 1e3, ts / tp, eq ? "equal" : "DIFFER");
    };

    {
        std::vector<double> a(len / 16), b(len / 16);
        report("downsample_mean/4", a, b, [&] { k::serial::downsample_mean(x, shape, 4, a); },
               [&] { k::downsample_mean(x, shape, 4, b); });
    }
    {
        const k::Shape small{n / 4, n / 4, C};
        std::vector<double> a(len), b(len);
        std::span<const double> in(x.data(), len / 16);
        report("upsample_nearest/4", a, b, [&] { k::serial::upsample_nearest(in, small, 4, a); },
               [&] { k::upsample_nearest(in, small, 4, b); });
    }
    {
        std::vector<double> a(len), b(len);
        report("smooth_binomial3", a, b, [&] { k::serial::smooth_binomial3(x, shape, a); },
               [&] { k::smooth_binomial3(x, shape, b); });
    }
    {
        std::vector<double> ax(len), ay(len), bx(len), by(len);
        report("central_gradients", ax, bx, [&] { k::serial::central_gradients(x, shape, ax, ay); },
               [&] { k::central_gradients(x, shape, bx, by); });
    }
    {
        std::vector<double> a(n * n), b(n * n);
        report("sobel_magnitude", a, b, [&] { k::serial::sobel_magnitude(x, shape, a); },
               [&] { k::sobel_magnitude(x, shape, b); });
    }
    {
        std::vector<double> a(n * n), b(n * n);
        report("squared_distance", a, b, [&] { k::serial::squared_distance(x, y, shape, a); },
               [&] { k::squared_distance(x, y, shape, b); });
    }
    {
        std::vector<double> a = x, b = x;
        report("normalize_locations", a, b, [&] { a = x; k::serial::normalize_locations(a, shape); },
               [&] { b = x; k::normalize_locations(b, shape); });
    }
    {
        std::vector<double> a(len), b(len);
        report("oracle_eps", a, b, [&] { k::serial::oracle_eps(x, mu, 0.05, 0.4, a); },
               [&] { k::oracle_eps(x, mu, 0.05, 0.4, b); });
    }
    {
        std::vector<double> a(len), b(len);
        report("reverse_update", a, b, [&] { k::serial::reverse_update(x, y, 0.97, 0.02, 0.1, mu, a); },
               [&] { k::reverse_update(x, y, 0.97, 0.02, 0.1, mu, b); });
    }
    return mismatches == 0 ? 0 : 1;
}
