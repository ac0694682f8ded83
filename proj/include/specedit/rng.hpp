#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace specedit {

/// Mixes a parent seed with stream labels into an independent child seed (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// Seeded standard-normal stream. Owned by value; never shared between threads.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next() { return dist_(engine_); }
    void fill(std::span<double> out) {
        for (auto& v : out) v = dist_(engine_);
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace specedit
