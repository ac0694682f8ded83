#include "specedit/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specedit/errors.hpp"
#include "specedit/kernels.hpp"

namespace specedit {
namespace {

void check_coarse_divisible(const LatentGrid& g) {
    if (g.height() % kCoarseFactor != 0 || g.width() % kCoarseFactor != 0) {
        throw Error(ErrorCode::NonDivisibleShape, "policy input not divisible by " + std::to_string(kCoarseFactor));
    }
}

DiscrepancyMap coarse_normalized(const LatentGrid& fine_scores) {
    DiscrepancyMap raw{downsample(fine_scores, kCoarseFactor), false};
    return normalize_map(raw, Normalization::MinMax, 0.0);
}

}  // namespace

void Budget::validate() const {
    if (mode == Mode::TopFraction && !(value > 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "TopFraction p must lie in (0, 1]");
    }
    if (mode == Mode::Threshold && !(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Threshold tau must lie in [0, 1]");
    }
}

const char* policy_name(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::EdgeBased: return "edge";
        case PolicyKind::ChannelVariance: return "variance";
        case PolicyKind::DraftVerify: return "draft-verify";
    }
    return "unknown";
}

std::size_t top_fraction_count(double p, std::size_t n) {
    // The small slack keeps products like 0.1 * 30 from rounding up past 3.
    const double raw = p * static_cast<double>(n);
    const auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    return std::min(count, n);
}

TokenSet apply_budget(const DiscrepancyMap& scores, const Budget& budget) {
    budget.validate();
    if (budget.mode == Budget::Mode::Threshold) return select_edit_tokens(scores, budget.value);
    const auto values = scores.grid.data();
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    std::vector<Provenance> flags(values.size(), Provenance::None);
    const std::size_t keep = top_fraction_count(budget.value, values.size());
    for (std::size_t i = 0; i < keep; ++i) flags[order[i]] = Provenance::Edit;
    return TokenSet(scores.height(), scores.width(), std::move(flags));
}

DiscrepancyMap edge_score_map(const LatentGrid& z_ori) {
    check_coarse_divisible(z_ori);
    LatentGrid mag(z_ori.height(), z_ori.width(), 1);
    kernels::sobel_magnitude(z_ori.data(), {z_ori.height(), z_ori.width(), z_ori.channels()}, mag.data());
    return coarse_normalized(mag);
}

DiscrepancyMap variance_score_map(const LatentGrid& z_latent) {
    if (z_latent.channels() < 2) {
        throw Error(ErrorCode::ChannelCountTooSmall, "channel variance needs at least 2 channels");
    }
    check_coarse_divisible(z_latent);
    const std::size_t C = z_latent.channels();
    LatentGrid var(z_latent.height(), z_latent.width(), 1);
    for (std::size_t p = 0; p < z_latent.tokens(); ++p) {
        // Welford
        double mean = 0.0;
        double m2 = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            const double x = z_latent.data()[p * C + c];
            const double delta = x - mean;
            mean += delta / static_cast<double>(c + 1);
            m2 += delta * (x - mean);
        }
        var.data()[p] = m2 / static_cast<double>(C);
    }
    return coarse_normalized(var);
}

TokenSet edge_policy(const LatentGrid& z_ori, const Budget& budget) {
    return apply_budget(edge_score_map(z_ori), budget);
}

TokenSet variance_policy(const LatentGrid& z_latent, const Budget& budget) {
    return apply_budget(variance_score_map(z_latent), budget);
}

TokenSet draft_verify_policy(const DiscrepancyMap& s, const Budget& budget) {
    if (!s.normalized) throw Error(ErrorCode::UnnormalizedMap, "draft-verify policy needs a normalized map");
    return apply_budget(s, budget);
}

double policy_iou(const TokenSet& selected, const TokenSet& truth) {
    if (!selected.same_grid(truth)) throw Error(ErrorCode::GridMismatch, "IoU on different grids");
    std::size_t inter = 0;
    for (const auto& t : selected.coords()) inter += truth.contains(t) ? 1 : 0;
    const std::size_t uni = selected.size() + truth.size() - inter;
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace specedit
