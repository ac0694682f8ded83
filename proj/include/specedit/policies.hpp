#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specedit/draft_verify.hpp"
#include "specedit/grid.hpp"
#include "specedit/token_set.hpp"

namespace specedit {

enum class PolicyKind { EdgeBased, ChannelVariance, DraftVerify };

struct Budget {
    enum class Mode { TopFraction, Threshold };
    Mode mode = Mode::TopFraction;
    double value = 0.1;  // p in (0, 1] or tau in [0, 1]

    static Budget top_fraction(double p) { return {Mode::TopFraction, p}; }
    static Budget threshold(double tau) { return {Mode::Threshold, tau}; }
    void validate() const;
};

struct SelectionPolicy {
    PolicyKind kind = PolicyKind::DraftVerify;
    Budget budget;
};

const char* policy_name(PolicyKind kind);

/// Number of tokens TopFraction(p) keeps on a grid of n tokens: ceil(p * n).
std::size_t top_fraction_count(double p, std::size_t n);

/// Applies a budget to a normalized score map. TopFraction ties break in row-major order;
/// Threshold keeps scores strictly above tau.
TokenSet apply_budget(const DiscrepancyMap& scores, const Budget& budget);

/// Sobel magnitude summed over channels, area-averaged to the coarse grid, min-max normalized.
DiscrepancyMap edge_score_map(const LatentGrid& z_ori);
/// Per-location population variance across channels, area-averaged and min-max normalized.
DiscrepancyMap variance_score_map(const LatentGrid& z_latent);

TokenSet edge_policy(const LatentGrid& z_ori, const Budget& budget);
TokenSet variance_policy(const LatentGrid& z_latent, const Budget& budget);
TokenSet draft_verify_policy(const DiscrepancyMap& s, const Budget& budget);

/// |A n B| / |A u B|; 1.0 when both are empty.
double policy_iou(const TokenSet& selected, const TokenSet& truth);

}  // namespace specedit
