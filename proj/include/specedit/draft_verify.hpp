#pragma once

#include <cstdint>
#include <vector>

#include "specedit/denoiser.hpp"
#include "specedit/grid.hpp"
#include "specedit/sampler.hpp"
#include "specedit/token_set.hpp"

namespace specedit {

/// Runtime coarse factor: expansion decisions are made on the H/4 x W/4 token grid.
inline constexpr std::size_t kCoarseFactor = 4;

enum class Normalization { MinMax, Percentile };

/// What the restored draft is compared against.
///   Restored: upsample_nearest(downsample(z_ori, s), s), so the draft's
///             resolution loss cancels and only content changes register.
///   Full:     z_ori itself.
enum class VerifyReference { Restored, Full };

struct DraftConfig {
    std::size_t s_draft = 16;
    int n_draft = 8;
    int levels = 3;
    double tau = 0.75;
    Normalization normalization = Normalization::MinMax;
    VerifyReference reference = VerifyReference::Restored;
    // Raw maps whose range is at or below this are treated as constant.
    double constant_tolerance = 1e-12;

    void validate() const;
};

/// Per-token discrepancy on the coarse grid (single channel).
struct DiscrepancyMap {
    LatentGrid grid;
    bool normalized = false;

    std::size_t height() const noexcept { return grid.height(); }
    std::size_t width() const noexcept { return grid.width(); }
    double at(std::size_t i, std::size_t j) const noexcept { return grid.at(i, j, 0); }
};

/// Level l (1-based) lives at H/2^(l-1) and carries 1 + 3C channels:
/// channel-mean intensity, C smoothed values, C horizontal and C vertical gradients.
struct FeaturePyramid {
    std::vector<LatentGrid> levels;
};

/// Features of a single grid at its native resolution, l2-normalized per location.
LatentGrid level_features(const LatentGrid& g);

FeaturePyramid extract_features(const LatentGrid& g, int levels);

/// Full low-resolution sampling run from downsample(z_ori, s_draft).
SampleResult run_draft(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                       const Denoiser& denoiser, const DraftConfig& cfg, std::uint64_t seed);

/// Unnormalized level-averaged distance on the coarse grid. The draft may be
/// at any supported downsampling of z_ori (including the same resolution).
DiscrepancyMap discrepancy_raw(const LatentGrid& draft, const LatentGrid& z_ori, const DraftConfig& cfg);

/// Min-max or percentile normalization to [0, 1]; near-constant maps become all zeros.
DiscrepancyMap normalize_map(const DiscrepancyMap& raw, Normalization mode, double constant_tolerance = 1e-12);

DiscrepancyMap discrepancy(const LatentGrid& draft, const LatentGrid& z_ori, const DraftConfig& cfg);

/// Tokens with S > tau (strict).
TokenSet select_edit_tokens(const DiscrepancyMap& s, double tau);

/// |T_edit| / (h * w).
double dissimilarity_ratio(const DiscrepancyMap& s, double tau);

}  // namespace specedit
