#include "specedit/draft_verify.hpp"

#include <algorithm>
#include <numeric>

#include "specedit/errors.hpp"
#include "specedit/kernels.hpp"

namespace specedit {

void DraftConfig::validate() const {
    if (s_draft != 8 && s_draft != 16 && s_draft != 32) {
        throw Error(ErrorCode::InvalidArgument, "s_draft must be 8, 16 or 32");
    }
    if (n_draft < 1) throw Error(ErrorCode::InvalidArgument, "n_draft must be positive");
    if (levels < 1 || levels > 6) throw Error(ErrorCode::InvalidArgument, "levels must lie in 1..6");
    if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::InvalidArgument, "tau must lie in [0, 1]");
    if (!(constant_tolerance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "constant_tolerance < 0");
}

LatentGrid level_features(const LatentGrid& g) {
    const std::size_t H = g.height();
    const std::size_t W = g.width();
    const std::size_t C = g.channels();
    const kernels::Shape shape{H, W, C};

    std::vector<double> smooth(g.size());
    std::vector<double> gx(g.size());
    std::vector<double> gy(g.size());
    kernels::smooth_binomial3(g.data(), shape, smooth);
    kernels::central_gradients(g.data(), shape, gx, gy);

    const std::size_t F = 1 + 3 * C;
    LatentGrid feat(H, W, F);
    auto out = feat.data();
    for (std::size_t p = 0; p < H * W; ++p) {
        double* f = out.data() + p * F;
        const double* src = g.data().data() + p * C;
        double intensity = 0.0;
        for (std::size_t c = 0; c < C; ++c) intensity += src[c];
        f[0] = intensity / static_cast<double>(C);
        for (std::size_t c = 0; c < C; ++c) {
            f[1 + c] = smooth[p * C + c];
            f[1 + C + c] = gx[p * C + c];
            f[1 + 2 * C + c] = gy[p * C + c];
        }
    }
    kernels::normalize_locations(out, {H, W, F});
    return feat;
}

FeaturePyramid extract_features(const LatentGrid& g, int levels) {
    if (levels < 1) throw Error(ErrorCode::InvalidArgument, "levels must be positive");
    const std::size_t top = std::size_t{1} << (levels - 1);
    if (g.height() % top != 0 || g.width() % top != 0) {
        throw Error(ErrorCode::NonDivisibleShape, "grid not divisible by 2^(L-1) = " + std::to_string(top));
    }
    FeaturePyramid pyr;
    pyr.levels.reserve(static_cast<std::size_t>(levels));
    for (int l = 0; l < levels; ++l) {
        pyr.levels.push_back(level_features(downsample(g, std::size_t{1} << l)));
    }
    return pyr;
}

SampleResult run_draft(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                       const Denoiser& denoiser, const DraftConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    return sample(downsample(z_ori, cfg.s_draft), c, sched, denoiser, cfg.n_draft, seed);
}

DiscrepancyMap discrepancy_raw(const LatentGrid& draft, const LatentGrid& z_ori, const DraftConfig& cfg) {
    if (draft.channels() != z_ori.channels() || draft.height() == 0 || z_ori.height() % draft.height() != 0 ||
        z_ori.width() % draft.width() != 0 || z_ori.height() / draft.height() != z_ori.width() / draft.width()) {
        throw Error(ErrorCode::ShapeMismatch, "draft is not a uniform downsampling of z_ori");
    }
    const std::size_t s = z_ori.height() / draft.height();
    if (!is_valid_scale(s)) throw Error(ErrorCode::ShapeMismatch, "unsupported draft factor " + std::to_string(s));
    const std::size_t top = std::max<std::size_t>(kCoarseFactor, std::size_t{1} << (cfg.levels - 1));
    if (z_ori.height() % top != 0 || z_ori.width() % top != 0) {
        throw Error(ErrorCode::NonDivisibleShape, "z_ori not divisible by " + std::to_string(top));
    }

    const LatentGrid restored = upsample_nearest(draft, s);
    const LatentGrid reference =
        cfg.reference == VerifyReference::Restored ? upsample_nearest(downsample(z_ori, s), s) : z_ori;
    const auto pa = extract_features(restored, cfg.levels);
    const auto pb = extract_features(reference, cfg.levels);

    const std::size_t ch = z_ori.height() / kCoarseFactor;
    const std::size_t cw = z_ori.width() / kCoarseFactor;
    LatentGrid acc(ch, cw, 1);
    for (int l = 0; l < cfg.levels; ++l) {
        const auto& fa = pa.levels[static_cast<std::size_t>(l)];
        LatentGrid dist(fa.height(), fa.width(), 1);
        kernels::squared_distance(fa.data(), pb.levels[static_cast<std::size_t>(l)].data(),
                                  {fa.height(), fa.width(), fa.channels()}, dist.data());
        const std::size_t level_scale = std::size_t{1} << l;
        const LatentGrid on_coarse = level_scale <= kCoarseFactor ? downsample(dist, kCoarseFactor / level_scale)
                                                                  : upsample_nearest(dist, level_scale / kCoarseFactor);
        for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += on_coarse.data()[i];
    }
    for (auto& v : acc.data()) v /= static_cast<double>(cfg.levels);
    return {std::move(acc), false};
}

DiscrepancyMap normalize_map(const DiscrepancyMap& raw, Normalization mode, double constant_tolerance) {
    const auto values = raw.grid.data();
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    LatentGrid out(raw.grid.height(), raw.grid.width(), 1);
    if (hi - lo <= constant_tolerance) return {std::move(out), true};

    auto dst = out.data();
    if (mode == Normalization::MinMax) {
        const double range = hi - lo;
        for (std::size_t i = 0; i < values.size(); ++i) dst[i] = (values[i] - lo) / range;
        return {std::move(out), true};
    }
    // Percentile: fraction of the other tokens that are strictly smaller.
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double denom = static_cast<double>(sorted.size() - 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto below = std::lower_bound(sorted.begin(), sorted.end(), values[i]) - sorted.begin();
        dst[i] = static_cast<double>(below) / denom;
    }
    return {std::move(out), true};
}

DiscrepancyMap discrepancy(const LatentGrid& draft, const LatentGrid& z_ori, const DraftConfig& cfg) {
    return normalize_map(discrepancy_raw(draft, z_ori, cfg), cfg.normalization, cfg.constant_tolerance);
}

TokenSet select_edit_tokens(const DiscrepancyMap& s, double tau) {
    if (!s.normalized) throw Error(ErrorCode::UnnormalizedMap, "select_edit_tokens needs a normalized map");
    std::vector<Provenance> flags(s.grid.tokens(), Provenance::None);
    const auto values = s.grid.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > tau) flags[i] = Provenance::Edit;
    }
    return TokenSet(s.height(), s.width(), std::move(flags));
}

double dissimilarity_ratio(const DiscrepancyMap& s, double tau) {
    return static_cast<double>(select_edit_tokens(s, tau).size()) / static_cast<double>(s.grid.tokens());
}

}  // namespace specedit
