#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <random>

#include "specedit/draft_verify.hpp"
#include "specedit/errors.hpp"
#include "specedit/pipeline.hpp"
#include "specedit/task.hpp"
#include "test_util.hpp"

using namespace specedit;

namespace {

DiscrepancyMap random_map(std::size_t h, std::size_t w, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LatentGrid g(h, w, 1);
    for (auto& v : g.data()) v = u(rng);
    // Quantize a few values so ties at the threshold occur.
    for (std::size_t i = 0; i < g.size(); i += 7) g.data()[i] = std::round(g.data()[i] * 4.0) / 4.0;
    return normalize_map({std::move(g), false}, Normalization::MinMax);
}

DiscrepancyMap map_of(std::size_t h, std::size_t w, std::vector<double> values) {
    return {LatentGrid(h, w, 1, std::move(values)), true};
}

EditCondition no_edit(const LatentGrid& base) {
    EditCondition c;
    c.base_mean = base;
    c.edit_mean = base;
    c.edit_mask.assign(base.tokens(), 1);
    c.strength = 0.0;
    return c;
}

}  // namespace

TEST_CASE("draft of an unedited point-mass model equals the downsampled base") {
    const auto base = testutil::random_grid(64, 64, 3, 1);
    EditCondition c = no_edit(base);
    c.edit_mean = testutil::random_grid(64, 64, 3, 2);
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    const GaussianOracleDenoiser d(0.0);
    DraftConfig cfg;
    const auto draft = run_draft(base, c, sched, d, cfg, 4);
    CHECK(draft.output.height() == 4);
    CHECK(max_abs_diff(draft.output, downsample(base, 16)) <= 1e-6);
    CHECK(draft.step_tokens == std::vector<std::int64_t>(8, 16));
}

TEST_CASE("draft shape at 256") {
    const auto z = testutil::random_grid(256, 256, 4, 3);
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    const GaussianOracleDenoiser d(0.05);
    const auto draft = run_draft(z, no_edit(z), sched, d, DraftConfig{}, 1);
    CHECK(draft.output.height() == 16);
    CHECK(draft.output.width() == 16);
    CHECK(draft.output.channels() == 4);
    CHECK_THROWS_AS(run_draft(testutil::random_grid(24, 24, 1, 1), no_edit(testutil::random_grid(24, 24, 1, 1)),
                              sched, d, DraftConfig{}, 1),
                    Error);
}

TEST_CASE("feature pyramid shapes and normalization") {
    const auto g = testutil::random_grid(32, 32, 3, 5);
    const auto pyr = extract_features(g, 3);
    REQUIRE(pyr.levels.size() == 3);
    CHECK(pyr.levels[0].height() == 32);
    CHECK(pyr.levels[1].height() == 16);
    CHECK(pyr.levels[2].height() == 8);
    for (const auto& level : pyr.levels) {
        CHECK(level.channels() == 10);
        for (std::size_t y = 0; y < level.height(); ++y) {
            for (std::size_t x = 0; x < level.width(); ++x) {
                double n2 = 0.0;
                for (double v : level.token(y, x)) n2 += v * v;
                CHECK(std::abs(std::sqrt(n2) - 1.0) <= 1e-10);
            }
        }
    }
    CHECK_THROWS_AS(extract_features(testutil::random_grid(12, 12, 1, 1), 4), Error);
}

TEST_CASE("constant grids have no gradient features") {
    LatentGrid g(16, 16, 2);
    for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] = (i % 2 == 0) ? 0.7 : -0.2;
    const auto pyr = extract_features(g, 3);
    for (const auto& level : pyr.levels) {
        for (std::size_t p = 0; p < level.tokens(); ++p) {
            const auto f = level.token(p / level.width(), p % level.width());
            for (std::size_t c = 3; c < 7; ++c) CHECK(f[c] == 0.0);
        }
    }
    const auto zero = extract_features(LatentGrid(8, 8, 2), 2);
    for (double v : zero.levels[1].data()) CHECK(v == 0.0);
}

TEST_CASE("identical inputs give an all-zero map") {
    const auto z = testutil::random_grid(64, 64, 4, 6);
    DraftConfig cfg;
    const auto s = discrepancy(downsample(z, 16), z, cfg);
    CHECK(s.normalized);
    CHECK(s.height() == 16);
    for (double v : s.grid.data()) CHECK(v == 0.0);
    CHECK(select_edit_tokens(s, 0.0).empty());
    CHECK(dissimilarity_ratio(s, 0.5) == 0.0);

    cfg.reference = VerifyReference::Full;
    const auto raw = discrepancy_raw(z, z, cfg);
    for (double v : raw.grid.data()) CHECK(v == 0.0);
}

TEST_CASE("a changed 4x4 block is the argmax of the map") {
    const auto z = testutil::random_grid(64, 64, 3, 7, 0.3);
    DraftConfig cfg;
    cfg.reference = VerifyReference::Full;
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t by = rng() % 61;
        const std::size_t bx = rng() % 61;
        auto draft = z;
        for (std::size_t y = by; y < by + 4; ++y) {
            for (std::size_t x = bx; x < bx + 4; ++x) {
                for (std::size_t c = 0; c < 3; ++c) draft.at(y, x, c) += (c == 0 ? 2.0 : -1.5);
            }
        }
        const auto s = discrepancy(draft, z, cfg);
        const auto it = std::max_element(s.grid.data().begin(), s.grid.data().end());
        const std::size_t idx = static_cast<std::size_t>(it - s.grid.data().begin());
        const std::size_t ti = idx / s.width();
        const std::size_t tj = idx % s.width();
        CAPTURE(by);
        CAPTURE(bx);
        CHECK(ti >= by / 4);
        CHECK(ti <= (by + 3) / 4);
        CHECK(tj >= bx / 4);
        CHECK(tj <= (bx + 3) / 4);
    }
}

TEST_CASE("the map is symmetric in its arguments") {
    DraftConfig cfg;
    cfg.reference = VerifyReference::Full;
    for (int i = 0; i < 10; ++i) {
        const auto a = testutil::random_grid(32, 32, 2, 100 + i);
        const auto b = testutil::random_grid(32, 32, 2, 200 + i);
        const auto ab = discrepancy_raw(a, b, cfg);
        const auto ba = discrepancy_raw(b, a, cfg);
        CHECK(max_abs_diff(ab.grid, ba.grid) <= 1e-12);
    }
}

TEST_CASE("threshold boundaries") {
    const auto s = map_of(2, 2, {0.0, 0.25, 0.75, 1.0});
    CHECK(select_edit_tokens(s, 1.0).empty());
    CHECK(select_edit_tokens(s, 0.75).size() == 1);
    const auto all_pos = select_edit_tokens(s, 0.0);
    CHECK(all_pos.size() == 3);
    CHECK_FALSE(all_pos.contains(0, 0));
    CHECK(all_pos.provenance({1, 1}) == Provenance::Edit);
}

TEST_CASE("selection is antitone in tau") {
    for (int i = 0; i < 100; ++i) {
        const auto s = random_map(16, 16, 1000 + i);
        const double taus[] = {0.0, 0.1, 0.25, 0.4, 0.5, 0.75, 0.9, 1.0};
        for (std::size_t a = 0; a + 1 < std::size(taus); ++a) {
            CHECK(select_edit_tokens(s, taus[a + 1]).is_subset_of(select_edit_tokens(s, taus[a])));
        }
    }
}

TEST_CASE("dissimilarity ratio counts tokens") {
    std::vector<double> v(256, 0.1);
    v[37] = 0.9;
    const auto s = map_of(16, 16, v);
    CHECK(dissimilarity_ratio(s, 0.75) == 1.0 / 256.0);
    CHECK(dissimilarity_ratio(map_of(4, 4, std::vector<double>(16, 0.0)), 0.3) == 0.0);
}

TEST_CASE("unnormalized maps are refused") {
    DiscrepancyMap raw{LatentGrid(2, 2, 1), false};
    try {
        select_edit_tokens(raw, 0.5);
        FAIL("expected UnnormalizedMap");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnnormalizedMap);
    }
}

TEST_CASE("normalization is idempotent and bounded") {
    for (int i = 0; i < 20; ++i) {
        const auto s = random_map(8, 8, 50 + i);
        const auto again = normalize_map({s.grid, false}, Normalization::MinMax);
        CHECK(max_abs_diff(s.grid, again.grid) <= 1e-12);
        for (double v : s.grid.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        const auto pct = normalize_map({s.grid, false}, Normalization::Percentile);
        CHECK(*std::max_element(pct.grid.data().begin(), pct.grid.data().end()) <= 1.0);
        CHECK(*std::min_element(pct.grid.data().begin(), pct.grid.data().end()) == 0.0);
    }
    LatentGrid flat(3, 3, 1);
    for (auto& v : flat.data()) v = 4.2;
    flat.data()[4] = 4.2 + 1e-13;
    const auto z = normalize_map({flat, false}, Normalization::MinMax);
    CHECK(z.normalized);
    for (double v : z.grid.data()) CHECK(v == 0.0);
}

TEST_CASE("a local perturbation only moves nearby tokens") {
    DraftConfig cfg;
    cfg.levels = 3;
    cfg.reference = VerifyReference::Full;
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto z = testutil::random_grid(64, 64, 2, 300 + trial);
        const auto draft = testutil::random_grid(trial % 2 == 0 ? 64 : 4, trial % 2 == 0 ? 64 : 4, 2, 400 + trial);
        const std::size_t ti = rng() % 16;
        const std::size_t tj = rng() % 16;
        auto z2 = z;
        for (std::size_t y = 4 * ti; y < 4 * ti + 4; ++y) {
            for (std::size_t x = 4 * tj; x < 4 * tj + 4; ++x) z2.at(y, x, rng() % 2) += 3.0;
        }
        const auto before = discrepancy_raw(draft, z, cfg);
        const auto after = discrepancy_raw(draft, z2, cfg);
        bool moved_self = false;
        for (std::size_t i = 0; i < 16; ++i) {
            for (std::size_t j = 0; j < 16; ++j) {
                const bool changed = before.at(i, j) != after.at(i, j);
                const std::size_t dist = std::max(i > ti ? i - ti : ti - i, j > tj ? j - tj : tj - j);
                if (dist > 1) CHECK_FALSE(changed);
                if (dist == 0) moved_self = changed;
            }
        }
        CHECK(moved_self);
    }
}

TEST_CASE("shape errors") {
    DraftConfig cfg;
    const auto z = testutil::random_grid(64, 64, 2, 1);
    try {
        discrepancy(testutil::random_grid(4, 4, 3, 1), z, cfg);
        FAIL("expected ShapeMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ShapeMismatch);
    }
    CHECK_THROWS_AS(discrepancy(testutil::random_grid(5, 4, 2, 1), z, cfg), Error);
    cfg.tau = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("dissimilarity ratio tracks the edited fraction") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    DraftConfig cfg;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        TaskParams p;
        p.seed = 5000 + i;
        p.mask = i % 2 == 0 ? MaskShape::Rect : MaskShape::Disk;
        p.mask_fraction = 0.05 + 0.15 * (i % 4) / 3.0;
        const auto task = generate_task(p);
        const GaussianOracleDenoiser d(p.prior_var);
        const auto v = verify_stage(task.z_ori, task.condition, sched, d, cfg, derive_seed(p.seed, 1));
        const double ratio = dissimilarity_ratio(v.map, cfg.tau);
        worst = std::max(worst, std::abs(ratio - task.fine_fraction));
    }
    CHECK(worst <= 0.15);
}

TEST_CASE("an unedited point-mass task selects nothing at any tau") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    for (int i = 0; i < 10; ++i) {
        TaskParams p;
        p.seed = 900 + i;
        p.height = 64;
        p.width = 64;
        p.strength = 0.0;
        p.prior_var = 0.0;
        const auto task = generate_task(p);
        const GaussianOracleDenoiser d(0.0);
        DraftConfig cfg;
        cfg.tau = 1e-9;
        CHECK(verify_stage(task.z_ori, task.condition, sched, d, cfg, 77 + i).t_edit.empty());
    }
}
