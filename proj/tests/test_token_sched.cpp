#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "specedit/bench.hpp"
#include "specedit/errors.hpp"
#include "specedit/pipeline.hpp"
#include "specedit/token_sched.hpp"
#include "test_util.hpp"

using namespace specedit;

namespace {

TokenSet random_set(std::size_t h, std::size_t w, double p, std::mt19937_64& rng, Provenance tag) {
    std::bernoulli_distribution pick(p);
    std::vector<TokenIndex> coords;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            if (pick(rng)) coords.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
    }
    return TokenSet::from_coords(h, w, coords, tag);
}

EditCondition condition_for(std::size_t n, std::size_t c, std::uint64_t seed) {
    EditCondition cond;
    cond.base_mean = testutil::random_grid(n, n, c, seed);
    cond.edit_mean = testutil::random_grid(n, n, c, seed + 1);
    cond.edit_mask.assign(n * n, 0);
    for (std::size_t y = 0; y < n / 3; ++y) {
        for (std::size_t x = n / 2; x < n; ++x) cond.edit_mask[y * n + x] = 1;
    }
    return cond;
}

}  // namespace

TEST_CASE("uniform coverage") {
    const auto u = uniform_coverage(6, 6, 3);
    CHECK(u.coords() == std::vector<TokenIndex>{{0, 0}, {0, 3}, {3, 0}, {3, 3}});
    CHECK(u.provenance({3, 3}) == Provenance::Uniform);
    CHECK(uniform_coverage(5, 7, 1).size() == 35);
    CHECK_THROWS_AS(uniform_coverage(4, 4, 0), Error);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const std::size_t h = 1 + rng() % 70;
        const std::size_t w = 1 + rng() % 70;
        const std::size_t k = 1 + rng() % 9;
        CHECK(uniform_coverage(h, w, k).size() == ((h + k - 1) / k) * ((w + k - 1) / k));
    }
}

TEST_CASE("expand set is a tagged union") {
    const TokenSet none(6, 6);
    const auto u = uniform_coverage(6, 6, 3);
    CHECK(build_expand_set(none, u) == u);

    const auto a = TokenSet::from_coords(6, 6, {{0, 1}, {1, 1}, {2, 2}, {4, 5}, {5, 5}});
    const auto b = TokenSet::from_coords(6, 6, {{0, 0}, {0, 3}, {3, 0}, {3, 3}}, Provenance::Uniform);
    CHECK(build_expand_set(a, b).size() == 9);

    const auto both = build_expand_set(TokenSet::from_coords(6, 6, {{0, 0}, {1, 2}}), u);
    CHECK(both.provenance({0, 0}) == Provenance::Both);
    CHECK(both.provenance({1, 2}) == Provenance::Edit);
    CHECK(both.provenance({3, 0}) == Provenance::Uniform);
    CHECK_THROWS_AS(build_expand_set(TokenSet(4, 4), u), Error);

    std::mt19937_64 rng(2);
    for (int i = 0; i < 100; ++i) {
        const auto x = random_set(12, 9, 0.3, rng, Provenance::Edit);
        const auto y = random_set(12, 9, 0.2, rng, Provenance::Uniform);
        std::size_t inter = 0;
        for (const auto& t : x.coords()) inter += y.contains(t) ? 1 : 0;
        const auto un = build_expand_set(x, y);
        CHECK(un.size() == x.size() + y.size() - inter);
        CHECK(x.is_subset_of(un));
        CHECK(y.is_subset_of(un));
    }
}

TEST_CASE("token set construction") {
    const auto t = TokenSet::from_coords(3, 3, {{2, 1}, {0, 2}, {2, 1}});
    CHECK(t.size() == 2);
    CHECK(t.coords() == std::vector<TokenIndex>{{0, 2}, {2, 1}});
    CHECK(t.mask() == std::vector<std::uint8_t>{0, 0, 1, 0, 0, 0, 0, 1, 0});
    CHECK(TokenSet::from_mask(3, 3, t.mask()) == t);
    CHECK(TokenSet::all(2, 3).size() == 6);
    CHECK_THROWS_AS(TokenSet::from_coords(3, 3, {{3, 0}}), Error);
}

TEST_CASE("expanding without perturbation replicates the token") {
    const auto patch = expand_token(std::vector<double>{1.0}, {0.0, 5});
    CHECK(patch == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    double energy = 0.0;
    for (double v : patch) energy += v * v;
    CHECK(energy == 4.0);
}

TEST_CASE("expansion keeps the mean and the energy identity") {
    NormalStream rng(3);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t C = 1 + i % 6;
        std::vector<double> tok(C);
        for (auto& v : tok) v = 2.0 * rng.next();
        const double sigma = (i % 5) * 0.1;
        const std::uint64_t seed = 1000 + i;
        const auto patch = expand_token(tok, {sigma, seed});
        NormalStream draws(seed);
        double d2 = 0.0;
        for (std::size_t k = 0; k < 3 * C; ++k) {
            const double d = draws.next();
            d2 += d * d;
        }
        double fine = 0.0;
        double coarse = 0.0;
        for (std::size_t c = 0; c < C; ++c) {
            const double mean = (patch[c] + patch[C + c] + patch[2 * C + c] + patch[3 * C + c]) / 4.0;
            CHECK(std::abs(mean - tok[c]) <= 1e-12);
            coarse += tok[c] * tok[c];
        }
        for (double v : patch) fine += v * v;
        CHECK(std::abs(fine - (4.0 * coarse + sigma * sigma * d2)) <= 1e-12 * (1.0 + fine));
        if (sigma == 0.0 && coarse > 0.0) CHECK(std::abs(fine / coarse - 4.0) <= 1e-12);
    }
    CHECK_THROWS_AS(expand_token(std::vector<double>{1.0}, {-0.1, 1}), Error);
}

TEST_CASE("a token's perturbation does not depend on the rest of the set") {
    const auto g = testutil::random_grid(8, 8, 3, 4);
    const auto one = assemble_mixed(g, TokenSet::from_coords(8, 8, {{5, 2}}), {0.3, 9});
    const auto many = assemble_mixed(g, TokenSet::all(8, 8), {0.3, 9});
    const auto a = one.patch(static_cast<std::size_t>(one.slot({5, 2})));
    const auto b = many.patch(static_cast<std::size_t>(many.slot({5, 2})));
    CHECK(std::vector<double>(a.begin(), a.end()) == std::vector<double>(b.begin(), b.end()));
    CHECK(one.slot({0, 0}) == -1);
}

TEST_CASE("assemble and collapse") {
    const auto g = testutil::random_grid(6, 4, 2, 5);
    const auto empty = assemble_mixed(g, TokenSet(6, 4), {0.1, 1});
    CHECK(empty.patch_count() == 0);
    CHECK(empty.coarse() == g);
    CHECK(empty.collapse_to_fine() == upsample_nearest(g, 2));
    CHECK(empty.sequence_length() == 24);

    const auto full = assemble_mixed(g, TokenSet::all(6, 4), {0.0, 1});
    const auto fine = full.collapse_to_fine();
    CHECK(fine.height() == 12);
    CHECK(fine.width() == 8);
    CHECK(fine.channels() == 2);
    CHECK(max_abs_diff(downsample(fine, 2), g) <= 1e-12);

    const auto noisy = assemble_mixed(g, TokenSet::all(6, 4), {0.5, 2});
    CHECK(max_abs_diff(downsample(noisy.collapse_to_fine(), 2), g) <= 1e-12);
    CHECK_THROWS_AS(assemble_mixed(g, TokenSet(4, 4), {0.1, 1}), Error);
}

TEST_CASE("mixed sequence length and layout") {
    const LatentGrid g(64, 64, 1);
    std::vector<TokenIndex> coords;
    for (std::uint32_t k = 0; k < 100; ++k) coords.push_back({k / 10 * 3, k % 10 * 5});
    const auto m = assemble_mixed(g, TokenSet::from_coords(64, 64, coords), {0.0, 0});
    CHECK(m.sequence_length() == 4396);
    CHECK(m.sequence_length() == (4096 - 100) + 4 * 100);
    const auto seq = m.sequence();
    CHECK(seq.size() == 4396);
    std::size_t fine_cells = 0;
    for (const auto& s : seq) {
        if (s.footprint == 1) {
            ++fine_cells;
            CHECK(m.slot(s.source) >= 0);
            CHECK(s.row == 2.0 * s.source.row + s.sub / 2);
            CHECK(s.col == 2.0 * s.source.col + s.sub % 2);
        } else {
            CHECK(s.footprint == 2);
            CHECK(m.slot(s.source) == -1);
            CHECK(s.row == 2.0 * s.source.row + 0.5);
            CHECK(s.col == 2.0 * s.source.col + 0.5);
        }
    }
    CHECK(fine_cells == 400);
}

TEST_CASE("selective step with every token expanded is a fine reverse step") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    const GaussianOracleDenoiser d(0.05);
    const auto cond = condition_for(32, 3, 10);
    const auto coarse = testutil::random_grid(8, 8, 3, 11);
    const auto mixed = assemble_mixed(coarse, TokenSet::all(8, 8), {0.0, 0});
    const auto fine = mixed.collapse_to_fine();
    for (int t : {50, 20, 3}) {
        const auto step = selective_step(mixed, cond, t, t - 1, sched, d, 7);
        const auto ref = reverse_step(fine, d.predict(fine, cond, t, sched).eps, t, t - 1, sched, 7);
        CHECK(max_abs_diff(step.latent.collapse_to_fine(), ref) <= 1e-8);
        CHECK(step.tokens == 256);
        CHECK(step.latent.expand_set() == mixed.expand_set());
    }
}

TEST_CASE("selective step with nothing expanded is a coarse reverse step") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50, 0.9999, 0.01, SigmaMode::Ddpm);
    const GaussianOracleDenoiser d(0.05);
    const auto cond = condition_for(32, 3, 12);
    const auto coarse = testutil::random_grid(8, 8, 3, 13);
    const auto mixed = assemble_mixed(coarse, TokenSet(8, 8), {0.05, 0});
    const auto step = selective_step(mixed, cond, 30, 25, sched, d, 8);
    CHECK(step.latent.coarse() == reverse_step(coarse, d.predict(coarse, cond, 30, sched).eps, 30, 25, sched, 8));
    CHECK(step.tokens == 64);
}

TEST_CASE("main stage with degenerate sets matches the plain pipelines at every step") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    const GaussianOracleDenoiser d(0.05);
    MainStageConfig cfg;
    cfg.sigma_e = 0.0;
    for (int i = 0; i < 5; ++i) {
        TaskParams p;
        p.seed = 40 + i;
        p.height = 64;
        p.width = 64;
        const auto task = generate_task(p);
        const auto entry = main_stage_entry(task.z_ori, sched, cfg, 100 + i);

        const auto fine_ref =
            reference_trajectory(upsample_nearest(entry, 2), task.condition, sched, d, cfg, 100 + i);
        double worst = 0.0;
        run_main_stage(task.z_ori, task.condition, sched, d, TokenSet::all(16, 16), cfg, 100 + i, 7,
                       [&](int k, const MixedLatent& m) {
                           worst = std::max(worst, max_abs_diff(m.collapse_to_fine(), fine_ref[k]));
                       });
        CHECK(worst <= 1e-8);

        const auto coarse_ref = reference_trajectory(entry, task.condition, sched, d, cfg, 100 + i);
        bool exact = true;
        const auto r = run_main_stage(task.z_ori, task.condition, sched, d, TokenSet(16, 16), cfg, 100 + i, 7,
                                      [&](int k, const MixedLatent& m) { exact = exact && m.coarse() == coarse_ref[k]; });
        CHECK(exact);
        CHECK(r.output == upsample_nearest(coarse_ref.back(), 4));
        CHECK(r.step_tokens == std::vector<std::int64_t>(18, 256));
    }
}

TEST_CASE("an unedited task expands only the uniform set") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    for (int i = 0; i < 5; ++i) {
        TaskParams p;
        p.seed = 60 + i;
        p.height = 64;
        p.width = 64;
        p.strength = 0.0;
        p.prior_var = 0.0;
        const auto task = generate_task(p);
        const GaussianOracleDenoiser d(0.0);
        SpecEditConfig cfg;
        const auto r = run_specedit(task.z_ori, task.condition, sched, d, cfg, {1, 2, 3});
        CHECK(r.t_edit.empty());
        CHECK(r.t_expand == uniform_coverage(16, 16, 3));
    }
}

TEST_CASE("refining the edit region never loses to the coarse-only pipeline") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
        TaskParams p;
        p.seed = 700 + i;
        p.height = 128;
        p.width = 128;
        p.mask = i % 2 == 0 ? MaskShape::Disk : MaskShape::Rect;
        p.mask_fraction = 0.1;
        p.edit = EditKind::MeanShift;
        const auto task = generate_task(p);
        const GaussianOracleDenoiser d(p.prior_var);
        SpecEditConfig cfg;
        const auto seeds = seeds_for_task({}, p.seed);
        const auto spec = run_specedit(task.z_ori, task.condition, sched, d, cfg, seeds);
        SpecEditConfig coarse_cfg = cfg;
        coarse_cfg.strategy = Strategy::SemanticOnly;
        const auto coarse =
            run_with_selection(task.z_ori, task.condition, sched, d, coarse_cfg, seeds, TokenSet(32, 32));
        REQUIRE(coarse.t_expand.empty());
        const double e_spec = masked_mse(spec.output, task.target, task.edit_region, true);
        const double e_coarse = masked_mse(coarse.output, task.target, task.edit_region, true);
        if (e_spec > e_coarse) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("runtime shape errors") {
    const auto sched = NoiseSchedule::linear_alpha_bar(50);
    const GaussianOracleDenoiser d(0.05);
    const auto cond = condition_for(40, 2, 1);
    try {
        run_specedit(testutil::random_grid(40, 40, 2, 1), cond, sched, d, SpecEditConfig{}, {});
        FAIL("expected NonDivisibleShape");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonDivisibleShape);
    }
}
