#include "specedit/pipeline.hpp"

#include "specedit/errors.hpp"
#include "specedit/sampler.hpp"

namespace specedit {
namespace {

void check_divisible(const LatentGrid& z, std::size_t s, const char* what) {
    if (z.height() % s != 0 || z.width() % s != 0) {
        throw Error(ErrorCode::NonDivisibleShape, std::string(what) + ": " + std::to_string(z.height()) + "x" +
                                                      std::to_string(z.width()) + " not divisible by " +
                                                      std::to_string(s));
    }
}

int resolve_entry(const NoiseSchedule& sched, const MainStageConfig& cfg) {
    const int entry = cfg.entry_step == 0 ? sched.num_steps() : cfg.entry_step;
    if (entry < 1 || entry > sched.num_steps()) throw Error(ErrorCode::StepOutOfRange, "entry_step out of range");
    return entry;
}

SpecEditResult finish_run(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                          const Denoiser& denoiser, const SpecEditConfig& cfg, const SpecEditSeeds& seeds,
                          VerifyResult verify, bool charge_draft) {
    SpecEditResult r;
    r.t_edit = verify.t_edit;
    r.t_expand = compose_expand_set(verify.t_edit, cfg.k, cfg.strategy);
    auto main = run_main_stage(z_ori, c, sched, denoiser, r.t_expand, cfg.main, seeds.main_seed, seeds.expand_seed);
    r.output = std::move(main.output);

    r.ledger.fine_tokens = static_cast<std::int64_t>(z_ori.tokens());
    r.ledger.baseline_steps = cfg.nfe_baseline;
    if (charge_draft && !verify.draft_step_tokens.empty()) {
        r.ledger.draft_tokens = verify.draft_step_tokens.front();
        r.ledger.draft_steps = static_cast<int>(verify.draft_step_tokens.size());
    }
    r.ledger.main_tokens = std::move(main.step_tokens);
    r.verify = std::move(verify);
    return r;
}

}  // namespace

void SpecEditConfig::validate() const {
    draft.validate();
    if (k < 1 && strategy != Strategy::SemanticOnly) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
    if (main.nfe_main < 1) throw Error(ErrorCode::InvalidArgument, "nfe_main must be positive");
    if (!(main.sigma_e >= 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_e must be >= 0");
    if (nfe_baseline < 1) throw Error(ErrorCode::InvalidArgument, "nfe_baseline must be positive");
}

VerifyResult verify_stage(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                          const Denoiser& denoiser, const DraftConfig& cfg, std::uint64_t draft_seed) {
    check_divisible(z_ori, cfg.s_draft, "draft downsampling");
    VerifyResult v;
    auto draft = run_draft(z_ori, c, sched, denoiser, cfg, draft_seed);
    v.draft = std::move(draft.output);
    v.draft_step_tokens = std::move(draft.step_tokens);
    v.map = discrepancy(v.draft, z_ori, cfg);
    v.t_edit = select_edit_tokens(v.map, cfg.tau);
    return v;
}

LatentGrid main_stage_entry(const LatentGrid& z_ori, const NoiseSchedule& sched, const MainStageConfig& cfg,
                            std::uint64_t main_seed) {
    check_divisible(z_ori, kCoarseFactor, "runtime downsampling");
    const auto steps = select_steps(resolve_entry(sched, cfg), cfg.nfe_main);
    return forward_noise(downsample(z_ori, kCoarseFactor), steps.front(), sched, entry_noise_seed(main_seed));
}

MainStageResult run_main_stage(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                               const Denoiser& denoiser, const TokenSet& t_expand, const MainStageConfig& cfg,
                               std::uint64_t main_seed, std::uint64_t expand_seed, const StepObserver& observer) {
    const auto steps = select_steps(resolve_entry(sched, cfg), cfg.nfe_main);
    MixedLatent mixed = assemble_mixed(main_stage_entry(z_ori, sched, cfg, main_seed), t_expand,
                                       {cfg.sigma_e, expand_seed});
    MainStageResult r;
    r.step_tokens.reserve(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const int t_prev = i + 1 < steps.size() ? steps[i + 1] : 0;
        auto step = selective_step(mixed, c, steps[i], t_prev, sched, denoiser, step_seed(main_seed, static_cast<int>(i)));
        mixed = std::move(step.latent);
        r.step_tokens.push_back(step.tokens);
        if (observer) observer(static_cast<int>(i), mixed);
    }
    r.output = upsample_nearest(mixed.collapse_to_fine(), kCoarseFactor / 2);
    r.final_latent = std::move(mixed);
    return r;
}

std::vector<LatentGrid> reference_trajectory(const LatentGrid& start, const EditCondition& c,
                                             const NoiseSchedule& sched, const Denoiser& denoiser,
                                             const MainStageConfig& cfg, std::uint64_t main_seed) {
    const auto steps = select_steps(resolve_entry(sched, cfg), cfg.nfe_main);
    std::vector<LatentGrid> traj;
    traj.reserve(steps.size());
    LatentGrid x = start;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const int t_prev = i + 1 < steps.size() ? steps[i + 1] : 0;
        const auto pred = denoiser.predict(x, c, steps[i], sched);
        x = reverse_step(x, pred.eps, steps[i], t_prev, sched, step_seed(main_seed, static_cast<int>(i)));
        traj.push_back(x);
    }
    return traj;
}

TokenSet compose_expand_set(const TokenSet& t_edit, std::size_t k, Strategy strategy) {
    const std::size_t h = t_edit.height();
    const std::size_t w = t_edit.width();
    switch (strategy) {
        case Strategy::Combined: return build_expand_set(t_edit, uniform_coverage(h, w, k));
        case Strategy::SemanticOnly: return build_expand_set(t_edit, TokenSet(h, w));
        case Strategy::UniformOnly: return build_expand_set(TokenSet(h, w), uniform_coverage(h, w, k));
    }
    return TokenSet(h, w);
}

SpecEditResult run_specedit(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                            const Denoiser& denoiser, const SpecEditConfig& cfg, const SpecEditSeeds& seeds) {
    cfg.validate();
    check_divisible(z_ori, cfg.draft.s_draft, "draft downsampling");
    check_divisible(z_ori, kCoarseFactor, "runtime downsampling");
    DraftConfig draft_cfg = cfg.draft;
    if (cfg.strategy == Strategy::UniformOnly) draft_cfg.tau = 1.0;
    auto verify = verify_stage(z_ori, c, sched, denoiser, draft_cfg, seeds.draft_seed);
    return finish_run(z_ori, c, sched, denoiser, cfg, seeds, std::move(verify), true);
}

SpecEditResult run_with_selection(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                                  const Denoiser& denoiser, const SpecEditConfig& cfg, const SpecEditSeeds& seeds,
                                  const TokenSet& t_edit) {
    cfg.validate();
    check_divisible(z_ori, kCoarseFactor, "runtime downsampling");
    if (t_edit.height() != z_ori.height() / kCoarseFactor || t_edit.width() != z_ori.width() / kCoarseFactor) {
        throw Error(ErrorCode::GridMismatch, "edit set is not on the coarse grid");
    }
    VerifyResult verify;
    verify.t_edit = t_edit;
    return finish_run(z_ori, c, sched, denoiser, cfg, seeds, std::move(verify), false);
}

}  // namespace specedit
