#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "specedit/cost.hpp"
#include "specedit/denoiser.hpp"
#include "specedit/draft_verify.hpp"
#include "specedit/mixed_latent.hpp"
#include "specedit/token_sched.hpp"

namespace specedit {

/// How the expansion set is composed from the two sources.
enum class Strategy {
    Combined,      // T_edit U T_uniform
    SemanticOnly,  // T_edit only
    UniformOnly,   // T_uniform only (verification runs but selects nothing)
};

struct MainStageConfig {
    int nfe_main = 18;
    int entry_step = 0;  // 0 means T
    double sigma_e = 0.05;
};

struct SpecEditConfig {
    DraftConfig draft;
    std::size_t k = 3;
    Strategy strategy = Strategy::Combined;
    MainStageConfig main;
    int nfe_baseline = 50;

    void validate() const;
};

struct SpecEditSeeds {
    std::uint64_t draft_seed = 1;
    std::uint64_t main_seed = 2;
    std::uint64_t expand_seed = 3;
};

struct VerifyResult {
    LatentGrid draft;
    DiscrepancyMap map;
    TokenSet t_edit;
    std::vector<std::int64_t> draft_step_tokens;
};

struct MainStageResult {
    LatentGrid output;   // full resolution
    MixedLatent final_latent;
    std::vector<std::int64_t> step_tokens;
};

struct SpecEditResult {
    LatentGrid output;
    CostLedger ledger;
    TokenSet t_edit;
    TokenSet t_expand;
    VerifyResult verify;
};

using StepObserver = std::function<void(int step_index, const MixedLatent&)>;

/// Draft at s_draft, discrepancy against z_ori, threshold at cfg.tau.
VerifyResult verify_stage(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                          const Denoiser& denoiser, const DraftConfig& cfg, std::uint64_t draft_seed);

/// Forward-noised downsample(z_ori, 4), expanded once, then nfe_main selective steps.
/// The observer (if any) sees the latent after every step.
MainStageResult run_main_stage(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                               const Denoiser& denoiser, const TokenSet& t_expand, const MainStageConfig& cfg,
                               std::uint64_t main_seed, std::uint64_t expand_seed,
                               const StepObserver& observer = {});

/// Initial coarse latent of the main stage (before expansion).
LatentGrid main_stage_entry(const LatentGrid& z_ori, const NoiseSchedule& sched, const MainStageConfig& cfg,
                            std::uint64_t main_seed);

/// Runs a plain sampler from `start` over the main-stage step list, returning the
/// state after every step. Used as the pure coarse / pure fine references.
std::vector<LatentGrid> reference_trajectory(const LatentGrid& start, const EditCondition& c,
                                             const NoiseSchedule& sched, const Denoiser& denoiser,
                                             const MainStageConfig& cfg, std::uint64_t main_seed);

/// Composes the expansion set for the configured strategy.
TokenSet compose_expand_set(const TokenSet& t_edit, std::size_t k, Strategy strategy);

/// Full draft -> verify -> expand -> selective sampling -> reconstruction run.
SpecEditResult run_specedit(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                            const Denoiser& denoiser, const SpecEditConfig& cfg, const SpecEditSeeds& seeds);

/// Same, with an externally chosen edit set (baseline selection policies). No draft cost is charged.
SpecEditResult run_with_selection(const LatentGrid& z_ori, const EditCondition& c, const NoiseSchedule& sched,
                                  const Denoiser& denoiser, const SpecEditConfig& cfg, const SpecEditSeeds& seeds,
                                  const TokenSet& t_edit);

}  // namespace specedit
