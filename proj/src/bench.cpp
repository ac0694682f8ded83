#include "specedit/bench.hpp"

#include "specedit/errors.hpp"
#include "specedit/rng.hpp"
#include "specedit/sampler.hpp"

namespace specedit {

double masked_mse(const LatentGrid& a, const LatentGrid& b, const std::vector<std::uint8_t>& mask, bool inside) {
    if (!a.same_shape(b) || mask.size() != a.tokens()) throw Error(ErrorCode::ShapeMismatch, "masked_mse shapes");
    const std::size_t C = a.channels();
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t p = 0; p < mask.size(); ++p) {
        if ((mask[p] != 0) != inside) continue;
        for (std::size_t c = 0; c < C; ++c) {
            const double d = a.data()[p * C + c] - b.data()[p * C + c];
            acc += d * d;
        }
        n += C;
    }
    return n == 0 ? 0.0 : acc / static_cast<double>(n);
}

QualityMetrics quality_metrics(const LatentGrid& output, const SyntheticTask& task, const LatentGrid* baseline) {
    if (!output.same_shape(task.z_ori)) throw Error(ErrorCode::ShapeMismatch, "output is not at full resolution");
    QualityMetrics q;
    q.mse_edit = masked_mse(output, task.target, task.edit_region, true);
    q.mse_unedit = masked_mse(output, task.z_ori, task.edit_region, false);
    if (baseline != nullptr) {
        q.mse_edit_vs_baseline = masked_mse(output, *baseline, task.edit_region, true);
        q.mse_unedit_vs_baseline = masked_mse(output, *baseline, task.edit_region, false);
    }
    return q;
}

const char* selector_name(Selector s) {
    switch (s) {
        case Selector::SpecEdit: return "specedit";
        case Selector::SemanticOnly: return "semantic-only";
        case Selector::UniformOnly: return "uniform-only";
        case Selector::Edge: return "edge";
        case Selector::Variance: return "variance";
    }
    return "unknown";
}

Selector parse_selector(const std::string& name) {
    if (name == "specedit" || name == "combined") return Selector::SpecEdit;
    if (name == "semantic-only") return Selector::SemanticOnly;
    if (name == "uniform-only") return Selector::UniformOnly;
    if (name == "edge") return Selector::Edge;
    if (name == "variance") return Selector::Variance;
    throw Error(ErrorCode::ConfigError, "unknown policy '" + name + "'");
}

SpecEditSeeds seeds_for_task(const SpecEditSeeds& base, std::uint64_t task_seed) {
    return {derive_seed(base.draft_seed, task_seed, 1), derive_seed(base.main_seed, task_seed, 2),
            derive_seed(base.expand_seed, task_seed, 3)};
}

LatentGrid run_baseline(const SyntheticTask& task, const RunSettings& settings) {
    const GaussianOracleDenoiser denoiser(task.params.prior_var);
    return sample(task.z_ori, task.condition, settings.schedule, denoiser, settings.pipeline.nfe_baseline,
                  settings.seeds.main_seed)
        .output;
}

RunReport evaluate_task(const SyntheticTask& task, const RunSettings& settings) {
    const GaussianOracleDenoiser denoiser(task.params.prior_var);
    SpecEditConfig cfg = settings.pipeline;
    RunReport report;
    const double tau = cfg.draft.tau;
    switch (settings.selector) {
        case Selector::SpecEdit: cfg.strategy = Strategy::Combined; break;
        case Selector::SemanticOnly: cfg.strategy = Strategy::SemanticOnly; break;
        case Selector::UniformOnly: cfg.strategy = Strategy::UniformOnly; break;
        case Selector::Edge:
        case Selector::Variance: cfg.strategy = Strategy::Combined; break;
    }
    if (settings.selector == Selector::Edge || settings.selector == Selector::Variance) {
        const auto selected = settings.selector == Selector::Edge ? edge_policy(task.z_ori, Budget::threshold(tau))
                                                                  : variance_policy(task.z_ori, Budget::threshold(tau));
        report.result = run_with_selection(task.z_ori, task.condition, settings.schedule, denoiser, cfg,
                                           settings.seeds, selected);
    } else {
        report.result = run_specedit(task.z_ori, task.condition, settings.schedule, denoiser, cfg, settings.seeds);
    }
    report.cost = pipeline_cost(report.result.ledger, settings.cost);
    report.iou = policy_iou(report.result.t_edit, task.truth);
    report.dissim_ratio =
        static_cast<double>(report.result.t_edit.size()) / static_cast<double>(task.truth.height() * task.truth.width());
    if (settings.with_baseline) report.baseline_output = run_baseline(task, settings);
    report.quality = quality_metrics(report.result.output, task,
                                     report.baseline_output ? &*report.baseline_output : nullptr);
    return report;
}

}  // namespace specedit
