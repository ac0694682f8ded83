#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specedit/cost.hpp"
#include "specedit/pipeline.hpp"
#include "specedit/policies.hpp"
#include "specedit/task.hpp"

namespace specedit {

struct QualityMetrics {
    double mse_edit = 0.0;                // edited region vs target mean
    double mse_unedit = 0.0;              // unedited region vs z_ori
    double mse_edit_vs_baseline = 0.0;    // edited region vs full-resolution baseline output
    double mse_unedit_vs_baseline = 0.0;  // unedited region vs baseline output
};

/// Mean squared error over the pixels where mask == inside (all channels).
double masked_mse(const LatentGrid& a, const LatentGrid& b, const std::vector<std::uint8_t>& mask, bool inside);

QualityMetrics quality_metrics(const LatentGrid& output, const SyntheticTask& task,
                               const LatentGrid* baseline_output = nullptr);

/// Which tokens feed T_edit.
enum class Selector {
    SpecEdit,      // draft-verify, edit U uniform
    SemanticOnly,  // draft-verify, no uniform set
    UniformOnly,   // uniform set only
    Edge,          // Sobel policy thresholded at tau, plus uniform set
    Variance,      // channel-variance policy thresholded at tau, plus uniform set
};

const char* selector_name(Selector s);
Selector parse_selector(const std::string& name);

struct RunSettings {
    NoiseSchedule schedule = NoiseSchedule::linear_alpha_bar(50);
    SpecEditConfig pipeline;
    Selector selector = Selector::SpecEdit;
    CostModel cost;
    SpecEditSeeds seeds;
    bool with_baseline = false;  // also run the full-resolution reference sampler
};

/// Per-run seeds: the configured seeds mixed with the task seed.
SpecEditSeeds seeds_for_task(const SpecEditSeeds& base, std::uint64_t task_seed);

struct RunReport {
    SpecEditResult result;
    CostSummary cost;
    QualityMetrics quality;
    double iou = 0.0;             // T_edit vs coarse truth mask
    double dissim_ratio = 0.0;    // |T_edit| / tokens
    std::optional<LatentGrid> baseline_output;
};

RunReport evaluate_task(const SyntheticTask& task, const RunSettings& settings);

/// Full-resolution sampler with nfe_baseline steps.
LatentGrid run_baseline(const SyntheticTask& task, const RunSettings& settings);

}  // namespace specedit
