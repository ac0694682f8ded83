#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "specedit/bench.hpp"
#include "specedit/task.hpp"

namespace specedit {

using AxisValue = std::variant<double, std::string>;

/// Axis names: tau, k, n_draft, nfe_main, policy, sigma_e, mask_fraction.
struct SweepAxis {
    std::string name;
    std::vector<AxisValue> values;
};

struct SweepSpec {
    std::vector<SweepAxis> axes;
    std::vector<std::uint64_t> seeds;
};

struct SweepRow {
    std::size_t config_id = 0;
    std::uint64_t seed = 0;
    double tau = 0.0;
    std::size_t k = 0;
    int n_draft = 0;
    int nfe_main = 0;
    std::string policy;
    double mask_fraction = 0.0;
    double sigma_e = 0.0;  // not a CSV column; kept so row pairs can be matched
    double iou = 0.0;
    double dissim_ratio = 0.0;
    double mse_edit = 0.0;
    double mse_unedit = 0.0;
    double interactions_total = 0.0;
    double baseline_total = 0.0;
    double speedup = 0.0;
    // Filled only when the settings ask for the full-resolution baseline.
    double mse_edit_vs_baseline = 0.0;
    double mse_unedit_vs_baseline = 0.0;
};

bool is_sweep_axis(const std::string& name);
std::string axis_value_string(const AxisValue& v);

/// Applies one axis value to the settings / task parameters.
void apply_axis(const std::string& name, const AxisValue& value, RunSettings& settings, TaskParams& task);

/// Number of configurations (product of axis sizes). EmptyAxis if any axis has no values.
std::size_t sweep_config_count(const SweepSpec& spec);

/// Axis values for configuration `config_id`; the last axis varies fastest.
std::vector<AxisValue> sweep_config(const SweepSpec& spec, std::size_t config_id);

SweepRow evaluate_row(const RunSettings& settings, const TaskParams& task, std::size_t config_id);

/// Runs every (configuration, seed) pair on `jobs` threads. Rows come back sorted
/// by (config_id, seed order) regardless of the thread count.
std::vector<SweepRow> run_sweep(const RunSettings& base, const TaskParams& base_task, const SweepSpec& spec,
                                int jobs = 1);

extern const char* const kSweepCsvHeader;
std::string format_number(double v);
std::string sweep_csv(const std::vector<SweepRow>& rows);
nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows);

/// Row pairs that break the monotone-efficiency rules: raising tau must not lower the
/// speedup, and lowering k must not raise it (all other columns equal).
std::vector<std::string> monotonicity_violations(const std::vector<SweepRow>& rows);

}  // namespace specedit
