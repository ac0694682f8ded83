#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "specedit/bench.hpp"
#include "specedit/sweep.hpp"
#include "specedit/task.hpp"

namespace specedit {

struct ScheduleConfig {
    int steps = 50;
    double alpha_bar_start = 0.9999;
    double alpha_bar_end = 0.01;
    SigmaMode sigma_mode = SigmaMode::Zero;

    NoiseSchedule build() const;
};

struct OutputConfig {
    std::string directory = "specedit_out";
    bool emit_heatmap = true;
    bool emit_json = true;
};

/// Matched budget uses the truth fraction of each task; otherwise TopFraction(budget).
struct CompareSpec {
    std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
    std::optional<double> budget;
};

struct RunConfig {
    ScheduleConfig schedule;
    SpecEditConfig pipeline;
    Selector selector = Selector::SpecEdit;
    TaskParams task;
    SpecEditSeeds seeds;
    CostModel cost;
    OutputConfig output;
    SweepSpec sweep;
    std::vector<std::uint64_t> bench_seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CompareSpec compare;

    /// Config errors name the offending key; shape errors name the offending field.
    void validate() const;
    RunSettings settings() const;
};

const char* sigma_mode_name(SigmaMode m);

RunConfig parse_run_config(const nlohmann::ordered_json& j);
RunConfig load_run_config(const std::filesystem::path& path);
nlohmann::ordered_json run_config_to_json(const RunConfig& cfg);

}  // namespace specedit
