#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "specedit/config.hpp"
#include "specedit/errors.hpp"
#include "specedit/sweep.hpp"

// Library side of the command-line subcommands. Each command computes its results
// here; the executable only parses flags, picks the output directory and maps errors
// to exit codes.
namespace specedit {

struct RunArtifacts {
    SyntheticTask task;
    RunReport report;
    LatentGrid overlay;  // fine-resolution token overlay in [0, 1]
    nlohmann::ordered_json ledger;
    nlohmann::ordered_json summary;
};

/// One pipeline run on the configured task, seeded directly by the config seeds.
RunArtifacts run_command(const RunConfig& cfg);

/// Background is the input's channel-mean intensity squeezed into [0, 0.5];
/// uniform-only tokens are drawn at 0.75 and edit tokens at 1.
LatentGrid token_overlay(const LatentGrid& z_ori, const TokenSet& t_edit, const TokenSet& t_expand);

nlohmann::ordered_json run_summary_json(const RunConfig& cfg, const SyntheticTask& task, const RunReport& report);

/// Writes output.spgd plus tokens.pgm (emit_heatmap) and ledger.json / report.json (emit_json).
void write_run_artifacts(const std::filesystem::path& dir, const RunArtifacts& a, const OutputConfig& out);

struct VerifyArtifacts {
    DiscrepancyMap map;
    TokenSet tokens;
};

/// Compares `draft` (any supported downsampling of `original`, or the same size)
/// against `original` and thresholds at cfg.tau.
VerifyArtifacts verify_command(const LatentGrid& draft, const LatentGrid& original, const DraftConfig& cfg);

/// JSON array of [i, j] pairs in row-major order.
std::string tokens_json(const TokenSet& tokens);

void write_verify_artifacts(const std::filesystem::path& dir, const VerifyArtifacts& a, const OutputConfig& out);

/// Configured run repeated over the bench seeds, with the full-resolution baseline.
std::vector<SweepRow> bench_command(const RunConfig& cfg, int jobs);
nlohmann::ordered_json bench_summary(const std::vector<SweepRow>& rows);

std::vector<SweepRow> sweep_command(const RunConfig& cfg, int jobs);

struct CompareRow {
    std::uint64_t task_id = 0;
    std::string policy;
    double budget = 0.0;
    double iou = 0.0;
    std::size_t selected_count = 0;
    std::size_t truth_count = 0;
};

/// edge (Sobel stand-in), variance and draft-verify selections at one TopFraction
/// budget per task: the truth fraction when the budget is matched.
std::vector<CompareRow> compare_policies_command(const RunConfig& cfg, int jobs);
std::string compare_csv(const std::vector<CompareRow>& rows);
nlohmann::ordered_json compare_json(const std::vector<CompareRow>& rows);

nlohmann::ordered_json inspect_json(const std::filesystem::path& path);
std::string inspect_text(const std::filesystem::path& path);

/// 0 ok, 1 internal, 2 config or input, 3 shape.
int exit_code_for(ErrorCode code);

}  // namespace specedit
