#include "specedit/commands.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "specedit/errors.hpp"
#include "specedit/io.hpp"
#include "specedit/policies.hpp"

namespace specedit {

namespace {

using ojson = nlohmann::ordered_json;

SyntheticTask make_task(const TaskParams& p) {
    return p.kind == TaskKind::Adversarial ? make_adversarial_task(p) : generate_task(p);
}

double mean_of(const std::vector<SweepRow>& rows, double SweepRow::*field) {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.*field;
    return s / static_cast<double>(rows.size());
}

}  // namespace

LatentGrid token_overlay(const LatentGrid& z_ori, const TokenSet& t_edit, const TokenSet& t_expand) {
    const std::size_t H = z_ori.height();
    const std::size_t W = z_ori.width();
    const std::size_t C = z_ori.channels();
    std::vector<double> intensity(H * W, 0.0);
    for (std::size_t p = 0; p < H * W; ++p) {
        double s = 0.0;
        for (std::size_t c = 0; c < C; ++c) s += z_ori.data()[p * C + c];
        intensity[p] = s / static_cast<double>(C);
    }
    const auto [lo, hi] = std::minmax_element(intensity.begin(), intensity.end());
    const double range = *hi - *lo;
    LatentGrid out(H, W, 1);
    for (std::size_t y = 0; y < H; ++y) {
        for (std::size_t x = 0; x < W; ++x) {
            const TokenIndex t{static_cast<std::uint32_t>(y / kCoarseFactor),
                               static_cast<std::uint32_t>(x / kCoarseFactor)};
            double v = range > 0.0 ? 0.5 * (intensity[y * W + x] - *lo) / range : 0.0;
            if (t_edit.contains(t)) {
                v = 1.0;
            } else if (t_expand.contains(t)) {
                v = 0.75;
            }
            out.at(y, x, 0) = v;
        }
    }
    return out;
}

ojson run_summary_json(const RunConfig& cfg, const SyntheticTask& task, const RunReport& report) {
    const auto& r = report.result;
    ojson j;
    j["config"] = run_config_to_json(cfg);
    j["task"] = {{"fine_fraction", task.fine_fraction}, {"truth_tokens", task.truth.size()}};
    auto per_step = ojson::array();
    for (auto n : r.ledger.main_tokens) per_step.push_back(n);
    j["tokens"] = {{"coarse_grid", {r.t_expand.height(), r.t_expand.width()}},
                   {"edit", r.t_edit.size()},
                   {"expand", r.t_expand.size()},
                   {"draft_per_step", r.ledger.draft_tokens},
                   {"draft_steps", r.ledger.draft_steps},
                   {"main_per_step", per_step}};
    j["interactions"] = {{"draft", json_number(report.cost.draft_cost)},
                         {"total", json_number(report.cost.specedit_total)},
                         {"baseline_total", json_number(report.cost.baseline_total)}};
    j["flops_speedup"] = report.cost.speedup;
    j["speedup"] = report.cost.speedup;
    j["mse_edit"] = report.quality.mse_edit;
    j["mse_unedit"] = report.quality.mse_unedit;
    j["iou"] = report.iou;
    j["dissim_ratio"] = report.dissim_ratio;
    return j;
}

RunArtifacts run_command(const RunConfig& cfg) {
    cfg.validate();
    RunArtifacts a;
    a.task = make_task(cfg.task);
    a.report = evaluate_task(a.task, cfg.settings());
    a.overlay = token_overlay(a.task.z_ori, a.report.result.t_edit, a.report.result.t_expand);
    a.ledger = ledger_to_json(a.report.result.ledger, cfg.cost);
    a.summary = run_summary_json(cfg, a.task, a.report);
    return a;
}

void write_run_artifacts(const std::filesystem::path& dir, const RunArtifacts& a, const OutputConfig& out) {
    std::filesystem::create_directories(dir);
    write_tensor(dir / "output.spgd", a.report.result.output);
    if (out.emit_heatmap) write_image_pgm_ppm(dir / "tokens.pgm", a.overlay);
    if (out.emit_json) {
        write_text_file(dir / "ledger.json", a.ledger.dump(2) + "\n");
        write_text_file(dir / "report.json", a.summary.dump(2) + "\n");
    }
}

VerifyArtifacts verify_command(const LatentGrid& draft, const LatentGrid& original, const DraftConfig& cfg) {
    VerifyArtifacts a{discrepancy(draft, original, cfg), TokenSet(1, 1)};
    a.tokens = select_edit_tokens(a.map, cfg.tau);
    return a;
}

std::string tokens_json(const TokenSet& tokens) {
    auto arr = ojson::array();
    for (const auto& t : tokens.coords()) arr.push_back({t.row, t.col});
    return arr.dump();
}

void write_verify_artifacts(const std::filesystem::path& dir, const VerifyArtifacts& a, const OutputConfig& out) {
    std::filesystem::create_directories(dir);
    write_tensor(dir / "discrepancy.spgd", a.map.grid);
    if (out.emit_heatmap) write_image_pgm_ppm(dir / "heatmap.pgm", a.map.grid);
    write_text_file(dir / "tokens.json", tokens_json(a.tokens) + "\n");
}

std::vector<SweepRow> bench_command(const RunConfig& cfg, int jobs) {
    cfg.validate();
    RunSettings s = cfg.settings();
    s.with_baseline = true;
    return run_sweep(s, cfg.task, SweepSpec{{}, cfg.bench_seeds}, jobs);
}

ojson bench_summary(const std::vector<SweepRow>& rows) {
    ojson j;
    j["runs"] = rows.size();
    j["mean_speedup"] = mean_of(rows, &SweepRow::speedup);
    j["mean_iou"] = mean_of(rows, &SweepRow::iou);
    j["mean_dissim_ratio"] = mean_of(rows, &SweepRow::dissim_ratio);
    j["mean_mse_edit"] = mean_of(rows, &SweepRow::mse_edit);
    j["mean_mse_unedit"] = mean_of(rows, &SweepRow::mse_unedit);
    j["mean_mse_edit_vs_baseline"] = mean_of(rows, &SweepRow::mse_edit_vs_baseline);
    j["mean_mse_unedit_vs_baseline"] = mean_of(rows, &SweepRow::mse_unedit_vs_baseline);
    j["speedup_source"] = "cost model a*n^2 + b*n";
    return j;
}

std::vector<SweepRow> sweep_command(const RunConfig& cfg, int jobs) {
    cfg.validate();
    SweepSpec spec = cfg.sweep;
    if (spec.seeds.empty()) spec.seeds = cfg.bench_seeds;
    return run_sweep(cfg.settings(), cfg.task, spec, jobs);
}

std::vector<CompareRow> compare_policies_command(const RunConfig& cfg, int jobs) {
    cfg.validate();
    if (jobs < 1) throw Error(ErrorCode::ConfigError, "--jobs must be >= 1");
    const RunSettings settings = cfg.settings();
    const auto& seeds = cfg.compare.seeds;
    std::vector<std::vector<CompareRow>> per_task(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());
    const long n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long i = 0; i < n; ++i) {
        try {
            TaskParams p = cfg.task;
            p.seed = seeds[i];
            const SyntheticTask task = make_task(p);
            const std::size_t tokens = task.truth.height() * task.truth.width();
            const double budget = cfg.compare.budget
                                      ? *cfg.compare.budget
                                      : static_cast<double>(task.truth.size()) / static_cast<double>(tokens);
            const Budget b = Budget::top_fraction(budget);
            const GaussianOracleDenoiser denoiser(p.prior_var);
            const auto run_seeds = seeds_for_task(settings.seeds, p.seed);
            const auto verify = verify_stage(task.z_ori, task.condition, settings.schedule, denoiser,
                                             settings.pipeline.draft, run_seeds.draft_seed);
            auto row = [&](const char* name, const TokenSet& sel) {
                per_task[i].push_back({p.seed, name, budget, policy_iou(sel, task.truth), sel.size(), task.truth.size()});
            };
            row("edge", edge_policy(task.z_ori, b));
            if (task.z_ori.channels() >= 2) row("variance", variance_policy(task.z_ori, b));
            row("draft-verify", draft_verify_policy(verify.map, b));
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    std::vector<CompareRow> rows;
    for (auto& t : per_task) rows.insert(rows.end(), t.begin(), t.end());
    return rows;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
    std::ostringstream out;
    out << "task_id,policy,budget,iou,selected_count,truth_count\n";
    for (const auto& r : rows) {
        out << r.task_id << ',' << r.policy << ',' << format_number(r.budget) << ',' << format_number(r.iou) << ','
            << r.selected_count << ',' << r.truth_count << '\n';
    }
    return out.str();
}

ojson compare_json(const std::vector<CompareRow>& rows) {
    ojson j;
    j["edge_operator"] = "sobel 3x3, clamped borders (stand-in)";
    auto arr = ojson::array();
    for (const auto& r : rows) {
        arr.push_back({{"task_id", r.task_id},
                       {"policy", r.policy},
                       {"budget", r.budget},
                       {"iou", r.iou},
                       {"selected_count", r.selected_count},
                       {"truth_count", r.truth_count}});
    }
    j["rows"] = std::move(arr);
    return j;
}

ojson inspect_json(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    const auto h = decode_tensor_header(bytes);
    ojson j;
    j["path"] = path.string();
    j["magic"] = "SPGD";
    j["version"] = h.version;
    j["dtype"] = "f32le";
    j["rank"] = h.rank;
    j["shape"] = {h.height, h.width, h.channels};
    j["payload_bytes"] = h.payload_bytes();
    j["file_bytes"] = bytes.size();
    return j;
}

std::string inspect_text(const std::filesystem::path& path) {
    const auto j = inspect_json(path);
    std::ostringstream out;
    out << j["path"].get<std::string>() << ": SPGD v" << j["version"].get<int>() << " f32le "
        << j["shape"][0].get<std::uint32_t>() << "x" << j["shape"][1].get<std::uint32_t>() << "x"
        << j["shape"][2].get<std::uint32_t>() << " (" << j["payload_bytes"].get<std::uint64_t>()
        << " payload bytes)\n";
    return out.str();
}

int exit_code_for(ErrorCode code) {
    if (is_shape_error(code)) return 3;
    switch (code) {
        case ErrorCode::StepOutOfRange:
        case ErrorCode::UnnormalizedMap:
        case ErrorCode::IncompleteLedger: return 1;
        default: return 2;
    }
}

}  // namespace specedit
