// specedit command-line driver: run, verify, bench, sweep, compare-policies, inspect.
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "specedit/commands.hpp"
#include "specedit/config.hpp"
#include "specedit/errors.hpp"
#include "specedit/io.hpp"

namespace fs = std::filesystem;
using namespace specedit;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int jobs = 1;
    bool json = false;
    std::string input_a;
    std::string input_b;
    std::optional<double> tau;
    std::optional<int> levels;
    std::string file;
};

RunConfig load_config(const Options& o) {
    RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
    if (o.seed) cfg.task.seed = *o.seed;
    if (o.out.empty()) {
        if (const char* env = std::getenv("SPECEDIT_OUT"); env != nullptr && *env != '\0') cfg.output.directory = env;
    } else {
        cfg.output.directory = o.out;
    }
    cfg.validate();
    return cfg;
}

void write_rows(const fs::path& dir, const std::string& stem, const std::vector<SweepRow>& rows, bool json) {
    fs::create_directories(dir);
    write_text_file(dir / (stem + ".csv"), sweep_csv(rows));
    if (json) write_text_file(dir / (stem + ".json"), sweep_json(rows).dump(2) + "\n");
}

int cmd_run(const Options& o) {
    const RunConfig cfg = load_config(o);
    const auto a = run_command(cfg);
    write_run_artifacts(cfg.output.directory, a, cfg.output);
    if (o.json) {
        std::cout << a.summary.dump(2) << "\n";
    } else {
        std::printf("edit tokens %zu, expanded %zu, speedup %.4f, iou %.4f -> %s\n", a.report.result.t_edit.size(),
                    a.report.result.t_expand.size(), a.report.cost.speedup, a.report.iou,
                    cfg.output.directory.c_str());
    }
    return 0;
}

int cmd_verify(const Options& o) {
    const RunConfig cfg = load_config(o);
    DraftConfig d = cfg.pipeline.draft;
    if (o.tau) d.tau = *o.tau;
    if (o.levels) d.levels = *o.levels;
    d.validate();
    const auto a = verify_command(read_grid_any(o.input_a), read_grid_any(o.input_b), d);
    write_verify_artifacts(cfg.output.directory, a, cfg.output);
    if (o.json) {
        std::cout << tokens_json(a.tokens) << "\n";
    } else {
        std::printf("%zu of %zu tokens above tau %.4g -> %s\n", a.tokens.size(), a.map.height() * a.map.width(), d.tau,
                    cfg.output.directory.c_str());
    }
    return 0;
}

int cmd_bench(const Options& o) {
    const RunConfig cfg = load_config(o);
    const auto rows = bench_command(cfg, o.jobs);
    write_rows(cfg.output.directory, "bench", rows, o.json);
    const auto summary = bench_summary(rows);
    write_text_file(fs::path(cfg.output.directory) / "bench_summary.json", summary.dump(2) + "\n");
    std::printf("%zu runs, mean speedup %.4f, mean iou %.4f\n", rows.size(), summary["mean_speedup"].get<double>(),
                summary["mean_iou"].get<double>());
    return 0;
}

int cmd_sweep(const Options& o) {
    const RunConfig cfg = load_config(o);
    const auto rows = sweep_command(cfg, o.jobs);
    write_rows(cfg.output.directory, "sweep", rows, o.json);
    const auto violations = monotonicity_violations(rows);
    for (const auto& v : violations) std::fprintf(stderr, "monotonicity: %s\n", v.c_str());
    std::printf("%zu rows -> %s\n", rows.size(), (fs::path(cfg.output.directory) / "sweep.csv").c_str());
    return violations.empty() ? 0 : 1;
}

int cmd_compare(const Options& o) {
    const RunConfig cfg = load_config(o);
    const auto rows = compare_policies_command(cfg, o.jobs);
    const fs::path dir = cfg.output.directory;
    fs::create_directories(dir);
    write_text_file(dir / "compare.csv", compare_csv(rows));
    if (o.json) write_text_file(dir / "compare.json", compare_json(rows).dump(2) + "\n");
    std::printf("%zu rows -> %s\n", rows.size(), (dir / "compare.csv").c_str());
    return 0;
}

int cmd_inspect(const Options& o) {
    if (o.json) {
        std::cout << inspect_json(o.file).dump(2) << "\n";
    } else {
        std::cout << inspect_text(o.file);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Draft-and-verify dynamic-resolution sampling on a Gaussian oracle denoiser"};
    app.require_subcommand(1);
    Options o;

    auto common = [&o](CLI::App* sub, bool with_jobs) {
        sub->add_option("-c,--config", o.config, "JSON run configuration")->check(CLI::ExistingFile);
        sub->add_option("--out", o.out, "Output directory (overrides config and SPECEDIT_OUT)");
        sub->add_flag("--json", o.json, "Also emit JSON");
        if (with_jobs) sub->add_option("-j,--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    };

    auto* run = app.add_subcommand("run", "Draft, verify, expand and sample one task");
    common(run, false);
    run->add_option("--seed", o.seed, "Override seeds.task_seed");

    auto* verify = app.add_subcommand("verify", "Discrepancy map and edit tokens for a draft/original pair");
    verify->add_option("draft", o.input_a, "Draft tensor or PGM/PPM image")->required()->check(CLI::ExistingFile);
    verify->add_option("original", o.input_b, "Original tensor or PGM/PPM image")->required()->check(CLI::ExistingFile);
    verify->add_option("--tau", o.tau, "Threshold in [0, 1]");
    verify->add_option("--levels", o.levels, "Feature pyramid levels");
    common(verify, false);

    auto* bench = app.add_subcommand("bench", "Configured run over the bench seeds with the full-resolution baseline");
    common(bench, true);
    auto* sweep = app.add_subcommand("sweep", "Cartesian sweep over configured axes and seeds");
    common(sweep, true);
    auto* compare = app.add_subcommand("compare-policies", "Edge, variance and draft-verify selection at one budget");
    common(compare, true);

    auto* inspect = app.add_subcommand("inspect", "Print a tensor file header");
    inspect->add_option("file", o.file, "Tensor file")->required()->check(CLI::ExistingFile);
    inspect->add_flag("--json", o.json, "Print JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*run) return cmd_run(o);
        if (*verify) return cmd_verify(o);
        if (*bench) return cmd_bench(o);
        if (*sweep) return cmd_sweep(o);
        if (*compare) return cmd_compare(o);
        if (*inspect) return cmd_inspect(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error [io]: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
    return 1;
}
