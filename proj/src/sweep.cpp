#include "specedit/sweep.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <sstream>
#include <tuple>

#include "specedit/errors.hpp"

namespace specedit {

namespace {

constexpr std::array<const char*, 7> kAxisNames{"tau", "k", "n_draft", "nfe_main", "policy", "sigma_e", "mask_fraction"};

double numeric(const std::string& axis, const AxisValue& v) {
    if (const double* d = std::get_if<double>(&v)) return *d;
    throw Error(ErrorCode::ConfigError, "sweep axis '" + axis + "' expects numbers");
}

int integral(const std::string& axis, const AxisValue& v) {
    const double d = numeric(axis, v);
    if (d != std::floor(d) || d < 1.0 || d > 1e6) {
        throw Error(ErrorCode::ConfigError, "sweep axis '" + axis + "' expects positive integers");
    }
    return static_cast<int>(d);
}

}  // namespace

bool is_sweep_axis(const std::string& name) {
    for (const char* a : kAxisNames) {
        if (name == a) return true;
    }
    return false;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string axis_value_string(const AxisValue& v) {
    if (const double* d = std::get_if<double>(&v)) return format_number(*d);
    return std::get<std::string>(v);
}

void apply_axis(const std::string& name, const AxisValue& value, RunSettings& settings, TaskParams& task) {
    if (name == "tau") {
        settings.pipeline.draft.tau = numeric(name, value);
    } else if (name == "k") {
        settings.pipeline.k = static_cast<std::size_t>(integral(name, value));
    } else if (name == "n_draft") {
        settings.pipeline.draft.n_draft = integral(name, value);
    } else if (name == "nfe_main") {
        settings.pipeline.main.nfe_main = integral(name, value);
    } else if (name == "sigma_e") {
        settings.pipeline.main.sigma_e = numeric(name, value);
    } else if (name == "mask_fraction") {
        task.mask_fraction = numeric(name, value);
    } else if (name == "policy") {
        const std::string* s = std::get_if<std::string>(&value);
        if (s == nullptr) throw Error(ErrorCode::ConfigError, "sweep axis 'policy' expects names");
        settings.selector = parse_selector(*s);
    } else {
        throw Error(ErrorCode::ConfigError, "unknown sweep axis '" + name + "'");
    }
}

std::size_t sweep_config_count(const SweepSpec& spec) {
    std::size_t n = 1;
    for (const auto& axis : spec.axes) {
        if (axis.values.empty()) throw Error(ErrorCode::EmptyAxis, "sweep axis '" + axis.name + "' has no values");
        n *= axis.values.size();
    }
    return n;
}

std::vector<AxisValue> sweep_config(const SweepSpec& spec, std::size_t config_id) {
    std::vector<AxisValue> out(spec.axes.size());
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
        const auto& values = spec.axes[a].values;
        out[a] = values[config_id % values.size()];
        config_id /= values.size();
    }
    return out;
}

SweepRow evaluate_row(const RunSettings& settings, const TaskParams& task_params, std::size_t config_id) {
    const SyntheticTask task = task_params.kind == TaskKind::Adversarial ? make_adversarial_task(task_params)
                                                                          : generate_task(task_params);
    RunSettings s = settings;
    s.seeds = seeds_for_task(settings.seeds, task_params.seed);
    const RunReport report = evaluate_task(task, s);

    SweepRow row;
    row.config_id = config_id;
    row.seed = task_params.seed;
    row.tau = settings.pipeline.draft.tau;
    row.k = settings.pipeline.k;
    row.n_draft = settings.pipeline.draft.n_draft;
    row.nfe_main = settings.pipeline.main.nfe_main;
    row.policy = selector_name(settings.selector);
    row.mask_fraction = task_params.mask_fraction;
    row.sigma_e = settings.pipeline.main.sigma_e;
    row.iou = report.iou;
    row.dissim_ratio = report.dissim_ratio;
    row.mse_edit = report.quality.mse_edit;
    row.mse_unedit = report.quality.mse_unedit;
    row.interactions_total = report.cost.specedit_total;
    row.baseline_total = report.cost.baseline_total;
    row.speedup = report.cost.speedup;
    row.mse_edit_vs_baseline = report.quality.mse_edit_vs_baseline;
    row.mse_unedit_vs_baseline = report.quality.mse_unedit_vs_baseline;
    return row;
}

std::vector<SweepRow> run_sweep(const RunSettings& base, const TaskParams& base_task, const SweepSpec& spec,
                                int jobs) {
    const std::size_t configs = sweep_config_count(spec);
    if (spec.seeds.empty()) throw Error(ErrorCode::EmptyAxis, "sweep has no seeds");
    if (jobs < 1) throw Error(ErrorCode::ConfigError, "--jobs must be >= 1");

    struct Job {
        RunSettings settings;
        TaskParams task;
        std::size_t config_id;
    };
    // Settings are resolved up front so a bad axis value fails before any work starts.
    std::vector<Job> work;
    work.reserve(configs * spec.seeds.size());
    for (std::size_t c = 0; c < configs; ++c) {
        const auto values = sweep_config(spec, c);
        RunSettings s = base;
        TaskParams t = base_task;
        for (std::size_t a = 0; a < spec.axes.size(); ++a) apply_axis(spec.axes[a].name, values[a], s, t);
        s.pipeline.validate();
        for (std::uint64_t seed : spec.seeds) {
            t.seed = seed;
            work.push_back({s, t, c});
        }
    }

    std::vector<SweepRow> rows(work.size());
    std::vector<std::exception_ptr> errors(work.size());
    const long n = static_cast<long>(work.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (long i = 0; i < n; ++i) {
        try {
            rows[i] = evaluate_row(work[i].settings, work[i].task, work[i].config_id);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

const char* const kSweepCsvHeader =
    "config_id,seed,tau,k,n_draft,nfe_main,policy,mask_fraction,iou,dissim_ratio,mse_edit,mse_unedit,"
    "interactions_total,baseline_total,speedup";

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.config_id << ',' << r.seed << ',' << format_number(r.tau) << ',' << r.k << ',' << r.n_draft << ','
            << r.nfe_main << ',' << r.policy << ',' << format_number(r.mask_fraction) << ',' << format_number(r.iou)
            << ',' << format_number(r.dissim_ratio) << ',' << format_number(r.mse_edit) << ','
            << format_number(r.mse_unedit) << ',' << format_number(r.interactions_total) << ','
            << format_number(r.baseline_total) << ',' << format_number(r.speedup) << '\n';
    }
    return out.str();
}

nlohmann::ordered_json sweep_json(const std::vector<SweepRow>& rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["config_id"] = r.config_id;
        j["seed"] = r.seed;
        j["tau"] = r.tau;
        j["k"] = r.k;
        j["n_draft"] = r.n_draft;
        j["nfe_main"] = r.nfe_main;
        j["policy"] = r.policy;
        j["mask_fraction"] = r.mask_fraction;
        j["iou"] = r.iou;
        j["dissim_ratio"] = r.dissim_ratio;
        j["mse_edit"] = r.mse_edit;
        j["mse_unedit"] = r.mse_unedit;
        j["interactions_total"] = r.interactions_total;
        j["baseline_total"] = r.baseline_total;
        j["speedup"] = r.speedup;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<std::string> monotonicity_violations(const std::vector<SweepRow>& rows) {
    std::vector<std::string> out;
    auto describe = [](const SweepRow& a, const SweepRow& b, const char* rule) {
        return std::string(rule) + ": config " + std::to_string(a.config_id) + " vs " + std::to_string(b.config_id) +
               " seed " + std::to_string(a.seed) + " speedups " + format_number(a.speedup) + " / " +
               format_number(b.speedup);
    };
    // Group rows that agree on everything except tau, then on everything except k.
    std::map<std::tuple<std::uint64_t, std::size_t, int, int, std::string, double, double>, std::vector<const SweepRow*>>
        by_tau;
    std::map<std::tuple<std::uint64_t, double, int, int, std::string, double, double>, std::vector<const SweepRow*>>
        by_k;
    for (const auto& r : rows) {
        by_tau[{r.seed, r.k, r.n_draft, r.nfe_main, r.policy, r.mask_fraction, r.sigma_e}].push_back(&r);
        by_k[{r.seed, r.tau, r.n_draft, r.nfe_main, r.policy, r.mask_fraction, r.sigma_e}].push_back(&r);
    }
    for (const auto& [key, group] : by_tau) {
        for (const SweepRow* a : group) {
            for (const SweepRow* b : group) {
                if (a->tau < b->tau && b->speedup < a->speedup) out.push_back(describe(*a, *b, "tau"));
            }
        }
    }
    for (const auto& [key, group] : by_k) {
        for (const SweepRow* a : group) {
            for (const SweepRow* b : group) {
                if (a->k < b->k && a->speedup > b->speedup) out.push_back(describe(*a, *b, "k"));
            }
        }
    }
    return out;
}

}  // namespace specedit
