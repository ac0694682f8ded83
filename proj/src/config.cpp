#include "specedit/config.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "specedit/errors.hpp"

namespace specedit {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

// Reads the keys of one JSON object and rejects anything it was not asked for.
class Block {
public:
    Block(const ojson& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) config_error("'" + path_ + "' must be an object");
    }

    bool has(const char* key) const { return j_.contains(key); }
    std::string field(const char* key) const { return path_ + "." + key; }

    const ojson* raw(const char* key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const char* key, double& out) {
        if (const ojson* v = raw(key)) {
            if (!v->is_number()) config_error("'" + field(key) + "' must be a number");
            out = v->get<double>();
            if (!std::isfinite(out)) config_error("'" + field(key) + "' must be finite");
        }
    }

    template <class Int>
    void integer(const char* key, Int& out) {
        if (const ojson* v = raw(key)) {
            if (!v->is_number_integer()) config_error("'" + field(key) + "' must be an integer");
            if (v->is_number_unsigned()) {
                out = static_cast<Int>(v->get<std::uint64_t>());
            } else {
                const std::int64_t x = v->get<std::int64_t>();
                if (x < 0) config_error("'" + field(key) + "' must be non-negative");
                out = static_cast<Int>(x);
            }
        }
    }

    void boolean(const char* key, bool& out) {
        if (const ojson* v = raw(key)) {
            if (!v->is_boolean()) config_error("'" + field(key) + "' must be true or false");
            out = v->get<bool>();
        }
    }

    bool string(const char* key, std::string& out) {
        if (const ojson* v = raw(key)) {
            if (!v->is_string()) config_error("'" + field(key) + "' must be a string");
            out = v->get<std::string>();
            return true;
        }
        return false;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) config_error("unknown key '" + path_ + "." + it.key() + "'");
        }
    }

private:
    const ojson& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<std::uint64_t> parse_seed_list(const ojson& v, const std::string& field) {
    std::vector<std::uint64_t> out;
    if (v.is_number_unsigned()) {
        const auto n = v.get<std::uint64_t>();
        if (n == 0 || n > 100000) config_error("'" + field + "' count must be in 1..100000");
        for (std::uint64_t i = 0; i < n; ++i) out.push_back(i);
        return out;
    }
    if (!v.is_array()) config_error("'" + field + "' must be a seed count or an array of seeds");
    for (const auto& s : v) {
        if (!s.is_number_unsigned()) config_error("'" + field + "' entries must be non-negative integers");
        out.push_back(s.get<std::uint64_t>());
    }
    if (out.empty()) throw Error(ErrorCode::EmptyAxis, "'" + field + "' is empty");
    return out;
}

template <class Enum, std::size_t N>
Enum parse_enum(const std::string& value, const std::string& field, const std::pair<const char*, Enum> (&table)[N]) {
    std::string options;
    for (const auto& [name, e] : table) {
        if (value == name) return e;
        options += options.empty() ? name : std::string(", ") + name;
    }
    config_error("'" + field + "' must be one of " + options + " (got '" + value + "')");
}

constexpr std::pair<const char*, SigmaMode> kSigmaModes[] = {{"zero", SigmaMode::Zero}, {"ddpm", SigmaMode::Ddpm}};
constexpr std::pair<const char*, Normalization> kNormalizations[] = {{"minmax", Normalization::MinMax},
                                                                     {"percentile", Normalization::Percentile}};
constexpr std::pair<const char*, VerifyReference> kReferences[] = {{"restored", VerifyReference::Restored},
                                                                   {"full", VerifyReference::Full}};
constexpr std::pair<const char*, TaskKind> kTaskKinds[] = {{"synthetic", TaskKind::Synthetic},
                                                           {"adversarial", TaskKind::Adversarial}};
constexpr std::pair<const char*, MaskShape> kMasks[] = {
    {"rect", MaskShape::Rect}, {"disk", MaskShape::Disk}, {"multiblob", MaskShape::MultiBlob}};
constexpr std::pair<const char*, EditKind> kEdits[] = {
    {"recolor", EditKind::Recolor}, {"texture-phase", EditKind::TexturePhase}, {"mean-shift", EditKind::MeanShift}};

template <class Enum, std::size_t N>
const char* enum_name(Enum e, const std::pair<const char*, Enum> (&table)[N]) {
    for (const auto& [name, v] : table) {
        if (v == e) return name;
    }
    return "unknown";
}

void parse_schedule(const ojson& j, ScheduleConfig& s) {
    Block b(j, "schedule");
    b.integer("T", s.steps);
    b.number("alpha_bar_start", s.alpha_bar_start);
    b.number("alpha_bar_end", s.alpha_bar_end);
    std::string mode;
    if (b.string("sigma_mode", mode)) s.sigma_mode = parse_enum(mode, "schedule.sigma_mode", kSigmaModes);
    b.finish();
}

void parse_draft(const ojson& j, DraftConfig& d) {
    Block b(j, "draft");
    b.integer("s_draft", d.s_draft);
    b.integer("n_draft", d.n_draft);
    b.integer("levels", d.levels);
    b.number("tau", d.tau);
    b.number("constant_tolerance", d.constant_tolerance);
    std::string s;
    if (b.string("normalization", s)) d.normalization = parse_enum(s, "draft.normalization", kNormalizations);
    if (b.string("reference", s)) d.reference = parse_enum(s, "draft.reference", kReferences);
    b.finish();
}

void parse_scheduler(const ojson& j, RunConfig& cfg) {
    Block b(j, "scheduler");
    b.integer("k", cfg.pipeline.k);
    b.number("sigma_e", cfg.pipeline.main.sigma_e);
    b.integer("nfe_main", cfg.pipeline.main.nfe_main);
    b.integer("entry_step", cfg.pipeline.main.entry_step);
    std::string policy;
    if (b.string("policy", policy)) {
        try {
            cfg.selector = parse_selector(policy);
        } catch (const Error&) {
            config_error("'scheduler.policy' must be one of specedit, semantic-only, uniform-only, edge, variance (got '" +
                         policy + "')");
        }
    }
    b.finish();
}

void parse_task(const ojson& j, TaskParams& t) {
    Block b(j, "task");
    std::string s;
    if (b.string("kind", s)) t.kind = parse_enum(s, "task.kind", kTaskKinds);
    b.integer("height", t.height);
    b.integer("width", t.width);
    b.integer("channels", t.channels);
    if (b.string("mask", s)) t.mask = parse_enum(s, "task.mask", kMasks);
    b.integer("blobs", t.blobs);
    b.number("mask_fraction", t.mask_fraction);
    if (b.string("edit", s)) t.edit = parse_enum(s, "task.edit", kEdits);
    b.number("delta", t.delta);
    b.number("strength", t.strength);
    b.number("prior_var", t.prior_var);
    b.finish();
}

void parse_seeds(const ojson& j, RunConfig& cfg) {
    Block b(j, "seeds");
    b.integer("draft_seed", cfg.seeds.draft_seed);
    b.integer("main_seed", cfg.seeds.main_seed);
    b.integer("expand_seed", cfg.seeds.expand_seed);
    b.integer("task_seed", cfg.task.seed);
    b.finish();
}

void parse_cost(const ojson& j, RunConfig& cfg) {
    Block b(j, "cost");
    b.number("a", cfg.cost.quad_coeff);
    b.number("b", cfg.cost.lin_coeff);
    b.integer("text_tokens", cfg.cost.text_tokens);
    b.integer("nfe_baseline", cfg.pipeline.nfe_baseline);
    b.finish();
}

void parse_output(const ojson& j, OutputConfig& o) {
    Block b(j, "output");
    b.string("directory", o.directory);
    b.boolean("emit_heatmap", o.emit_heatmap);
    b.boolean("emit_json", o.emit_json);
    b.finish();
}

void parse_sweep(const ojson& j, SweepSpec& s) {
    Block b(j, "sweep");
    if (const ojson* axes = b.raw("axes")) {
        if (!axes->is_object()) config_error("'sweep.axes' must be an object of name -> values");
        s.axes.clear();
        for (auto it = axes->begin(); it != axes->end(); ++it) {
            const std::string field = "sweep.axes." + it.key();
            if (!is_sweep_axis(it.key())) config_error("unknown sweep axis '" + it.key() + "'");
            if (!it->is_array()) config_error("'" + field + "' must be an array");
            SweepAxis axis{it.key(), {}};
            for (const auto& v : *it) {
                if (v.is_number()) {
                    axis.values.emplace_back(v.get<double>());
                } else if (v.is_string()) {
                    axis.values.emplace_back(v.get<std::string>());
                } else {
                    config_error("'" + field + "' values must be numbers or strings");
                }
            }
            if (axis.values.empty()) throw Error(ErrorCode::EmptyAxis, "sweep axis '" + it.key() + "' has no values");
            s.axes.push_back(std::move(axis));
        }
    }
    if (const ojson* seeds = b.raw("seeds")) s.seeds = parse_seed_list(*seeds, "sweep.seeds");
    b.finish();
}

void parse_bench(const ojson& j, RunConfig& cfg) {
    Block b(j, "bench");
    if (const ojson* seeds = b.raw("seeds")) cfg.bench_seeds = parse_seed_list(*seeds, "bench.seeds");
    b.finish();
}

void parse_compare(const ojson& j, CompareSpec& c) {
    Block b(j, "compare");
    if (const ojson* seeds = b.raw("seeds")) c.seeds = parse_seed_list(*seeds, "compare.seeds");
    if (const ojson* budget = b.raw("budget")) {
        if (budget->is_string() && budget->get<std::string>() == "matched") {
            c.budget.reset();
        } else if (budget->is_number()) {
            c.budget = budget->get<double>();
        } else {
            config_error("'compare.budget' must be \"matched\" or a fraction in (0, 1]");
        }
    }
    b.finish();
}

[[noreturn]] void shape_error(const std::string& field, std::size_t value, std::size_t divisor) {
    throw Error(ErrorCode::NonDivisibleShape, "'" + field + "' = " + std::to_string(value) +
                                                  " is not divisible by " + std::to_string(divisor));
}

}  // namespace

const char* sigma_mode_name(SigmaMode m) { return enum_name(m, kSigmaModes); }

NoiseSchedule ScheduleConfig::build() const {
    return NoiseSchedule::linear_alpha_bar(steps, alpha_bar_start, alpha_bar_end, sigma_mode);
}

void RunConfig::validate() const {
    if (schedule.steps < 1 || schedule.steps > 100000) config_error("'schedule.T' must be in 1..100000");
    if (!(schedule.alpha_bar_start < 1.0 && schedule.alpha_bar_start > 0.0)) {
        config_error("'schedule.alpha_bar_start' must lie in (0, 1)");
    }
    if (schedule.steps > 1 && !(schedule.alpha_bar_end > 0.0 && schedule.alpha_bar_end < schedule.alpha_bar_start)) {
        config_error("'schedule.alpha_bar_end' must lie in (0, alpha_bar_start)");
    }

    const auto& d = pipeline.draft;
    if (d.s_draft != 8 && d.s_draft != 16 && d.s_draft != 32) config_error("'draft.s_draft' must be 8, 16 or 32");
    if (d.n_draft < 1 || d.n_draft > schedule.steps) config_error("'draft.n_draft' must be in 1..T");
    if (d.levels < 1 || d.levels > 6) config_error("'draft.levels' must be in 1..6");
    if (!(d.tau >= 0.0 && d.tau <= 1.0)) config_error("'draft.tau' must lie in [0, 1]");
    if (!(d.constant_tolerance >= 0.0)) config_error("'draft.constant_tolerance' must be >= 0");

    const auto& m = pipeline.main;
    if (pipeline.k < 1) config_error("'scheduler.k' must be >= 1");
    if (!(m.sigma_e >= 0.0)) config_error("'scheduler.sigma_e' must be >= 0");
    if (m.entry_step < 0 || m.entry_step > schedule.steps) config_error("'scheduler.entry_step' must be in 0..T");
    const int entry = m.entry_step == 0 ? schedule.steps : m.entry_step;
    if (m.nfe_main < 1 || m.nfe_main > entry) config_error("'scheduler.nfe_main' must be in 1..entry_step");

    if (task.channels < 1) config_error("'task.channels' must be >= 1");
    if (task.height < 1) config_error("'task.height' must be positive");
    if (task.width < 1) config_error("'task.width' must be positive");
    const std::size_t pyramid = std::size_t{1} << (d.levels - 1);
    const std::size_t divisor = std::lcm(std::lcm(d.s_draft, kCoarseFactor), pyramid);
    if (task.height % divisor != 0) shape_error("task.height", task.height, divisor);
    if (task.width % divisor != 0) shape_error("task.width", task.width, divisor);
    if (task.kind == TaskKind::Adversarial && (task.height < 64 || task.width < 64)) {
        config_error("'task.height' and 'task.width' must be >= 64 for the adversarial fixture");
    }
    if (!(task.mask_fraction > 0.01 && task.mask_fraction < 0.9)) config_error("'task.mask_fraction' must lie in (0.01, 0.9)");
    if (task.blobs < 1) config_error("'task.blobs' must be >= 1");
    if (!(task.strength >= 0.0 && task.strength <= 1.0)) config_error("'task.strength' must lie in [0, 1]");
    if (!(task.prior_var >= 0.0)) config_error("'task.prior_var' must be >= 0");
    if (selector == Selector::Variance && task.channels < 2) {
        config_error("'scheduler.policy' variance needs task.channels >= 2");
    }

    if (!(cost.quad_coeff > 0.0)) config_error("'cost.a' must be > 0");
    if (!(cost.lin_coeff >= 0.0)) config_error("'cost.b' must be >= 0");
    if (pipeline.nfe_baseline < 1 || pipeline.nfe_baseline > schedule.steps) {
        config_error("'cost.nfe_baseline' must be in 1..T");
    }
    if (output.directory.empty()) config_error("'output.directory' must not be empty");

    if (compare.budget && !(*compare.budget > 0.0 && *compare.budget <= 1.0)) {
        config_error("'compare.budget' must lie in (0, 1]");
    }
    if (!sweep.axes.empty()) sweep_config_count(sweep);
}

RunSettings RunConfig::settings() const {
    RunSettings s;
    s.schedule = schedule.build();
    s.pipeline = pipeline;
    s.selector = selector;
    s.cost = cost;
    s.seeds = seeds;
    return s;
}

RunConfig parse_run_config(const ojson& j) {
    RunConfig cfg;
    Block top(j, "config");
    if (const ojson* v = top.raw("schedule")) parse_schedule(*v, cfg.schedule);
    if (const ojson* v = top.raw("draft")) parse_draft(*v, cfg.pipeline.draft);
    if (const ojson* v = top.raw("scheduler")) parse_scheduler(*v, cfg);
    if (const ojson* v = top.raw("task")) parse_task(*v, cfg.task);
    if (const ojson* v = top.raw("seeds")) parse_seeds(*v, cfg);
    if (const ojson* v = top.raw("cost")) parse_cost(*v, cfg);
    if (const ojson* v = top.raw("output")) parse_output(*v, cfg.output);
    if (const ojson* v = top.raw("sweep")) parse_sweep(*v, cfg.sweep);
    if (const ojson* v = top.raw("bench")) parse_bench(*v, cfg);
    if (const ojson* v = top.raw("compare")) parse_compare(*v, cfg.compare);
    top.finish();
    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config '" + path.string() + "'");
    ojson j;
    try {
        j = ojson::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        config_error("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(j);
}

ojson run_config_to_json(const RunConfig& cfg) {
    ojson j;
    j["schedule"] = {{"T", cfg.schedule.steps},
                     {"alpha_bar_start", cfg.schedule.alpha_bar_start},
                     {"alpha_bar_end", cfg.schedule.alpha_bar_end},
                     {"sigma_mode", sigma_mode_name(cfg.schedule.sigma_mode)}};
    const auto& d = cfg.pipeline.draft;
    j["draft"] = {{"s_draft", d.s_draft},
                  {"n_draft", d.n_draft},
                  {"levels", d.levels},
                  {"tau", d.tau},
                  {"normalization", enum_name(d.normalization, kNormalizations)},
                  {"reference", enum_name(d.reference, kReferences)},
                  {"constant_tolerance", d.constant_tolerance}};
    j["scheduler"] = {{"k", cfg.pipeline.k},
                      {"sigma_e", cfg.pipeline.main.sigma_e},
                      {"nfe_main", cfg.pipeline.main.nfe_main},
                      {"entry_step", cfg.pipeline.main.entry_step},
                      {"policy", selector_name(cfg.selector)}};
    const auto& t = cfg.task;
    j["task"] = {{"kind", enum_name(t.kind, kTaskKinds)},
                 {"height", t.height},
                 {"width", t.width},
                 {"channels", t.channels},
                 {"mask", enum_name(t.mask, kMasks)},
                 {"blobs", t.blobs},
                 {"mask_fraction", t.mask_fraction},
                 {"edit", enum_name(t.edit, kEdits)},
                 {"delta", t.delta},
                 {"strength", t.strength},
                 {"prior_var", t.prior_var}};
    j["seeds"] = {{"draft_seed", cfg.seeds.draft_seed},
                  {"main_seed", cfg.seeds.main_seed},
                  {"expand_seed", cfg.seeds.expand_seed},
                  {"task_seed", cfg.task.seed}};
    j["cost"] = {{"a", cfg.cost.quad_coeff},
                 {"b", cfg.cost.lin_coeff},
                 {"text_tokens", cfg.cost.text_tokens},
                 {"nfe_baseline", cfg.pipeline.nfe_baseline}};
    j["output"] = {{"directory", cfg.output.directory},
                   {"emit_heatmap", cfg.output.emit_heatmap},
                   {"emit_json", cfg.output.emit_json}};
    return j;
}

}  // namespace specedit
