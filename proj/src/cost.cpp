#include "specedit/cost.hpp"

#include <cmath>

#include "specedit/errors.hpp"

namespace specedit {

void CostModel::validate() const {
    if (!(quad_coeff > 0.0)) throw Error(ErrorCode::InvalidArgument, "cost quad_coeff must be > 0");
    if (!(lin_coeff >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cost lin_coeff must be >= 0");
    if (text_tokens < 0) throw Error(ErrorCode::InvalidArgument, "text_tokens must be >= 0");
}

double step_cost(std::int64_t n_tokens, const CostModel& m) {
    if (n_tokens < 1) throw Error(ErrorCode::InvalidArgument, "step_cost needs n >= 1");
    const double n = static_cast<double>(n_tokens);
    return m.quad_coeff * n * n + m.lin_coeff * n;
}

CostSummary pipeline_cost(const CostLedger& ledger, const CostModel& m) {
    m.validate();
    if (ledger.fine_tokens < 1 || ledger.baseline_steps < 1 || ledger.main_tokens.empty()) {
        throw Error(ErrorCode::IncompleteLedger, "ledger lacks baseline or main-stage entries");
    }
    CostSummary s;
    if (ledger.draft_steps > 0) {
        s.draft_cost = ledger.draft_steps * step_cost(ledger.draft_tokens + m.text_tokens, m);
    }
    s.specedit_total = s.draft_cost;
    s.main_costs.reserve(ledger.main_tokens.size());
    for (auto n : ledger.main_tokens) {
        s.main_costs.push_back(step_cost(n + m.text_tokens, m));
        s.specedit_total += s.main_costs.back();
    }
    s.baseline_total = ledger.baseline_steps * step_cost(ledger.fine_tokens + m.text_tokens, m);
    s.speedup = s.baseline_total / s.specedit_total;
    return s;
}

nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v) && std::abs(v) < 9.0e15 && v == std::floor(v)) {
        return static_cast<std::int64_t>(v);
    }
    return v;
}

nlohmann::ordered_json ledger_to_json(const CostLedger& ledger, const CostModel& m) {
    const auto s = pipeline_cost(ledger, m);
    nlohmann::ordered_json j;
    j["draft_interactions"] = json_number(s.draft_cost);
    auto per_step = nlohmann::ordered_json::array();
    for (double c : s.main_costs) per_step.push_back(json_number(c));
    j["main_interactions_per_step"] = per_step;
    j["total"] = json_number(s.specedit_total);
    j["baseline_total"] = json_number(s.baseline_total);
    j["flops_speedup"] = s.speedup;
    j["tokens"] = {
        {"fine", ledger.fine_tokens},
        {"baseline_steps", ledger.baseline_steps},
        {"draft", ledger.draft_tokens},
        {"draft_steps", ledger.draft_steps},
        {"main_per_step", ledger.main_tokens},
    };
    j["cost_model"] = {{"a", m.quad_coeff}, {"b", m.lin_coeff}, {"text_tokens", m.text_tokens}};
    return j;
}

}  // namespace specedit
