#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

namespace specedit {

/// step cost = quad_coeff * n^2 + lin_coeff * n, where n includes text tokens.
struct CostModel {
    double quad_coeff = 1.0;
    double lin_coeff = 64.0;
    std::int64_t text_tokens = 0;

    void validate() const;
};

/// Raw token counts accumulated during a run.
struct CostLedger {
    std::int64_t fine_tokens = 0;      // tokens of one full-resolution step
    int baseline_steps = 0;            // NFE of the full-resolution reference
    std::int64_t draft_tokens = 0;     // tokens of one draft step
    int draft_steps = 0;
    std::vector<std::int64_t> main_tokens;  // N_mix per selective step
};

struct CostSummary {
    double draft_cost = 0.0;
    std::vector<double> main_costs;
    double specedit_total = 0.0;
    double baseline_total = 0.0;
    double speedup = 0.0;
};

double step_cost(std::int64_t n_tokens, const CostModel& m);

/// baseline = baseline_steps * step_cost(fine); specedit = draft + sum of main steps.
CostSummary pipeline_cost(const CostLedger& ledger, const CostModel& m);

/// {"draft_interactions", "main_interactions_per_step", "total", "baseline_total",
///  "flops_speedup"} plus the raw counts and the cost model.
nlohmann::ordered_json ledger_to_json(const CostLedger& ledger, const CostModel& m);

/// Integral doubles become JSON integers; everything else stays a float.
nlohmann::ordered_json json_number(double v);

}  // namespace specedit
