#include "traceforge/filter/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "traceforge/core/errors.hpp"
#include "traceforge/core/normalize.hpp"
#include "traceforge/util/parallel.hpp"

namespace traceforge {

std::string to_string(SelectionMode mode) {
    switch (mode) {
        case SelectionMode::SP: return "SP";
        case SelectionMode::SP_AV: return "SP_AV";
        case SelectionMode::SP_AV_LJ: return "SP_AV_LJ";
    }
    throw ValidationError("unknown selection mode");
}

SelectionMode selection_mode_from_string(const std::string& name) {
    if (name == "SP") return SelectionMode::SP;
    if (name == "SP_AV") return SelectionMode::SP_AV;
    if (name == "SP_AV_LJ") return SelectionMode::SP_AV_LJ;
    throw ConfigError("unknown selection mode '" + name + "' (expected SP, SP_AV, or SP_AV_LJ)");
}

double subanswer_recall(const Trace& trace, const std::vector<std::string>& gold_sub_answers) {
    if (gold_sub_answers.empty()) return 1.0;
    std::string joined;
    for (const Step& step : trace.steps) {
        if (!is_subqa(step)) continue;
        if (!joined.empty()) joined += " ";
        joined += as_subqa(step).sub_answer;
    }
    int found = 0;
    for (const std::string& gold : gold_sub_answers) {
        if (contains_gold(joined, {gold})) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(gold_sub_answers.size());
}

std::vector<Trace> stage1_filter(const std::vector<Trace>& traces,
                                 const std::vector<std::string>& gold_sub_answers) {
    std::vector<Trace> survivors;
    for (const Trace& t : traces) {
        if (subanswer_recall(t, gold_sub_answers) == 1.0) survivors.push_back(t);
    }
    return survivors;
}

std::optional<Trace> select_optimal(const std::vector<std::pair<Trace, double>>& scored) {
    const std::pair<Trace, double>* best = nullptr;
    for (const auto& entry : scored) {
        if (!std::isfinite(entry.second)) throw ValidationError("non-finite error score for " + entry.first.trace_id);
        if (best == nullptr) {
            best = &entry;
            continue;
        }
        if (entry.second != best->second) {
            if (entry.second < best->second) best = &entry;
            continue;
        }
        if (entry.first.length() != best->first.length()) {
            if (entry.first.length() < best->first.length()) best = &entry;
            continue;
        }
        if (entry.first.trace_id < best->first.trace_id) best = &entry;
    }
    if (best == nullptr) return std::nullopt;
    return best->first;
}

FilterOutcome run_filter_pipeline(const std::vector<Trace>& candidates, const Question& question,
                                  const FilterConfig& config, JudgeClient* judge) {
    for (const Trace& t : candidates) {
        if (t.question_id != question.id) {
            throw ValidationError("trace " + t.trace_id + " does not belong to question " + question.id);
        }
    }
    FilterOutcome out;
    out.question_id = question.id;
    out.selection_mode = config.mode;
    out.candidates_in = static_cast<int>(candidates.size());

    std::vector<Trace> pool =
        config.mode == SelectionMode::SP ? candidates : stage1_filter(candidates, question.gold_sub_answers);
    out.survivors_stage1 = static_cast<int>(pool.size());
    for (const Trace& t : pool) out.stage1_ids.push_back(t.trace_id);

    std::vector<std::pair<Trace, double>> scored;
    if (config.mode == SelectionMode::SP_AV_LJ) {
        if (judge == nullptr) throw ConfigError("SP_AV_LJ mode requires a judge backend");
        std::vector<JudgeAttempt> attempts(pool.size());
        try {
            parallel_for(pool.size(), config.judge_workers,
                         [&](std::size_t i) { attempts[i] = judge_trace(pool[i], question, *judge); });
        } catch (const BackendError& e) {
            out.failed = true;
            out.failure = e.what();
            out.survivors_stage2 = 0;
            return out;
        }
        out.judge_attempts = std::move(attempts);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const JudgeReport& report = out.judge_attempts[i].report;
            if (!report.parse_ok || is_fatal(report)) continue;
            scored.emplace_back(pool[i], error_score(report, config.w_redundant, config.w_irrelevant));
            out.stage2_ids.push_back(pool[i].trace_id);
        }
        out.survivors_stage2 = static_cast<int>(scored.size());
    } else {
        for (const Trace& t : pool) scored.emplace_back(t, 0.0);
        out.survivors_stage2 = out.survivors_stage1;
        out.stage2_ids = out.stage1_ids;
    }

    out.selected = select_optimal(scored);
    if (out.selected) {
        for (const auto& entry : scored) {
            if (entry.first.trace_id == out.selected->trace_id) {
                out.error_score_of_selected = entry.second;
                break;
            }
        }
    }
    return out;
}

Json filter_outcome_to_json(const FilterOutcome& outcome) {
    Json j;
    j["question_id"] = outcome.question_id;
    j["selection_mode"] = to_string(outcome.selection_mode);
    j["candidates_in"] = outcome.candidates_in;
    j["survivors_stage1"] = outcome.survivors_stage1;
    j["survivors_stage2"] = outcome.survivors_stage2;
    if (outcome.selected) {
        j["selected_trace_id"] = outcome.selected->trace_id;
    } else {
        j["selected_trace_id"] = nullptr;
    }
    if (outcome.error_score_of_selected) {
        j["error_score_of_selected"] = *outcome.error_score_of_selected;
    } else {
        j["error_score_of_selected"] = nullptr;
    }
    j["failed"] = outcome.failed;
    if (outcome.failed) j["failure"] = outcome.failure;
    j["stage1_ids"] = outcome.stage1_ids;
    j["stage2_ids"] = outcome.stage2_ids;
    Json reports = Json::array();
    for (const JudgeAttempt& attempt : outcome.judge_attempts) {
        reports.push_back(judge_report_to_json(attempt.report));
    }
    j["judge_reports"] = std::move(reports);
    return j;
}

}  // namespace traceforge
