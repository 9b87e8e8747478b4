#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "traceforge/filter/judge.hpp"

namespace traceforge {

enum class SelectionMode { SP, SP_AV, SP_AV_LJ };

std::string to_string(SelectionMode mode);
SelectionMode selection_mode_from_string(const std::string& name);

// Fraction of gold sub-answers contained in the concatenation of the
// trace's sub-answer texts. An empty gold set is vacuously 1.0.
double subanswer_recall(const Trace& trace, const std::vector<std::string>& gold_sub_answers);

// Traces whose sub-answer recall is exactly 1.0, order preserved.
std::vector<Trace> stage1_filter(const std::vector<Trace>& traces,
                                 const std::vector<std::string>& gold_sub_answers);

// Minimum score, then minimum length, then lexicographically smallest
// trace id. Empty input gives nullopt. Order-independent.
std::optional<Trace> select_optimal(const std::vector<std::pair<Trace, double>>& scored);

struct FilterConfig {
    SelectionMode mode = SelectionMode::SP_AV_LJ;
    double w_redundant = 1.0;
    double w_irrelevant = 1.0;
    int judge_workers = 1;  // concurrent judge calls per question
};

struct FilterOutcome {
    std::string question_id;
    int candidates_in = 0;
    int survivors_stage1 = 0;
    int survivors_stage2 = 0;
    std::optional<Trace> selected;
    SelectionMode selection_mode = SelectionMode::SP;
    std::optional<double> error_score_of_selected;
    // Diagnostics beyond the counts: survivor ids per stage, the judge
    // material for transcript files, and the failure marker set when the
    // judge backend was unreachable (no silent fallback to unjudged).
    std::vector<std::string> stage1_ids;
    std::vector<std::string> stage2_ids;
    std::vector<JudgeAttempt> judge_attempts;
    bool failed = false;
    std::string failure;
};

// SP picks the shortest candidate outright; SP_AV applies the recall
// stage first; SP_AV_LJ additionally judges every stage-1 survivor,
// drops fatal or unparseable verdicts, and picks the minimum error
// score. The judge is only called in SP_AV_LJ mode.
FilterOutcome run_filter_pipeline(const std::vector<Trace>& candidates, const Question& question,
                                  const FilterConfig& config, JudgeClient* judge);

// Report-file record: stage counts plus survivor ids; the selected
// trace itself is referenced by id and stored in the selected-trace file.
Json filter_outcome_to_json(const FilterOutcome& outcome);

}  // namespace traceforge
