#pragma once

#include <string>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/types.hpp"

namespace traceforge {

inline constexpr const char* kCriterionIncorrectness = "incorrectness";
inline constexpr const char* kCriterionRedundancy = "redundancy";
inline constexpr const char* kCriterionIrrelevance = "irrelevance";
inline constexpr const char* kCriterionFaithfulness = "faithfulness";

struct JudgeJustification {
    int step_index = 0;
    std::string criterion;
    std::string text;
};

// Structured verdict for one trace. Counts always equal the number of
// justifications carrying the matching criterion; a reply that cannot be
// parsed into this shape yields parse_ok = false with zeroed counts.
struct JudgeReport {
    std::string trace_ref;
    int incorrect_steps = 0;
    int redundant_steps = 0;
    int irrelevant_steps = 0;
    int unfaithful_steps = 0;
    std::vector<JudgeJustification> justifications;
    bool parse_ok = false;
};

// Line-oriented text form of a trace that judge prompts embed: a trace id
// header, the question, then one line per step piece tagged with its
// 1-based step index.
std::string render_trace_for_judge(const Trace& trace, const Question& question);

// Extracts the first JSON object from raw and maps it onto a JudgeReport.
// Any schema violation (missing count, negative value, unknown criterion,
// count/justification mismatch) turns the whole reply into parse_ok=false.
JudgeReport parse_judge_report(const std::string& raw, const Trace& trace);

// True iff the verdict flags incorrectness or faithfulness, the two
// criteria that discard a trace outright.
bool is_fatal(const JudgeReport& report);

// Weighted count of the two non-fatal criteria.
double error_score(const JudgeReport& report, double w_redundant, double w_irrelevant);

// One judged trace: render, call, parse, and on a schema failure send a
// single corrective re-prompt before giving up. Raw replies are kept in
// call order for the transcript files.
struct JudgeAttempt {
    std::string trace_id;
    std::vector<std::string> raw_responses;
    JudgeReport report;
};

JudgeAttempt judge_trace(const Trace& trace, const Question& question, JudgeClient& judge);

Json judge_report_to_json(const JudgeReport& report);

}  // namespace traceforge
