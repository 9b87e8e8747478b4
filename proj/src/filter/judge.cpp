#include "traceforge/filter/judge.hpp"

#include <array>

#include "traceforge/backend/ops.hpp"
#include "traceforge/core/errors.hpp"

namespace traceforge {
namespace {

constexpr std::array<const char*, 4> kCriteria = {kCriterionIncorrectness, kCriterionRedundancy,
                                                  kCriterionIrrelevance, kCriterionFaithfulness};

std::string one_line(const std::string& text) {
    std::string out = text;
    for (char& c : out) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return out;
}

// Non-negative integer field or nullopt when absent/mistyped.
std::optional<int> count_field(const Json& j, const char* name) {
    if (!j.contains(name)) return std::nullopt;
    const Json& v = j.at(name);
    if (!v.is_number_integer()) return std::nullopt;
    int n = v.get<int>();
    if (n < 0) return std::nullopt;
    return n;
}

bool map_report(const Json& j, JudgeReport& report) {
    auto incorrect = count_field(j, kCriterionIncorrectness);
    auto redundant = count_field(j, kCriterionRedundancy);
    auto irrelevant = count_field(j, kCriterionIrrelevance);
    auto unfaithful = count_field(j, kCriterionFaithfulness);
    if (!incorrect || !redundant || !irrelevant || !unfaithful) return false;

    std::vector<JudgeJustification> justifications;
    if (j.contains("justifications")) {
        const Json& arr = j.at("justifications");
        if (!arr.is_array()) return false;
        for (const Json& e : arr) {
            if (!e.is_object() || !e.contains("step_index") || !e.contains("criterion") || !e.contains("text")) {
                return false;
            }
            if (!e.at("step_index").is_number_integer() || !e.at("criterion").is_string() ||
                !e.at("text").is_string()) {
                return false;
            }
            JudgeJustification just{e.at("step_index").get<int>(), e.at("criterion").get<std::string>(),
                                    e.at("text").get<std::string>()};
            if (just.step_index < 1) return false;
            bool known = false;
            for (const char* c : kCriteria) known = known || just.criterion == c;
            if (!known) return false;
            justifications.push_back(std::move(just));
        }
    }
    auto per_criterion = [&](const char* c) {
        int n = 0;
        for (const auto& just : justifications) {
            if (just.criterion == c) ++n;
        }
        return n;
    };
    if (per_criterion(kCriterionIncorrectness) != *incorrect) return false;
    if (per_criterion(kCriterionRedundancy) != *redundant) return false;
    if (per_criterion(kCriterionIrrelevance) != *irrelevant) return false;
    if (per_criterion(kCriterionFaithfulness) != *unfaithful) return false;

    report.incorrect_steps = *incorrect;
    report.redundant_steps = *redundant;
    report.irrelevant_steps = *irrelevant;
    report.unfaithful_steps = *unfaithful;
    report.justifications = std::move(justifications);
    report.parse_ok = true;
    return true;
}

}  // namespace

std::string render_trace_for_judge(const Trace& trace, const Question& question) {
    std::string out = "Trace: " + trace.trace_id + "\n";
    out += "Question: " + one_line(question.text) + "\n";
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        std::string idx = std::to_string(i + 1);
        const Step& step = trace.steps[i];
        if (is_thought(step)) {
            out += "Step " + idx + " [thought]: " + one_line(as_thought(step).text) + "\n";
            continue;
        }
        const SubQaStep& sq = as_subqa(step);
        out += "Step " + idx + " [sub-question]: " + one_line(sq.sub_question) + "\n";
        std::string docs;
        for (const Document& d : sq.documents) {
            if (!docs.empty()) docs += " | ";
            docs += "[" + std::to_string(d.rank) + "] " + one_line(d.title) + " :: " + one_line(d.text);
        }
        out += "Step " + idx + " [documents]: " + docs + "\n";
        out += "Step " + idx + " [sub-answer]: " + one_line(sq.sub_answer) + "\n";
    }
    return out;
}

JudgeReport parse_judge_report(const std::string& raw, const Trace& trace) {
    JudgeReport report;
    report.trace_ref = trace.trace_id;
    std::size_t open = raw.find('{');
    std::size_t close = raw.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) return report;
    Json parsed;
    try {
        parsed = Json::parse(raw.substr(open, close - open + 1));
    } catch (const Json::parse_error&) {
        return report;
    }
    if (!parsed.is_object()) return report;
    JudgeReport candidate;
    candidate.trace_ref = trace.trace_id;
    if (!map_report(parsed, candidate)) return report;
    return candidate;
}

bool is_fatal(const JudgeReport& report) {
    return report.incorrect_steps > 0 || report.unfaithful_steps > 0;
}

double error_score(const JudgeReport& report, double w_redundant, double w_irrelevant) {
    return w_redundant * report.redundant_steps + w_irrelevant * report.irrelevant_steps;
}

JudgeAttempt judge_trace(const Trace& trace, const Question& question, JudgeClient& judge) {
    JudgeAttempt attempt;
    attempt.trace_id = trace.trace_id;
    std::string rendering = render_trace_for_judge(trace, question);
    attempt.raw_responses.push_back(judge_call(rendering, judge));
    attempt.report = parse_judge_report(attempt.raw_responses.back(), trace);
    if (!attempt.report.parse_ok) {
        std::string repair = rendering +
                             "\nYour previous reply did not match the required JSON schema. "
                             "Reply again with only the JSON object.";
        attempt.raw_responses.push_back(judge_call(repair, judge));
        attempt.report = parse_judge_report(attempt.raw_responses.back(), trace);
    }
    return attempt;
}

Json judge_report_to_json(const JudgeReport& report) {
    Json j;
    j["trace_ref"] = report.trace_ref;
    j["incorrect_steps"] = report.incorrect_steps;
    j["redundant_steps"] = report.redundant_steps;
    j["irrelevant_steps"] = report.irrelevant_steps;
    j["unfaithful_steps"] = report.unfaithful_steps;
    Json justs = Json::array();
    for (const auto& just : report.justifications) {
        Json e;
        e["step_index"] = just.step_index;
        e["criterion"] = just.criterion;
        e["text"] = just.text;
        justs.push_back(std::move(e));
    }
    j["justifications"] = std::move(justs);
    j["parse_ok"] = report.parse_ok;
    return j;
}

}  // namespace traceforge
