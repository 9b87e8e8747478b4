#include "traceforge/core/types.hpp"

#include "traceforge/core/errors.hpp"
#include "traceforge/core/normalize.hpp"

#include <cctype>

namespace traceforge {

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::TwoWiki: return "2wiki";
        case DatasetKind::Musique: return "musique";
        case DatasetKind::HotpotQa: return "hotpotqa";
        case DatasetKind::WebQuestions: return "webquestions";
        case DatasetKind::Custom: return "custom";
    }
    return "custom";
}

DatasetKind dataset_kind_from_string(const std::string& name) {
    if (name == "2wiki") return DatasetKind::TwoWiki;
    if (name == "musique") return DatasetKind::Musique;
    if (name == "hotpotqa") return DatasetKind::HotpotQa;
    if (name == "webquestions") return DatasetKind::WebQuestions;
    if (name == "custom") return DatasetKind::Custom;
    throw ValidationError("unknown dataset kind: " + name);
}

void validate_question(const Question& q) {
    if (q.id.empty()) throw ValidationError("question id is empty");
    if (q.gold_answers.empty()) {
        throw ValidationError("question " + q.id + " has no gold answers");
    }
}

namespace {

std::string trim(const std::string& s) {
    size_t b = 0;
    size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

ThoughtStep make_thought(const std::string& text) {
    ThoughtStep step;
    step.text = text;
    const size_t pos = text.find(kFinalAnswerMarker);
    if (pos != std::string::npos) {
        step.is_terminal = true;
        step.final_answer = trim(text.substr(pos + std::string(kFinalAnswerMarker).size()));
    }
    return step;
}

SubQaStep make_subqa(std::string sub_question, std::vector<Document> documents,
                     std::string sub_answer) {
    SubQaStep step;
    step.sub_question = std::move(sub_question);
    step.documents = std::move(documents);
    step.answer_found = !is_not_found(sub_answer);
    step.sub_answer = std::move(sub_answer);
    return step;
}

std::string to_string(TraceSource source) {
    return source == TraceSource::Mcts ? "mcts" : "inference";
}

TraceSource trace_source_from_string(const std::string& name) {
    if (name == "mcts") return TraceSource::Mcts;
    if (name == "inference") return TraceSource::Inference;
    throw ValidationError("unknown trace source: " + name);
}

void validate_trace_steps(const std::vector<Step>& steps) {
    for (size_t i = 0; i < steps.size(); ++i) {
        const bool want_thought = (i % 2 == 0);
        if (want_thought != is_thought(steps[i])) {
            throw ValidationError("trace step " + std::to_string(i) +
                                  " breaks thought/subqa alternation");
        }
        if (is_terminal_thought(steps[i]) && i + 1 != steps.size()) {
            throw ValidationError("trace step " + std::to_string(i) +
                                  " is a terminal thought but not the last step");
        }
        if (is_thought(steps[i])) {
            const auto& t = as_thought(steps[i]);
            const bool has_marker = t.text.find(kFinalAnswerMarker) != std::string::npos;
            if (t.is_terminal != has_marker || t.is_terminal != t.final_answer.has_value()) {
                throw ValidationError("trace step " + std::to_string(i) +
                                      " has inconsistent terminal marker state");
            }
        }
    }
}

Trace Trace::build(std::string trace_id, std::string question_id,
                   std::vector<Step> steps, TraceSource source) {
    validate_trace_steps(steps);
    Trace trace;
    trace.trace_id = std::move(trace_id);
    trace.question_id = std::move(question_id);
    trace.source = source;
    if (!steps.empty() && is_terminal_thought(steps.back())) {
        trace.predicted_answer = as_thought(steps.back()).final_answer;
    }
    trace.steps = std::move(steps);
    return trace;
}

}  // namespace traceforge
