#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/types.hpp"

namespace traceforge {

struct EvalRecord {
    std::string question_id;
    std::string prediction;
    std::optional<Trace> trace;  // absent only for failed records
    bool em = false;
    bool accuracy = false;
    double f1 = 0.0;
    int steps_used = 0;
    int retrievals = 0;
    bool unanswered = false;  // hit max_steps without a final answer
    bool failed = false;      // backend or retriever error; excluded from means
    std::string failure;
};

struct TypeAggregate {
    double em = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
    int n = 0;
};

// Aggregate metrics as percentages; absent when no record aggregated.
struct MetricsSummary {
    std::string dataset;
    int n = 0;
    std::optional<double> em;
    std::optional<double> accuracy;
    std::optional<double> f1;
    std::map<std::string, TypeAggregate> by_question_type;
    int failed = 0;
    int unanswered = 0;
};

struct EvalConfig {
    int max_steps = 12;  // cap on trace steps per question
    int top_k = 3;
    int workers = 1;
    std::string dataset_label;
};

// Greedy agent loop: think; stop on the final-answer marker; otherwise ask
// a sub-question, retrieve, extract a sub-answer, and repeat. Sub-questions
// are never deduplicated, so the model may reformulate after a failed
// retrieval. Hitting max_steps leaves the record unanswered with an empty
// prediction; backend errors mark it failed instead of throwing.
EvalRecord run_inference_agent(const Question& question, PolicyBackend& model, Retriever& retriever,
                               const EvalConfig& config);

std::pair<MetricsSummary, std::vector<EvalRecord>> evaluate_dataset(const std::vector<Question>& questions,
                                                                    PolicyBackend& model, Retriever& retriever,
                                                                    const EvalConfig& config);

Json eval_record_to_json(const EvalRecord& record);
Json metrics_summary_to_json(const MetricsSummary& summary);

// Per-question-type breakdown as CSV: type,n,em,accuracy,f1.
std::string by_type_csv(const MetricsSummary& summary);

}  // namespace traceforge
