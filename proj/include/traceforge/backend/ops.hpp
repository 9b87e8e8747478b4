#pragma once

#include <string>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/core/types.hpp"

namespace traceforge {

// Validated wrappers between the search loop and the raw backends:
// they trim and parse completions, reject malformed output, and keep
// the step invariants out of the transport layer.

// n thought steps, each completion parsed for the final-answer marker.
std::vector<ThoughtStep> generate_thoughts(const ChainView& chain, int n, double temperature,
                                           PolicyBackend& backend);

// Up to n cleaned sub-question strings. Completions holding a numbered
// or bulleted list are split into one question per item.
std::vector<std::string> generate_subquestions(const ChainView& chain, int n, double temperature,
                                               PolicyBackend& backend);

struct SubAnswer {
    std::string answer;
    bool answer_found = false;
};

// One grounded answer for sub_question; a "not found" reply comes back
// with answer_found = false.
SubAnswer extract_subanswer(const ChainView& chain, const std::string& sub_question,
                            const std::vector<Document>& documents, double temperature,
                            PolicyBackend& backend);

// top_k documents for query, ranks checked to run 1..m by descending score.
std::vector<Document> retrieve_documents(const std::string& query, int top_k, Retriever& retriever);

// Raw verdict text for a rendered trace.
std::string judge_call(const std::string& trace_rendering, JudgeClient& judge);

// Exposed for tests: list splitting and quote stripping for sub-questions.
std::vector<std::string> split_completion_items(const std::string& text);
std::string strip_quotes(const std::string& text);

}  // namespace traceforge
