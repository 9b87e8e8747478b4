#pragma once

#include <string>
#include <vector>

#include "traceforge/core/types.hpp"

namespace traceforge {

// Read-only view of the chain a generation call conditions on: the
// root question plus the steps taken so far, in order.
struct ChainView {
    const Question& question;
    const std::vector<Step>& steps;
};

// Text generator behind thought, sub-question, and sub-answer sampling.
class PolicyBackend {
public:
    virtual ~PolicyBackend() = default;

    // n raw thought completions for the next reasoning step.
    virtual std::vector<std::string> thoughts(const ChainView& chain, int n, double temperature) = 0;

    // n raw sub-question completions for the next retrieval step.
    virtual std::vector<std::string> subquestions(const ChainView& chain, int n, double temperature) = 0;

    // One answer string for sub_question grounded in documents.
    virtual std::string subanswer(const ChainView& chain, const std::string& sub_question,
                                  const std::vector<Document>& documents, double temperature) = 0;
};

// Grader that scores a rendered trace and returns its raw verdict text.
class JudgeClient {
public:
    virtual ~JudgeClient() = default;
    virtual std::string judge(const std::string& trace_rendering) = 0;
};

// Document source for sub-question queries.
class Retriever {
public:
    virtual ~Retriever() = default;
    virtual std::vector<Document> retrieve(const std::string& query, int top_k) = 0;
};

// Generator plus retriever, bundled for the search loop.
struct Policy {
    PolicyBackend& generator;
    Retriever& retriever;
};

}  // namespace traceforge
