#pragma once
// Shared domain types for the trace-synthesis pipeline.
//
// Everything here is immutable after construction and safe to share across
// worker threads. Validating factories (make_thought, Trace::build) keep the
// structural invariants machine-checked at the boundaries.

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace traceforge {

enum class DatasetKind { TwoWiki, Musique, HotpotQa, WebQuestions, Custom };

std::string to_string(DatasetKind kind);
DatasetKind dataset_kind_from_string(const std::string& name);

struct Question {
    std::string id;
    std::string text;
    std::vector<std::string> gold_answers;      // alias set, non-empty
    std::vector<std::string> gold_sub_answers;  // may be empty for single-hop items
    DatasetKind dataset = DatasetKind::Custom;
    std::optional<std::string> question_type;
};

// Throws ValidationError if gold_answers is empty or id is blank.
void validate_question(const Question& q);

struct Document {
    std::string doc_id;
    std::string title;
    std::string text;
    double score = 0.0;
    int rank = 1;  // 1-based within one retrieval result
};

// A1: immediate reasoning statement, possibly terminal.
struct ThoughtStep {
    std::string text;
    bool is_terminal = false;
    std::optional<std::string> final_answer;
};

// A2: retrieval query, the passages it fetched, and the extracted sub-answer.
struct SubQaStep {
    std::string sub_question;
    std::vector<Document> documents;
    std::string sub_answer;
    bool answer_found = true;
};

using Step = std::variant<ThoughtStep, SubQaStep>;

// Parses the final-answer marker out of text; is_terminal and final_answer
// are always consistent with the text.
ThoughtStep make_thought(const std::string& text);

// Derives answer_found from the not-found sentinel.
SubQaStep make_subqa(std::string sub_question, std::vector<Document> documents,
                     std::string sub_answer);

inline bool is_thought(const Step& s) { return std::holds_alternative<ThoughtStep>(s); }
inline bool is_subqa(const Step& s) { return std::holds_alternative<SubQaStep>(s); }
inline const ThoughtStep& as_thought(const Step& s) { return std::get<ThoughtStep>(s); }
inline const SubQaStep& as_subqa(const Step& s) { return std::get<SubQaStep>(s); }

inline bool is_terminal_thought(const Step& s) {
    return is_thought(s) && as_thought(s).is_terminal;
}

enum class TraceSource { Mcts, Inference };

std::string to_string(TraceSource source);
TraceSource trace_source_from_string(const std::string& name);

// Root-to-terminal step sequence for one question. Steps strictly alternate
// Thought, SubQA, Thought, ... starting with a Thought; a terminal Thought
// can only appear last.
struct Trace {
    std::string trace_id;
    std::string question_id;
    std::vector<Step> steps;
    std::optional<std::string> predicted_answer;
    TraceSource source = TraceSource::Mcts;

    int length() const { return static_cast<int>(steps.size()); }

    // Validating constructor. Derives predicted_answer from a terminal final
    // step when present. Throws ValidationError naming the offending step.
    static Trace build(std::string trace_id, std::string question_id,
                       std::vector<Step> steps, TraceSource source);
};

// Alternation + terminal-placement check shared by Trace::build and the
// JSON decoder. Throws ValidationError with the step index.
void validate_trace_steps(const std::vector<Step>& steps);

}  // namespace traceforge
