#include "traceforge/core/render.hpp"

namespace traceforge {

std::string format_question(const std::string& text) { return "Question: " + text + "\n"; }

std::string format_thought(const std::string& text) { return "Thought: " + text + "\n"; }

std::string format_subquestion(const std::string& text) { return "Sub-question: " + text + "\n"; }

std::string format_documents(const std::vector<Document>& documents) {
    std::string out = "Documents:\n";
    for (const Document& d : documents) {
        out += "[" + std::to_string(d.rank) + "] " + d.title + " :: " + d.text + "\n";
    }
    return out;
}

std::string format_subanswer(const std::string& text) { return "Sub-answer: " + text + "\n"; }

std::string render_chain(const Question& question, const std::vector<Step>& steps) {
    std::string out = format_question(question.text);
    for (const Step& step : steps) {
        if (is_thought(step)) {
            out += format_thought(as_thought(step).text);
        } else {
            const SubQaStep& sq = as_subqa(step);
            out += format_subquestion(sq.sub_question);
            out += format_documents(sq.documents);
            out += format_subanswer(sq.sub_answer);
        }
    }
    return out;
}

}  // namespace traceforge
