#include "traceforge/backend/prompts.hpp"

#include <array>
#include <filesystem>

#include "traceforge/core/errors.hpp"
#include "traceforge/core/hash.hpp"
#include "traceforge/core/json_codec.hpp"

namespace traceforge {
namespace {

constexpr std::array<PromptAction, 4> kActions = {PromptAction::Thought, PromptAction::Subquestion,
                                                  PromptAction::AnswerExtraction, PromptAction::Judge};

const char* kThoughtBody =
    "You are solving a multi-hop question step by step.\n"
    "Continue the reasoning below with exactly one new thought.\n"
    "If the gathered evidence already determines the answer, end the thought\n"
    "with: The final answer is: <answer>\n"
    "Otherwise reason about what information is still missing.\n"
    "\n"
    "{chain}"
    "Thought:";

const char* kSubquestionBody =
    "You are solving a multi-hop question by asking one retrieval query at a time.\n"
    "Write the single sub-question whose answer the reasoning below needs next.\n"
    "If an earlier retrieval failed, you may reformulate that sub-question.\n"
    "\n"
    "{chain}"
    "Sub-question:";

const char* kAnswerBody =
    "Answer the sub-question using only the documents.\n"
    "Reply with the shortest exact answer span. If the documents do not\n"
    "contain the answer, reply exactly: not found\n"
    "\n"
    "Sub-question: {sub_question}\n"
    "{documents}"
    "Sub-answer:";

const char* kJudgeBody =
    "You are reviewing a reasoning trace for a multi-hop question.\n"
    "Count the steps that exhibit each error type:\n"
    "- incorrectness: a sub-answer or conclusion is factually wrong.\n"
    "- redundancy: a step re-derives information the trace already has.\n"
    "  Reformulating a sub-question after a failed retrieval is acceptable\n"
    "  and must not be counted as redundant.\n"
    "- irrelevance: a step neither advances toward the answer nor supports it.\n"
    "- faithfulness: a claim is not grounded in the retrieved documents.\n"
    "Reply with JSON only, in exactly this shape:\n"
    "{\"incorrectness\": 0, \"redundancy\": 0, \"irrelevance\": 0, \"faithfulness\": 0,"
    " \"justifications\": [{\"step_index\": 1, \"criterion\": \"redundancy\", \"text\": \"...\"}]}\n"
    "Counts must equal the number of justifications listed for that criterion.\n"
    "\n"
    "{trace}";

bool placeholder_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!((c >= 'a' && c <= 'z') || c == '_')) return false;
    }
    return true;
}

std::string override_file(PromptAction action) {
    switch (action) {
        case PromptAction::Thought: return "thought.txt";
        case PromptAction::Subquestion: return "subquestion.txt";
        case PromptAction::AnswerExtraction: return "answer_extraction.txt";
        case PromptAction::Judge: return "judge.txt";
    }
    throw ValidationError("unknown prompt action");
}

const char* required_slot(PromptAction action) {
    switch (action) {
        case PromptAction::Thought: return "{chain}";
        case PromptAction::Subquestion: return "{chain}";
        case PromptAction::AnswerExtraction: return "{documents}";
        case PromptAction::Judge: return "{trace}";
    }
    throw ValidationError("unknown prompt action");
}

}  // namespace

std::string to_string(PromptAction action) {
    switch (action) {
        case PromptAction::Thought: return "thought";
        case PromptAction::Subquestion: return "subquestion";
        case PromptAction::AnswerExtraction: return "answer_extraction";
        case PromptAction::Judge: return "judge";
    }
    throw ValidationError("unknown prompt action");
}

std::string render_prompt(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    out.reserve(tmpl.body.size());
    const std::string& body = tmpl.body;
    std::size_t i = 0;
    while (i < body.size()) {
        char c = body[i];
        if (c != '{') {
            out += c;
            ++i;
            continue;
        }
        std::size_t close = body.find_first_of("{}", i + 1);
        if (close == std::string::npos || body[close] == '{') {
            out += c;
            ++i;
            continue;
        }
        std::string name = body.substr(i + 1, close - i - 1);
        if (!placeholder_name(name)) {
            out += c;
            ++i;
            continue;
        }
        auto it = values.find(name);
        if (it == values.end()) {
            throw ConfigError("template '" + tmpl.id + "': no value for placeholder {" + name + "}");
        }
        out += it->second;
        i = close + 1;
    }
    return out;
}

PromptSet PromptSet::defaults() {
    std::vector<std::string> chain_exemplar = {
        "Example:\n"
        "Question: Who wrote the novel on which the film Blade Runner is based?\n"
        "Thought: I need to identify the novel the film is based on.\n"
        "Sub-question: Which novel is the film Blade Runner based on?\n"
        "Documents:\n"
        "[1] Blade Runner :: Blade Runner is based on the novel Do Androids Dream of Electric Sheep?"
        " by Philip K. Dick.\n"
        "Sub-answer: Do Androids Dream of Electric Sheep?\n"
        "Thought: The novel is known, so its author answers the question. The final answer is: Philip K. Dick"};
    std::vector<std::string> answer_exemplar = {
        "Example:\n"
        "Sub-question: In which year was the Eiffel Tower completed?\n"
        "Documents:\n"
        "[1] Eiffel Tower :: The Eiffel Tower was completed in 1889.\n"
        "Sub-answer: 1889"};
    PromptSet set;
    set.templates_[PromptAction::Thought] = {"thought-v1", PromptAction::Thought, chain_exemplar, kThoughtBody};
    set.templates_[PromptAction::Subquestion] = {"subquestion-v1", PromptAction::Subquestion, chain_exemplar,
                                                 kSubquestionBody};
    set.templates_[PromptAction::AnswerExtraction] = {"answer-v1", PromptAction::AnswerExtraction,
                                                      answer_exemplar, kAnswerBody};
    set.templates_[PromptAction::Judge] = {"judge-v1", PromptAction::Judge, {}, kJudgeBody};
    set.validate();
    return set;
}

PromptSet PromptSet::with_overrides(const std::string& dir) {
    PromptSet set = defaults();
    for (PromptAction action : kActions) {
        std::filesystem::path path = std::filesystem::path(dir) / override_file(action);
        if (!std::filesystem::exists(path)) continue;
        PromptTemplate& tmpl = set.templates_[action];
        tmpl.body = read_text_file(path.string());
        tmpl.id = to_string(action) + "-file";
    }
    set.validate();
    return set;
}

const PromptTemplate& PromptSet::for_action(PromptAction action) const {
    auto it = templates_.find(action);
    if (it == templates_.end()) throw ConfigError("no template for action " + to_string(action));
    return it->second;
}

std::string assemble_prompt(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values) {
    std::string out;
    for (const std::string& exemplar : tmpl.few_shot_examples) {
        out += exemplar;
        out += "\n\n";
    }
    out += render_prompt(tmpl, values);
    return out;
}

std::uint64_t PromptSet::content_hash() const {
    std::uint64_t h = fnv1a64("prompts");
    for (PromptAction action : kActions) {
        const PromptTemplate& t = for_action(action);
        h = fnv1a64(t.id, h);
        h = fnv1a64("\n", h);
        for (const std::string& exemplar : t.few_shot_examples) {
            h = fnv1a64(exemplar, h);
            h = fnv1a64("\n", h);
        }
        h = fnv1a64(t.body, h);
        h = fnv1a64("\n", h);
    }
    return h;
}

void PromptSet::validate() const {
    for (PromptAction action : kActions) {
        const PromptTemplate& t = for_action(action);
        if (t.body.find(required_slot(action)) == std::string::npos) {
            throw ConfigError("template '" + t.id + "' is missing the " + std::string(required_slot(action)) +
                              " placeholder");
        }
        if (action == PromptAction::AnswerExtraction && t.body.find("{sub_question}") == std::string::npos) {
            throw ConfigError("template '" + t.id + "' is missing the {sub_question} placeholder");
        }
    }
}

}  // namespace traceforge
