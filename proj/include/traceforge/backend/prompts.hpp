#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace traceforge {

enum class PromptAction { Thought, Subquestion, AnswerExtraction, Judge };

std::string to_string(PromptAction action);

struct PromptTemplate {
    std::string id;
    PromptAction action = PromptAction::Thought;
    std::vector<std::string> few_shot_examples;
    std::string body;  // literal text with {placeholder} slots
};

// Substitutes {name} slots from values. A braced span that looks like a
// placeholder (lowercase and underscores only) but has no value is an
// error; anything else in braces is kept literal, so JSON examples in
// template bodies pass through untouched.
std::string render_prompt(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values);

// Few-shot exemplars joined by blank lines, then the rendered body.
std::string assemble_prompt(const PromptTemplate& tmpl, const std::map<std::string, std::string>& values);

// The four templates the pipeline sends, keyed by action.
class PromptSet {
public:
    static PromptSet defaults();

    // Defaults with any of thought.txt, subquestion.txt,
    // answer_extraction.txt, judge.txt in dir replacing the body.
    static PromptSet with_overrides(const std::string& dir);

    const PromptTemplate& for_action(PromptAction action) const;

    // Stable digest of all ids and bodies, recorded in run manifests.
    std::uint64_t content_hash() const;

    // Throws if any template lacks the slots its action requires.
    void validate() const;

private:
    std::map<PromptAction, PromptTemplate> templates_;
};

}  // namespace traceforge
