#pragma once

#include <string>
#include <vector>

#include "traceforge/core/types.hpp"

namespace traceforge {

// Canonical text form of each trace piece. Training export and prompt
// assembly both build on these so the two renderings never drift.
std::string format_question(const std::string& text);
std::string format_thought(const std::string& text);
std::string format_subquestion(const std::string& text);
std::string format_documents(const std::vector<Document>& documents);
std::string format_subanswer(const std::string& text);

// All pieces of a reasoning chain in order, concatenated.
std::string render_chain(const Question& question, const std::vector<Step>& steps);

}  // namespace traceforge
