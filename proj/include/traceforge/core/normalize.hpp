#pragma once

#include <string>
#include <vector>

namespace traceforge {

// Prefix inside a thought that marks a terminal state and carries the answer.
inline constexpr const char* kFinalAnswerMarker = "The final answer is:";

// Canonical sub-answer emitted when the retrieved context does not answer
// the sub-question.
inline constexpr const char* kNotFoundSentinel = "not found";

// Lowercase, strip punctuation, drop English articles (a, an, the),
// collapse whitespace. Idempotent.
std::string normalize_answer(const std::string& text);

// normalize_answer, split on spaces. Empty input gives an empty vector.
std::vector<std::string> normalize_tokens(const std::string& text);

// True iff some gold alias normalizes to a non-empty token sequence that
// appears as a contiguous token run inside the normalized prediction.
// Aliases whose normalization is empty never match.
bool contains_gold(const std::string& prediction,
                   const std::vector<std::string>& gold_answers);

// True iff sub_answer normalizes to the not-found sentinel.
bool is_not_found(const std::string& sub_answer);

}  // namespace traceforge
