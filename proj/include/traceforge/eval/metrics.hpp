#pragma once

#include <string>
#include <vector>

namespace traceforge {

// True iff the normalized prediction equals some normalized gold alias.
bool exact_match(const std::string& prediction, const std::vector<std::string>& gold_answers);

// True iff some gold alias is contained in the prediction as a
// contiguous normalized token run.
bool accuracy_contains(const std::string& prediction, const std::vector<std::string>& gold_answers);

// Max over gold aliases of the harmonic mean of token precision and
// recall on normalized token multisets; 0 when either side is empty.
double token_f1(const std::string& prediction, const std::vector<std::string>& gold_answers);

}  // namespace traceforge
