#pragma once

#include <string>
#include <vector>

#include "traceforge/core/types.hpp"

namespace traceforge {

// Maps the published dev-split shape of each supported benchmark onto
// Question. limit ≤ 0 loads everything; otherwise the first limit items
// in file order. Gold sub-answers come from each dataset's decomposition
// annotations where present; question_type is populated when the source
// provides one. Errors cite the item index or line and the missing field.
std::vector<Question> load_dataset(const std::string& path, DatasetKind kind, int limit);

}  // namespace traceforge
