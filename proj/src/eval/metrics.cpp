#include "traceforge/eval/metrics.hpp"

#include <algorithm>
#include <map>

#include "traceforge/core/normalize.hpp"

namespace traceforge {

bool exact_match(const std::string& prediction, const std::vector<std::string>& gold_answers) {
    std::string p = normalize_answer(prediction);
    if (p.empty()) return false;
    for (const std::string& gold : gold_answers) {
        if (p == normalize_answer(gold)) return true;
    }
    return false;
}

bool accuracy_contains(const std::string& prediction, const std::vector<std::string>& gold_answers) {
    return contains_gold(prediction, gold_answers);
}

double token_f1(const std::string& prediction, const std::vector<std::string>& gold_answers) {
    std::vector<std::string> pred_tokens = normalize_tokens(prediction);
    if (pred_tokens.empty()) return 0.0;
    std::map<std::string, int> pred_counts;
    for (const std::string& t : pred_tokens) ++pred_counts[t];

    double best = 0.0;
    for (const std::string& gold : gold_answers) {
        std::vector<std::string> gold_tokens = normalize_tokens(gold);
        if (gold_tokens.empty()) continue;
        std::map<std::string, int> gold_counts;
        for (const std::string& t : gold_tokens) ++gold_counts[t];
        int overlap = 0;
        for (const auto& [token, count] : gold_counts) {
            auto it = pred_counts.find(token);
            if (it != pred_counts.end()) overlap += std::min(count, it->second);
        }
        if (overlap == 0) continue;
        double precision = static_cast<double>(overlap) / static_cast<double>(pred_tokens.size());
        double recall = static_cast<double>(overlap) / static_cast<double>(gold_tokens.size());
        best = std::max(best, 2.0 * precision * recall / (precision + recall));
    }
    return best;
}

}  // namespace traceforge
