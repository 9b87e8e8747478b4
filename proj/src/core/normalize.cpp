#include "traceforge/core/normalize.hpp"

#include <cctype>
#include <sstream>

namespace traceforge {

namespace {

bool is_article(const std::string& tok) {
    return tok == "a" || tok == "an" || tok == "the";
}

}  // namespace

std::string normalize_answer(const std::string& text) {
    std::string lowered;
    lowered.reserve(text.size());
    for (unsigned char c : text) {
        if (std::ispunct(c)) continue;
        lowered.push_back(static_cast<char>(std::tolower(c)));
    }

    std::istringstream in(lowered);
    std::string tok;
    std::string out;
    while (in >> tok) {
        if (is_article(tok)) continue;
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

std::vector<std::string> normalize_tokens(const std::string& text) {
    std::vector<std::string> toks;
    std::istringstream in(normalize_answer(text));
    std::string tok;
    while (in >> tok) toks.push_back(tok);
    return toks;
}

namespace {

bool contains_run(const std::vector<std::string>& haystack,
                  const std::vector<std::string>& needle) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    for (size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        bool match = true;
        for (size_t j = 0; j < needle.size(); ++j) {
            if (haystack[i + j] != needle[j]) {
                match = false;
                break;
            }
        }
        if (match) return true;
    }
    return false;
}

}  // namespace

bool contains_gold(const std::string& prediction,
                   const std::vector<std::string>& gold_answers) {
    const auto pred_toks = normalize_tokens(prediction);
    for (const auto& gold : gold_answers) {
        if (contains_run(pred_toks, normalize_tokens(gold))) return true;
    }
    return false;
}

bool is_not_found(const std::string& sub_answer) {
    return normalize_answer(sub_answer) == kNotFoundSentinel;
}

}  // namespace traceforge
