#include "traceforge/backend/ops.hpp"

#include <cctype>
#include <optional>

#include "traceforge/core/errors.hpp"
#include "traceforge/core/normalize.hpp"

namespace traceforge {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Splits "1. text", "2) text", "- text", "* text" prefixes; returns the
// rest of the line, or nullopt when the line has no list prefix.
std::optional<std::string> strip_list_prefix(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        ++i;
    } else if (i == start && i < line.size() && (line[i] == '-' || line[i] == '*')) {
        ++i;
    } else {
        return std::nullopt;
    }
    if (i >= line.size() || !std::isspace(static_cast<unsigned char>(line[i]))) return std::nullopt;
    return trim(line.substr(i));
}

void require_count(std::size_t got, int want, const char* what) {
    if (static_cast<int>(got) < want) {
        throw BackendError(std::string(what) + " backend returned " + std::to_string(got) + " of " +
                           std::to_string(want) + " completions");
    }
}

}  // namespace

std::string strip_quotes(const std::string& text) {
    std::string t = trim(text);
    while (t.size() >= 2) {
        char a = t.front();
        char b = t.back();
        bool quoted = (a == '"' && b == '"') || (a == '\'' && b == '\'') || (a == '`' && b == '`');
        if (!quoted) break;
        t = trim(t.substr(1, t.size() - 2));
    }
    return t;
}

std::vector<std::string> split_completion_items(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        if (!trim(line).empty()) lines.push_back(line);
        pos = nl + 1;
    }
    std::vector<std::string> items;
    for (const std::string& line : lines) {
        auto rest = strip_list_prefix(line);
        if (!rest) {
            items.clear();
            break;
        }
        if (!rest->empty()) items.push_back(*rest);
    }
    if (!items.empty()) return items;
    std::string whole = trim(text);
    if (whole.empty()) return {};
    return {whole};
}

std::vector<ThoughtStep> generate_thoughts(const ChainView& chain, int n, double temperature,
                                           PolicyBackend& backend) {
    if (n < 1) throw ValidationError("thought count must be at least 1");
    std::vector<std::string> raw = backend.thoughts(chain, n, temperature);
    require_count(raw.size(), n, "thought");
    std::vector<ThoughtStep> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(make_thought(trim(raw[i])));
    return out;
}

std::vector<std::string> generate_subquestions(const ChainView& chain, int n, double temperature,
                                               PolicyBackend& backend) {
    if (n < 1) throw ValidationError("sub-question count must be at least 1");
    std::vector<std::string> raw = backend.subquestions(chain, n, temperature);
    require_count(raw.size(), n, "sub-question");
    std::vector<std::string> out;
    for (const std::string& completion : raw) {
        if (trim(completion).empty()) throw ValidationError("empty generation from sub-question backend");
        for (const std::string& item : split_completion_items(completion)) {
            std::string cleaned = strip_quotes(item);
            if (!cleaned.empty()) out.push_back(cleaned);
        }
        if (static_cast<int>(out.size()) >= n) break;
    }
    if (out.empty()) throw ValidationError("empty generation from sub-question backend");
    if (static_cast<int>(out.size()) > n) out.resize(n);
    return out;
}

SubAnswer extract_subanswer(const ChainView& chain, const std::string& sub_question,
                            const std::vector<Document>& documents, double temperature,
                            PolicyBackend& backend) {
    if (trim(sub_question).empty()) throw ValidationError("empty sub-question");
    std::string answer = trim(backend.subanswer(chain, sub_question, documents, temperature));
    if (answer.empty()) throw ValidationError("empty generation from answer backend");
    return {answer, !is_not_found(answer)};
}

std::vector<Document> retrieve_documents(const std::string& query, int top_k, Retriever& retriever) {
    if (trim(query).empty()) throw ValidationError("empty retrieval query");
    if (top_k < 1) throw ValidationError("top_k must be at least 1");
    std::vector<Document> docs = retriever.retrieve(query, top_k);
    if (static_cast<int>(docs.size()) > top_k) {
        throw BackendError("retriever returned " + std::to_string(docs.size()) + " documents for top_k " +
                           std::to_string(top_k));
    }
    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (docs[i].rank != static_cast<int>(i) + 1) {
            throw BackendError("retriever ranking is not contiguous from 1");
        }
        if (i > 0 && docs[i - 1].score < docs[i].score) {
            throw BackendError("retriever scores are not non-increasing");
        }
    }
    return docs;
}

std::string judge_call(const std::string& trace_rendering, JudgeClient& judge) {
    if (trace_rendering.empty()) throw ValidationError("empty trace rendering for judge");
    return judge.judge(trace_rendering);
}

}  // namespace traceforge
