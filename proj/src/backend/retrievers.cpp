#include "traceforge/backend/retrievers.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "traceforge/backend/http.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/core/normalize.hpp"

namespace traceforge {

HttpRetriever::HttpRetriever(RetrieverConfig config) : config_(std::move(config)) {
    if (config_.endpoint_url.empty()) throw ConfigError("retriever has no endpoint_url");
}

std::vector<Document> HttpRetriever::retrieve(const std::string& query, int top_k) {
    Json body;
    body["query"] = query;
    body["top_k"] = top_k;
    PostSpec spec{config_.timeout_ms, config_.max_retries};
    Json response = http_post_json(split_url(config_.endpoint_url), {}, body, spec, "retrieval");
    if (!response.contains("documents") || !response.at("documents").is_array()) {
        throw BackendError("retrieval: response has no documents array");
    }
    std::vector<Document> docs;
    for (const Json& d : response.at("documents")) {
        Document doc;
        if (d.contains("id") && d.at("id").is_string()) {
            doc.doc_id = d.at("id").get<std::string>();
        } else if (d.contains("doc_id") && d.at("doc_id").is_string()) {
            doc.doc_id = d.at("doc_id").get<std::string>();
        } else {
            throw BackendError("retrieval: document without id");
        }
        if (d.contains("title") && d.at("title").is_string()) doc.title = d.at("title").get<std::string>();
        if (!d.contains("text") || !d.at("text").is_string()) {
            throw BackendError("retrieval: document " + doc.doc_id + " has no text");
        }
        doc.text = d.at("text").get<std::string>();
        if (d.contains("score") && d.at("score").is_number()) doc.score = d.at("score").get<double>();
        docs.push_back(std::move(doc));
    }
    std::stable_sort(docs.begin(), docs.end(),
                     [](const Document& a, const Document& b) { return a.score > b.score; });
    if (static_cast<int>(docs.size()) > top_k) docs.resize(top_k);
    for (std::size_t i = 0; i < docs.size(); ++i) docs[i].rank = static_cast<int>(i) + 1;
    return docs;
}

LexicalRetriever LexicalRetriever::from_jsonl(const std::string& path) {
    LexicalRetriever retriever;
    std::istringstream lines(read_text_file(path));
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = path + ":" + std::to_string(line_no);
        Json j = parse_json(line, where);
        for (const char* field : {"id", "title", "text"}) {
            if (!j.is_object() || !j.contains(field) || !j.at(field).is_string()) {
                throw ValidationError(where + ": missing string field '" + field + "'");
            }
        }
        retriever.add_document(j.at("id").get<std::string>(), j.at("title").get<std::string>(),
                               j.at("text").get<std::string>());
    }
    return retriever;
}

void LexicalRetriever::add_document(const std::string& doc_id, const std::string& title,
                                    const std::string& text) {
    Entry entry;
    entry.doc_id = doc_id;
    entry.title = title;
    entry.text = text;
    for (const std::string& token : normalize_tokens(title + " " + text)) {
        ++entry.term_counts[token];
        ++entry.token_count;
    }
    entries_.push_back(std::move(entry));
}

std::vector<Document> LexicalRetriever::retrieve(const std::string& query, int top_k) {
    std::set<std::string> query_tokens;
    for (const std::string& token : normalize_tokens(query)) query_tokens.insert(token);

    std::vector<std::pair<double, std::size_t>> scored;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const Entry& entry = entries_[i];
        int hits = 0;
        for (const std::string& token : query_tokens) {
            auto it = entry.term_counts.find(token);
            if (it != entry.term_counts.end()) hits += it->second;
        }
        if (hits == 0) continue;
        double score = static_cast<double>(hits) / (1.0 + std::log(1.0 + entry.token_count));
        scored.emplace_back(score, i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (static_cast<int>(scored.size()) > top_k) scored.resize(top_k);

    std::vector<Document> docs;
    for (std::size_t i = 0; i < scored.size(); ++i) {
        const Entry& entry = entries_[scored[i].second];
        Document doc;
        doc.doc_id = entry.doc_id;
        doc.title = entry.title;
        doc.text = entry.text;
        doc.score = scored[i].first;
        doc.rank = static_cast<int>(i) + 1;
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace traceforge
