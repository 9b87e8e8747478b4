#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "traceforge/backend/config.hpp"
#include "traceforge/backend/interfaces.hpp"

namespace traceforge {

// Client for a retrieval service speaking POST {query, top_k} →
// {documents: [{id, title, text, score}]}. Results are re-sorted by
// score (stable) and re-ranked 1..m locally so downstream code never
// depends on server-side ordering discipline.
class HttpRetriever : public Retriever {
public:
    explicit HttpRetriever(RetrieverConfig config);

    std::vector<Document> retrieve(const std::string& query, int top_k) override;

private:
    RetrieverConfig config_;
};

// Deterministic in-memory lexical index over a passage corpus. A document
// scores the sum of its term frequencies over the query's unique
// normalized tokens, damped by log document length; zero-score documents
// are dropped and ties keep insertion order.
class LexicalRetriever : public Retriever {
public:
    static LexicalRetriever from_jsonl(const std::string& path);

    void add_document(const std::string& doc_id, const std::string& title, const std::string& text);

    std::vector<Document> retrieve(const std::string& query, int top_k) override;

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::string doc_id;
        std::string title;
        std::string text;
        std::unordered_map<std::string, int> term_counts;
        int token_count = 0;
    };
    std::vector<Entry> entries_;
};

}  // namespace traceforge
