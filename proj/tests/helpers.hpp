// Shared scaffolding for the unit suites: temp dirs, fixture paths, and
// small controllable backends.
#pragma once

#include <unistd.h>

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/core/types.hpp"

namespace tftest {

inline std::string fixture(const std::string& rel) {
    return std::string(FIXTURE_DIR) + "/" + rel;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// Unique directory under the system temp root, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path = base / ("traceforge-test-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string str(const std::string& rel = "") const {
        return rel.empty() ? path.string() : (path / rel).string();
    }
};

// Replays queued completions; runs dry or fails on demand.
class QueuePolicy : public traceforge::PolicyBackend {
  public:
    std::deque<std::vector<std::string>> thought_batches;
    std::deque<std::vector<std::string>> subquestion_batches;
    std::deque<std::string> answers;
    bool fail_thoughts = false;
    bool fail_subquestions = false;
    bool fail_answers = false;
    int thought_calls = 0;
    int subquestion_calls = 0;
    int answer_calls = 0;

    std::vector<std::string> thoughts(const traceforge::ChainView&, int n, double) override {
        ++thought_calls;
        if (fail_thoughts) throw traceforge::BackendError("scripted thought failure");
        return pop_batch(thought_batches, n, "thoughts");
    }
    std::vector<std::string> subquestions(const traceforge::ChainView&, int n, double) override {
        ++subquestion_calls;
        if (fail_subquestions) throw traceforge::BackendError("scripted sub-question failure");
        return pop_batch(subquestion_batches, n, "subquestions");
    }
    std::string subanswer(const traceforge::ChainView&, const std::string&,
                          const std::vector<traceforge::Document>&, double) override {
        ++answer_calls;
        if (fail_answers) throw traceforge::BackendError("scripted sub-answer failure");
        if (answers.empty()) throw traceforge::BackendError("queue policy ran out of answers");
        std::string a = answers.front();
        answers.pop_front();
        return a;
    }

  private:
    static std::vector<std::string> pop_batch(std::deque<std::vector<std::string>>& q, int n,
                                              const char* what) {
        if (q.empty()) throw traceforge::BackendError(std::string("queue policy ran out of ") + what);
        std::vector<std::string> batch = q.front();
        q.pop_front();
        if (static_cast<int>(batch.size()) > n) batch.resize(n);
        return batch;
    }
};

// Returns the same document list for every query, re-ranked to top_k.
class FixedRetriever : public traceforge::Retriever {
  public:
    std::vector<traceforge::Document> docs;
    int calls = 0;

    std::vector<traceforge::Document> retrieve(const std::string&, int top_k) override {
        ++calls;
        std::vector<traceforge::Document> out = docs;
        if (static_cast<int>(out.size()) > top_k) out.resize(top_k);
        for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
        return out;
    }
};

inline traceforge::Question toy_question(const std::string& id = "tq",
                                         std::vector<std::string> gold = {"Quillmere"}) {
    traceforge::Question q;
    q.id = id;
    q.text = "In which city was the winner born?";
    q.gold_answers = std::move(gold);
    return q;
}

inline traceforge::Document doc(const std::string& id, const std::string& title,
                                const std::string& text, double score = 1.0, int rank = 1) {
    traceforge::Document d;
    d.doc_id = id;
    d.title = title;
    d.text = text;
    d.score = score;
    d.rank = rank;
    return d;
}

// Random token sentence over a tiny vocabulary, for property tests.
inline std::string random_sentence(std::mt19937_64& rng, int min_tokens = 1, int max_tokens = 6) {
    static const char* vocab[] = {"london",  "paris",  "river", "tower", "red",    "blue",
                                  "1952",    "bridge", "east",  "west",  "museum", "the",
                                  "ancient", "stone",  "glass", "north", "harbor", "a"};
    std::uniform_int_distribution<int> len(min_tokens, max_tokens);
    std::uniform_int_distribution<std::size_t> pick(0, std::size(vocab) - 1);
    int n = len(rng);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (!out.empty()) out += " ";
        out += vocab[pick(rng)];
    }
    return out;
}

}  // namespace tftest
