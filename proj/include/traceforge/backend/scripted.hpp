// Deterministic scripted policy and judge for offline runs and tests.
#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/core/types.hpp"

namespace traceforge {

// One retrieval hop the scripted policy knows how to make for a question.
struct PlaybookHop {
    std::string sub_question;  // the query that finds the hop's evidence
    std::string answer;        // the sub-answer the evidence yields
};

// Everything the scripted policy knows about one question.
struct Playbook {
    std::string question_id;
    std::string final_answer;             // stated in the terminal thought
    std::vector<PlaybookHop> hops;        // in dependency order
    std::vector<std::string> gold_answers;
    bool detour = false;                  // start with a vague query that retrieves nothing useful
};

// Reads playbooks from question records carrying a decomposition array.
std::vector<Playbook> load_playbooks(const std::string& path);

// Policy backend that walks a per-question playbook instead of calling a model.
// Completions depend only on the chain contents, so reruns are byte-stable.
class ScriptedPolicyBackend : public PolicyBackend {
  public:
    explicit ScriptedPolicyBackend(std::vector<Playbook> playbooks);

    std::vector<std::string> thoughts(const ChainView& chain, int n, double temperature) override;
    std::vector<std::string> subquestions(const ChainView& chain, int n, double temperature) override;
    std::string subanswer(const ChainView& chain, const std::string& sub_question,
                          const std::vector<Document>& documents, double temperature) override;

    std::uint64_t call_count() const { return calls_.load(); }

  private:
    const Playbook& playbook_for(const Question& question) const;

    std::map<std::string, Playbook> playbooks_;
    std::atomic<std::uint64_t> calls_{0};
};

// Judge that scores a rendered trace by rule, or replays queued responses.
class ScriptedJudge : public JudgeClient {
  public:
    explicit ScriptedJudge(const std::vector<Playbook>& playbooks);

    std::string judge(const std::string& rendering) override;

    // Queue raw responses for a trace id; they are consumed before the rule runs.
    void push_response(const std::string& trace_id, std::string response);
    // When set, every call fails, simulating a judge outage.
    void set_fail(bool fail) { fail_.store(fail); }

    std::uint64_t call_count() const { return calls_.load(); }

  private:
    std::string rule_based_verdict(const std::string& rendering) const;

    std::map<std::string, std::vector<std::string>> gold_;  // question id -> gold answers
    std::map<std::string, std::deque<std::string>> queued_;
    std::mutex mu_;
    std::atomic<bool> fail_{false};
    std::atomic<std::uint64_t> calls_{0};
};

}  // namespace traceforge
