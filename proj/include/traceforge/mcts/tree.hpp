#pragma once
// Search-tree state for one question: node statistics, parent/child links,
// and the dump format consumed by the filter stage.

#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/types.hpp"

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace traceforge {

struct MctsConfig {
    int rollouts = 12;
    int max_depth = 12;
    int children_a1 = 2;            // thought samples per expansion
    int children_a2 = 3;            // sub-question samples per expansion
    double exploration_weight = 1.414;
    double temp_thought = 0.6;
    double temp_subquestion = 1.0;
    double temp_answer = 0.2;
    int top_k = 3;
};

void validate_config(const MctsConfig& cfg);

Json mcts_config_to_json(const MctsConfig& cfg);
MctsConfig mcts_config_from_json(const Json& j);

struct TreeNode {
    std::string node_id;
    std::string parent;             // empty for the root
    Step step;
    std::vector<std::string> children;
    int visit_count = 0;            // N(s)
    double cumulative_reward = 0.0; // Q(s), rewards are in {0,1}
    int depth = 1;                  // root = 1
    bool expanded = false;
};

// One backpropagated rollout: the node the walk ended on and its reward.
struct RolloutRecord {
    std::string reached;
    int reward = 0;
};

class SearchTree {
public:
    SearchTree(Question question, MctsConfig config, uint64_t rng_seed);

    const Question& question() const { return question_; }
    const MctsConfig& config() const { return config_; }
    uint64_t rng_seed() const { return rng_seed_; }

    const std::string& root_id() const { return order_.front(); }
    const TreeNode& node(const std::string& id) const;
    TreeNode& node(const std::string& id);
    bool has_node(const std::string& id) const { return index_.count(id) > 0; }

    // Creation order; stable across runs with the same seed and policy.
    const std::vector<std::string>& node_order() const { return order_; }
    size_t node_count() const { return order_.size(); }

    // Appends a child of parent_id and links it. Returns the new node id.
    const std::string& add_child(const std::string& parent_id, Step step);

    // Drops every node created at or after the given node-count mark and
    // unlinks them from their parents. Parents whose children were all
    // removed become unexpanded again.
    void rollback_to(size_t mark);

    std::vector<RolloutRecord>& rollout_log() { return rollout_log_; }
    const std::vector<RolloutRecord>& rollout_log() const { return rollout_log_; }

    Json to_json() const;
    static SearchTree from_json(const Json& j);

private:
    SearchTree() = default;

    Question question_;
    MctsConfig config_;
    uint64_t rng_seed_ = 0;
    std::vector<std::string> order_;
    std::unordered_map<std::string, TreeNode> index_;
    std::vector<RolloutRecord> rollout_log_;
    uint64_t next_id_ = 0;
};

}  // namespace traceforge
