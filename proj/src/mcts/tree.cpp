#include "traceforge/mcts/tree.hpp"

#include "traceforge/core/errors.hpp"

#include <algorithm>

namespace traceforge {

void validate_config(const MctsConfig& cfg) {
    if (cfg.rollouts < 1 || cfg.max_depth < 1 || cfg.children_a1 < 1 ||
        cfg.children_a2 < 1 || cfg.top_k < 1) {
        throw ValidationError("mcts config: all counts must be >= 1");
    }
    if (cfg.exploration_weight < 0.0 || cfg.temp_thought < 0.0 ||
        cfg.temp_subquestion < 0.0 || cfg.temp_answer < 0.0) {
        throw ValidationError("mcts config: weights and temperatures must be >= 0");
    }
}

Json mcts_config_to_json(const MctsConfig& cfg) {
    Json j;
    j["rollouts"] = cfg.rollouts;
    j["max_depth"] = cfg.max_depth;
    j["children_a1"] = cfg.children_a1;
    j["children_a2"] = cfg.children_a2;
    j["exploration_weight"] = cfg.exploration_weight;
    j["temp_thought"] = cfg.temp_thought;
    j["temp_subquestion"] = cfg.temp_subquestion;
    j["temp_answer"] = cfg.temp_answer;
    j["top_k"] = cfg.top_k;
    return j;
}

MctsConfig mcts_config_from_json(const Json& j) {
    MctsConfig cfg;
    if (j.contains("rollouts")) cfg.rollouts = j.at("rollouts").get<int>();
    if (j.contains("max_depth")) cfg.max_depth = j.at("max_depth").get<int>();
    if (j.contains("children_a1")) cfg.children_a1 = j.at("children_a1").get<int>();
    if (j.contains("children_a2")) cfg.children_a2 = j.at("children_a2").get<int>();
    if (j.contains("exploration_weight")) cfg.exploration_weight = j.at("exploration_weight").get<double>();
    if (j.contains("temp_thought")) cfg.temp_thought = j.at("temp_thought").get<double>();
    if (j.contains("temp_subquestion")) cfg.temp_subquestion = j.at("temp_subquestion").get<double>();
    if (j.contains("temp_answer")) cfg.temp_answer = j.at("temp_answer").get<double>();
    if (j.contains("top_k")) cfg.top_k = j.at("top_k").get<int>();
    validate_config(cfg);
    return cfg;
}

SearchTree::SearchTree(Question question, MctsConfig config, uint64_t rng_seed)
    : question_(std::move(question)), config_(std::move(config)), rng_seed_(rng_seed) {
    validate_config(config_);
    validate_question(question_);

    // The root is an implicit question node; it never carries a marker and
    // never appears in extracted traces.
    TreeNode root;
    root.node_id = "n0";
    ThoughtStep step;
    step.text = question_.text;
    root.step = step;
    root.depth = 1;
    order_.push_back(root.node_id);
    index_.emplace(root.node_id, std::move(root));
    next_id_ = 1;
}

const TreeNode& SearchTree::node(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown node id: " + id);
    return it->second;
}

TreeNode& SearchTree::node(const std::string& id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw ValidationError("unknown node id: " + id);
    return it->second;
}

const std::string& SearchTree::add_child(const std::string& parent_id, Step step) {
    TreeNode& parent = node(parent_id);
    TreeNode child;
    child.node_id = "n" + std::to_string(next_id_++);
    child.parent = parent_id;
    child.step = std::move(step);
    child.depth = parent.depth + 1;
    parent.children.push_back(child.node_id);
    order_.push_back(child.node_id);
    auto [it, ok] = index_.emplace(child.node_id, std::move(child));
    (void)ok;
    return it->second.node_id;
}

void SearchTree::rollback_to(size_t mark) {
    while (order_.size() > mark) {
        const std::string id = order_.back();
        order_.pop_back();
        const TreeNode& doomed = index_.at(id);
        if (!doomed.parent.empty()) {
            TreeNode& parent = index_.at(doomed.parent);
            auto& kids = parent.children;
            kids.erase(std::remove(kids.begin(), kids.end(), id), kids.end());
            if (kids.empty()) parent.expanded = false;
        }
        index_.erase(id);
    }
}

Json SearchTree::to_json() const {
    Json j;
    j["question"] = question_to_json(question_);
    j["seed"] = rng_seed_;
    j["config"] = mcts_config_to_json(config_);
    j["root"] = root_id();
    Json nodes = Json::object();
    for (const auto& id : order_) {
        const TreeNode& n = index_.at(id);
        Json nj;
        nj["node_id"] = n.node_id;
        if (n.parent.empty()) {
            nj["parent"] = nullptr;
        } else {
            nj["parent"] = n.parent;
        }
        nj["step"] = step_to_json(n.step);
        nj["children"] = n.children;
        nj["visit_count"] = n.visit_count;
        nj["cumulative_reward"] = n.cumulative_reward;
        nj["depth"] = n.depth;
        nj["expanded"] = n.expanded;
        nodes[id] = std::move(nj);
    }
    j["nodes"] = std::move(nodes);
    Json log = Json::array();
    for (const auto& r : rollout_log_) {
        Json rj;
        rj["reached"] = r.reached;
        rj["reward"] = r.reward;
        log.push_back(std::move(rj));
    }
    j["rollouts_log"] = std::move(log);
    return j;
}

SearchTree SearchTree::from_json(const Json& j) {
    for (const char* f : {"question", "seed", "config", "root", "nodes"}) {
        if (!j.contains(f)) throw ValidationError(std::string("tree dump: missing field \"") + f + "\"");
    }
    SearchTree tree;
    tree.question_ = question_from_json(j.at("question"));
    tree.rng_seed_ = j.at("seed").get<uint64_t>();
    tree.config_ = mcts_config_from_json(j.at("config"));

    uint64_t max_numeric = 0;
    for (const auto& [id, nj] : j.at("nodes").items()) {
        TreeNode n;
        n.node_id = id;
        if (!nj.at("parent").is_null()) n.parent = nj.at("parent").get<std::string>();
        n.step = step_from_json(nj.at("step"));
        n.children = nj.at("children").get<std::vector<std::string>>();
        n.visit_count = nj.at("visit_count").get<int>();
        n.cumulative_reward = nj.at("cumulative_reward").get<double>();
        n.depth = nj.at("depth").get<int>();
        n.expanded = nj.at("expanded").get<bool>();
        if (n.cumulative_reward < 0.0 || n.cumulative_reward > n.visit_count + 1e-9) {
            throw ValidationError("tree dump: node " + id + " has reward > visits");
        }
        tree.order_.push_back(id);
        tree.index_.emplace(id, std::move(n));
        if (id.size() > 1 && id[0] == 'n') {
            max_numeric = std::max<std::uint64_t>(max_numeric, std::stoull(id.substr(1)));
        }
    }
    tree.next_id_ = max_numeric + 1;

    const std::string root = j.at("root").get<std::string>();
    if (!tree.has_node(root) || tree.order_.empty() || tree.order_.front() != root) {
        throw ValidationError("tree dump: root node missing or out of order");
    }
    for (const auto& id : tree.order_) {
        const TreeNode& n = tree.index_.at(id);
        for (const auto& c : n.children) {
            if (!tree.has_node(c) || tree.index_.at(c).parent != id) {
                throw ValidationError("tree dump: inconsistent parent/child link at " + id);
            }
        }
        if (!n.parent.empty() && tree.index_.at(n.parent).depth + 1 != n.depth) {
            throw ValidationError("tree dump: bad depth at " + id);
        }
    }
    if (j.contains("rollouts_log")) {
        for (const auto& rj : j.at("rollouts_log")) {
            RolloutRecord r;
            r.reached = rj.at("reached").get<std::string>();
            r.reward = rj.at("reward").get<int>();
            tree.rollout_log_.push_back(std::move(r));
        }
    }
    return tree;
}

}  // namespace traceforge
