#include "traceforge/mcts/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

#include "traceforge/backend/ops.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/core/normalize.hpp"

namespace traceforge {
namespace {

// Steps from the root (exclusive) down to node_id (inclusive).
std::vector<Step> chain_steps(const SearchTree& tree, const std::string& node_id) {
    std::vector<Step> steps;
    for (std::string cur = node_id; !cur.empty(); cur = tree.node(cur).parent) {
        const TreeNode& n = tree.node(cur);
        if (n.parent.empty()) break;
        steps.push_back(n.step);
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

bool expands_to_thoughts(const TreeNode& node) {
    return node.parent.empty() || is_subqa(node.step);
}

bool at_depth_cap(const SearchTree& tree, const TreeNode& node) {
    return node.depth >= tree.config().max_depth;
}

}  // namespace

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    if (n == 0) throw ValidationError("uniform draw from empty range");
    std::uint64_t threshold = (0 - static_cast<std::uint64_t>(n)) % n;
    std::uint64_t v = rng();
    while (v < threshold) v = rng();
    return static_cast<std::size_t>(v % n);
}

double uct_score(double q, int n_sa, int n_s, double exploration_weight) {
    if (n_sa < 0 || n_s < 0) throw ValidationError("negative visit count");
    if (n_sa == 0) return std::numeric_limits<double>::infinity();
    if (n_s == 0) throw ValidationError("parent visit count is 0 with a visited child");
    if (n_s < n_sa) throw ValidationError("child visited more often than its parent");
    return q / n_sa + exploration_weight * std::sqrt(std::log(static_cast<double>(n_s)) / n_sa);
}

std::vector<std::string> select_path(const SearchTree& tree) {
    std::vector<std::string> path = {tree.root_id()};
    while (true) {
        const TreeNode& node = tree.node(path.back());
        if (!node.expanded || node.children.empty() || is_terminal_thought(node.step)) return path;
        const std::string* best = nullptr;
        double best_score = -std::numeric_limits<double>::infinity();
        for (const std::string& child_id : node.children) {
            const TreeNode& child = tree.node(child_id);
            double score = uct_score(child.cumulative_reward, child.visit_count, node.visit_count,
                                     tree.config().exploration_weight);
            if (best == nullptr || score > best_score) {
                best = &child_id;
                best_score = score;
            }
        }
        path.push_back(*best);
    }
}

// node_id is taken by value: callers may pass a reference into the tree's own
// id storage, which add_child below would invalidate.
std::vector<std::string> expand_node(SearchTree& tree, std::string node_id, const Policy& policy) {
    const TreeNode& node = tree.node(node_id);
    if (is_terminal_thought(node.step)) {
        throw ValidationError("expand " + node_id + ": node is terminal");
    }
    if (node.expanded || !node.children.empty()) {
        throw ValidationError("expand " + node_id + ": node already expanded");
    }
    if (at_depth_cap(tree, node)) {
        throw ValidationError("expand " + node_id + ": node is at the depth cap");
    }

    const MctsConfig& cfg = tree.config();
    ChainView chain{tree.question(), chain_steps(tree, node_id)};
    std::vector<Step> staged;
    std::unordered_set<std::string> seen;
    try {
        if (expands_to_thoughts(node)) {
            for (ThoughtStep& t : generate_thoughts(chain, cfg.children_a1, cfg.temp_thought, policy.generator)) {
                if (!seen.insert(normalize_answer(t.text)).second) continue;
                staged.emplace_back(std::move(t));
            }
        } else {
            for (const std::string& sub_question :
                 generate_subquestions(chain, cfg.children_a2, cfg.temp_subquestion, policy.generator)) {
                if (!seen.insert(normalize_answer(sub_question)).second) continue;
                std::vector<Document> docs = retrieve_documents(sub_question, cfg.top_k, policy.retriever);
                SubAnswer sub = extract_subanswer(chain, sub_question, docs, cfg.temp_answer, policy.generator);
                staged.emplace_back(make_subqa(sub_question, std::move(docs), sub.answer));
            }
        }
    } catch (const BackendError& e) {
        throw BackendError("expand " + node_id + ": " + e.what());
    }
    if (staged.empty()) throw ValidationError("expand " + node_id + ": every candidate child collapsed");

    std::vector<std::string> child_ids;
    child_ids.reserve(staged.size());
    for (Step& step : staged) child_ids.push_back(tree.add_child(node_id, std::move(step)));
    tree.node(node_id).expanded = true;
    return child_ids;
}

std::string simulate(SearchTree& tree, const std::string& node_id, const Policy& policy,
                     std::mt19937_64& rng) {
    tree.node(node_id);
    std::size_t mark = tree.node_count();
    try {
        std::string cur = node_id;
        while (true) {
            const TreeNode& node = tree.node(cur);
            if (is_terminal_thought(node.step) || at_depth_cap(tree, node)) return cur;
            if (!node.expanded) expand_node(tree, cur, policy);
            const auto& children = tree.node(cur).children;
            cur = children[uniform_index(rng, children.size())];
        }
    } catch (...) {
        tree.rollback_to(mark);
        throw;
    }
}

int terminal_reward(const SearchTree& tree, const std::string& node_id) {
    const TreeNode& node = tree.node(node_id);
    if (!is_terminal_thought(node.step)) return 0;
    const ThoughtStep& t = as_thought(node.step);
    return contains_gold(*t.final_answer, tree.question().gold_answers) ? 1 : 0;
}

void backpropagate(SearchTree& tree, const std::string& leaf_id, int reward) {
    if (reward != 0 && reward != 1) throw ValidationError("reward must be 0 or 1");
    for (std::string cur = leaf_id; !cur.empty(); cur = tree.node(cur).parent) {
        TreeNode& node = tree.node(cur);
        node.visit_count += 1;
        node.cumulative_reward += reward;
    }
}

SearchTree run_search(const Question& question, const MctsConfig& config, const Policy& policy,
                      std::uint64_t seed) {
    validate_config(config);
    validate_question(question);
    SearchTree tree(question, config, seed);
    std::mt19937_64 rng(seed);
    for (int rollout = 0; rollout < config.rollouts; ++rollout) {
        try {
            std::vector<std::string> path = select_path(tree);
            std::string leaf = path.back();
            const TreeNode& node = tree.node(leaf);
            if (!is_terminal_thought(node.step) && !at_depth_cap(tree, node)) {
                std::vector<std::string> children = expand_node(tree, leaf, policy);
                leaf = children[uniform_index(rng, children.size())];
                leaf = simulate(tree, leaf, policy, rng);
            }
            int reward = terminal_reward(tree, leaf);
            backpropagate(tree, leaf, reward);
            tree.rollout_log().push_back({leaf, reward});
        } catch (const BackendError& e) {
            throw BackendError("rollout " + std::to_string(rollout) + ": " + e.what());
        }
    }
    return tree;
}

std::vector<Trace> extract_correct_traces(const SearchTree& tree) {
    std::vector<Trace> traces;
    int index = 0;
    for (const std::string& node_id : tree.node_order()) {
        const TreeNode& node = tree.node(node_id);
        if (node.parent.empty() || !is_terminal_thought(node.step)) continue;
        if (terminal_reward(tree, node_id) != 1) continue;
        char suffix[16];
        std::snprintf(suffix, sizeof(suffix), "t%03d", index);
        ++index;
        traces.push_back(Trace::build(tree.question().id + "/" + suffix, tree.question().id,
                                      chain_steps(tree, node_id), TraceSource::Mcts));
    }
    return traces;
}

}  // namespace traceforge
