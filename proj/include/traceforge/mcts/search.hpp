#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/mcts/tree.hpp"

namespace traceforge {

// Unbiased uniform draw from [0, n) via rejection sampling, so results
// match across platforms for the same engine state.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

// Upper-confidence score for a child with cumulative reward q visited
// n_sa times under a parent visited n_s times. Unvisited children score
// +infinity.
double uct_score(double q, int n_sa, int n_s, double exploration_weight);

// Node ids from the root to the first node that is unexpanded, childless,
// or terminal, descending by best score with first-come tie-breaks.
std::vector<std::string> select_path(const SearchTree& tree);

// Creates all children of node_id in one shot: thought children under the
// root or a retrieval step, fully populated retrieval children under a
// thought. Duplicate candidates (same normalized text) are collapsed.
// Backend calls all happen before any tree mutation, so a failure leaves
// the tree untouched.
std::vector<std::string> expand_node(SearchTree& tree, std::string node_id, const Policy& policy);

// Random descent from node_id, expanding as needed, until a terminal
// thought or the depth cap. Created nodes stay in the tree; on error the
// tree is rolled back to its state at entry and the error rethrown.
std::string simulate(SearchTree& tree, const std::string& node_id, const Policy& policy,
                     std::mt19937_64& rng);

// 1 when the node is a terminal thought whose final answer contains a
// gold answer, else 0.
int terminal_reward(const SearchTree& tree, const std::string& node_id);

// Adds reward to and increments the visit count of every node from
// leaf_id up to the root.
void backpropagate(SearchTree& tree, const std::string& leaf_id, int reward);

// Full search for one question: rollouts times select, expand, simulate,
// score, backpropagate. Errors are rethrown tagged with the rollout index.
SearchTree run_search(const Question& question, const MctsConfig& config, const Policy& policy,
                      std::uint64_t seed);

// Root-to-leaf traces for every terminal node that earned reward 1, in
// node creation order, ids "<question_id>/t000", "/t001", ...
std::vector<Trace> extract_correct_traces(const SearchTree& tree);

}  // namespace traceforge
