// Acceptance suite: nine timed end-to-end checks over search, filtering,
// export, metrics, and the offline pipeline. Prints one PASS/FAIL line per
// criterion and exits nonzero if any fails. Tolerances and time budgets are
// pinned as constants below.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "traceforge/backend/retrievers.hpp"
#include "traceforge/backend/scripted.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/normalize.hpp"
#include "traceforge/core/render.hpp"
#include "traceforge/core/types.hpp"
#include "traceforge/dataset/export.hpp"
#include "traceforge/eval/datasets.hpp"
#include "traceforge/eval/metrics.hpp"
#include "traceforge/filter/judge.hpp"
#include "traceforge/filter/pipeline.hpp"
#include "traceforge/mcts/search.hpp"
#include "traceforge/mcts/tree.hpp"
#include "traceforge/pipeline/commands.hpp"
#include "traceforge/pipeline/run_config.hpp"

using namespace traceforge;
namespace fs = std::filesystem;

namespace {

// Numeric tolerances. Everything not listed here is compared exactly.
constexpr double kUctRelTol = 1e-12;   // score formula vs. extended-precision reference
constexpr double kMetricTol = 1e-9;    // metric values vs. hand-scored fixtures

// Collects failed expectations; keeps the first few messages for the report.
struct CheckContext {
    int checked = 0;
    int failed = 0;
    std::vector<std::string> messages;

    void expect(bool ok, const std::string& what) {
        ++checked;
        if (ok) return;
        ++failed;
        if (messages.size() < 10) messages.push_back(what);
    }
};

// ---- Independent normalization oracle -------------------------------------
// Deliberately re-derived rather than calling the library's normalizer, so
// reward and replay checks do not validate the code against itself.

std::vector<std::string> naive_tokens(const std::string& text) {
    std::string cleaned;
    for (unsigned char c : text) {
        if (std::ispunct(c)) continue;
        cleaned.push_back(static_cast<char>(std::tolower(c)));
    }
    std::vector<std::string> out;
    std::istringstream in(cleaned);
    std::string tok;
    while (in >> tok) {
        if (tok == "a" || tok == "an" || tok == "the") continue;
        out.push_back(tok);
    }
    return out;
}

bool naive_contains(const std::string& prediction, const std::vector<std::string>& golds) {
    std::vector<std::string> hay = naive_tokens(prediction);
    for (const std::string& gold : golds) {
        std::vector<std::string> needle = naive_tokens(gold);
        if (needle.empty() || needle.size() > hay.size()) continue;
        for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
            bool match = true;
            for (std::size_t j = 0; j < needle.size(); ++j) {
                if (hay[i + j] != needle[j]) {
                    match = false;
                    break;
                }
            }
            if (match) return true;
        }
    }
    return false;
}

// ---- Shared builders ------------------------------------------------------

Question pool_question() {
    Question q;
    q.id = "fq";
    q.text = "In which city was the winner of the Hartfield derby born?";
    q.gold_answers = {"Quillmere"};
    q.gold_sub_answers = {"Edra Volan", "Quillmere"};
    return q;
}

struct PoolSpec {
    bool bare = false;         // terminal thought only
    bool full_recall = false;  // include the hop that yields the second gold sub-answer
    bool dup_hop = false;      // repeat the first hop verbatim
    bool ungrounded = false;   // second hop's answer missing from its documents
    bool wrong_final = false;  // final answer disagrees with gold
    int extra_hops = 0;        // benign unique hops
};

Trace make_pool_trace(const std::string& trace_id, const PoolSpec& s) {
    std::vector<Step> steps;
    if (!s.bare) {
        steps.push_back(make_thought("I need to find out who won the Hartfield derby."));
        steps.push_back(make_subqa(
            "Who won the Hartfield derby?",
            {tftest::doc("p1", "Derby", "The Hartfield derby was won by Edra Volan.")},
            "Edra Volan"));
        if (s.full_recall) {
            steps.push_back(make_thought("The next fact to establish is the winner's birthplace."));
            const char* doc_text = s.ungrounded ? "The archive page mentions nothing of note."
                                                : "Edra Volan was born in Quillmere.";
            steps.push_back(make_subqa("Where was Edra Volan born?",
                                       {tftest::doc("p2", "Birth", doc_text)}, "Quillmere"));
        }
        for (int k = 0; k < s.extra_hops; ++k) {
            std::string year = std::to_string(1950 + k);
            steps.push_back(make_thought("Before answering I must pin down detail " +
                                         std::to_string(k) + "."));
            steps.push_back(make_subqa(
                "What year does detail " + std::to_string(k) + " concern?",
                {tftest::doc("e" + std::to_string(k), "Year", "The detail concerns " + year + ".")},
                year));
        }
        if (s.dup_hop) {
            steps.push_back(make_thought("I should double-check who won the derby."));
            steps.push_back(make_subqa(
                "Who won the Hartfield derby?",
                {tftest::doc("p1", "Derby", "The Hartfield derby was won by Edra Volan.")},
                "Edra Volan"));
        }
    }
    steps.push_back(make_thought(std::string("All the evidence is gathered. The final answer is: ") +
                                 (s.wrong_final ? "Narrowgate" : "Quillmere")));
    return Trace::build(trace_id, "fq", std::move(steps), TraceSource::Mcts);
}

ScriptedJudge make_pool_judge() {
    Playbook pb;
    pb.question_id = "fq";
    pb.final_answer = "Quillmere";
    pb.gold_answers = {"Quillmere"};
    return ScriptedJudge({pb});
}

std::string random_phrase(std::mt19937_64& rng, const std::vector<std::string>& vocab, int lo,
                          int hi) {
    std::uniform_int_distribution<int> len(lo, hi);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    int n = len(rng);
    std::string out;
    for (int i = 0; i < n; ++i) {
        if (!out.empty()) out += " ";
        out += vocab[pick(rng)];
    }
    return out;
}

RunConfig toy_run_config(const std::string& output_dir, std::uint64_t seed, int limit,
                         int workers) {
    RunConfig config;
    config.seed = seed;
    config.workers = workers;
    config.limit = limit;
    config.mock = true;
    config.dataset = DatasetKind::Custom;
    config.mcts.rollouts = 12;
    config.mcts.max_depth = 12;
    config.mcts.children_a1 = 2;
    config.mcts.children_a2 = 3;
    config.mcts.top_k = 3;
    config.filter.mode = SelectionMode::SP_AV_LJ;
    config.paths.questions = tftest::fixture("toy_questions.jsonl");
    config.paths.corpus = tftest::fixture("toy_corpus.jsonl");
    config.paths.output_dir = output_dir;
    config.raw = Json::object();
    return config;
}

std::map<std::string, std::string> read_dir_bytes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            out[entry.path().filename().string()] = read_text_file(entry.path().string());
        }
    }
    return out;
}

// ---- Criterion 1: search statistics replay --------------------------------
// Rebuilds every node's visit count and cumulative reward from the rollout
// log alone, recomputing each reward with the independent containment
// oracle, and compares with the stored statistics exactly.

void criterion_search_replay(CheckContext& ctx) {
    std::vector<Question> questions =
        load_dataset(tftest::fixture("toy_questions.jsonl"), DatasetKind::Custom, 4);
    ScriptedPolicyBackend backend(load_playbooks(tftest::fixture("toy_questions.jsonl")));
    LexicalRetriever retriever = LexicalRetriever::from_jsonl(tftest::fixture("toy_corpus.jsonl"));
    Policy policy{backend, retriever};

    MctsConfig config;
    config.rollouts = 3;
    config.max_depth = 6;
    config.children_a1 = 2;
    config.children_a2 = 2;
    config.top_k = 3;

    int rewarded_rollouts = 0;
    for (std::size_t qi = 0; qi < questions.size(); ++qi) {
        const Question& q = questions[qi];
        SearchTree tree = run_search(q, config, policy, 1000 + qi);
        ctx.expect(tree.node_count() <= 30,
                   q.id + ": tree grew to " + std::to_string(tree.node_count()) + " nodes (> 30)");
        ctx.expect(tree.rollout_log().size() == static_cast<std::size_t>(config.rollouts),
                   q.id + ": rollout log has " + std::to_string(tree.rollout_log().size()) +
                       " entries");

        // Structural invariants of the stored tree.
        const std::string root = tree.root_id();
        for (const std::string& id : tree.node_order()) {
            const TreeNode& node = tree.node(id);
            ctx.expect(node.node_id == id, q.id + ": node id mismatch at " + id);
            if (node.parent.empty()) {
                ctx.expect(id == root, q.id + ": non-root node " + id + " without parent");
                ctx.expect(node.depth == 1, q.id + ": root depth is " + std::to_string(node.depth));
            } else {
                ctx.expect(tree.has_node(node.parent), q.id + ": dangling parent of " + id);
                const TreeNode& parent = tree.node(node.parent);
                int links = 0;
                for (const std::string& c : parent.children) {
                    if (c == id) ++links;
                }
                ctx.expect(links == 1, q.id + ": " + id + " linked " + std::to_string(links) +
                                           " times under its parent");
                ctx.expect(node.depth == parent.depth + 1, q.id + ": depth break at " + id);
            }
        }

        // Replay visit counts and rewards from the log.
        std::map<std::string, int> visits;
        std::map<std::string, double> rewards;
        for (const RolloutRecord& rec : tree.rollout_log()) {
            ctx.expect(tree.has_node(rec.reached), q.id + ": log names unknown node " + rec.reached);
            if (!tree.has_node(rec.reached)) continue;
            ctx.expect(rec.reward == 0 || rec.reward == 1,
                       q.id + ": reward out of range " + std::to_string(rec.reward));
            const TreeNode& leaf = tree.node(rec.reached);
            int expected = 0;
            if (is_terminal_thought(leaf.step)) {
                const ThoughtStep& t = as_thought(leaf.step);
                expected = naive_contains(t.final_answer.value_or(""), q.gold_answers) ? 1 : 0;
            }
            ctx.expect(rec.reward == expected,
                       q.id + ": reward of " + rec.reached + " is " + std::to_string(rec.reward) +
                           ", oracle says " + std::to_string(expected));
            if (rec.reward == 1) ++rewarded_rollouts;
            std::string cur = rec.reached;
            while (true) {
                visits[cur] += 1;
                rewards[cur] += rec.reward;
                const TreeNode& n = tree.node(cur);
                if (n.parent.empty()) break;
                cur = n.parent;
            }
        }
        for (const std::string& id : tree.node_order()) {
            const TreeNode& node = tree.node(id);
            int n = visits.count(id) ? visits[id] : 0;
            double r = rewards.count(id) ? rewards[id] : 0.0;
            ctx.expect(node.visit_count == n,
                       q.id + ": " + id + " visit count " + std::to_string(node.visit_count) +
                           " vs replay " + std::to_string(n));
            ctx.expect(node.cumulative_reward == r,
                       q.id + ": " + id + " cumulative reward mismatch");
        }
    }
    ctx.expect(rewarded_rollouts > 0, "no rollout earned a reward; the oracle went unexercised");
}

// ---- Criterion 2: selection score formula and tie-breaking ----------------

void criterion_score_formula(CheckContext& ctx) {
    // Pinned fixture values.
    ctx.expect(uct_score(1.0, 1, 1, 1.414) == 1.0, "score(1,1,1,1.414) is not exactly 1");
    double pinned = uct_score(2.0, 2, 8, 1.0);
    // Hand-derived: 2/2 + sqrt(ln(8)/2) = 2.0196669901688093.
    double expected_pinned = 2.0196669901688093;
    ctx.expect(std::abs(pinned - expected_pinned) <= kUctRelTol * expected_pinned,
               "score(2,2,8,1) = " + std::to_string(pinned));
    ctx.expect(std::isinf(uct_score(0.0, 0, 5, 1.414)) && uct_score(0.0, 0, 5, 1.414) > 0,
               "unvisited child does not score +infinity");
    ctx.expect(std::isinf(uct_score(3.0, 0, 1, 0.0)), "unvisited child with zero weight is finite");

    // 1000-point grid against an extended-precision reference.
    for (int i = 0; i < 1000; ++i) {
        double q = 1.25 * (i % 37);
        int n_sa = 1 + (i % 53);
        int n_s = n_sa + ((i * 7) % 449);
        double c = 0.3 * (i % 11);
        long double reference = static_cast<long double>(q) / n_sa +
                                static_cast<long double>(c) *
                                    sqrtl(logl(static_cast<long double>(n_s)) / n_sa);
        double got = uct_score(q, n_sa, n_s, c);
        long double denom = std::max<long double>(1.0L, fabsl(reference));
        ctx.expect(fabsl(static_cast<long double>(got) - reference) <= kUctRelTol * denom,
                   "grid point " + std::to_string(i) + " off: " + std::to_string(got));
    }

    // Tie-breaking through the actual descent.
    Question q = pool_question();
    MctsConfig config;
    SearchTree tree(q, config, 0);
    std::string root = tree.root_id();
    std::string c1 = tree.add_child(root, make_thought("first idea"));
    std::string c2 = tree.add_child(root, make_thought("second idea"));
    tree.node(root).expanded = true;
    tree.node(root).visit_count = 2;
    tree.node(c1).visit_count = 1;
    tree.node(c2).visit_count = 1;

    std::vector<std::string> path = select_path(tree);
    ctx.expect(path.size() == 2 && path[0] == root && path[1] == c1,
               "equal finite scores must break toward the first-created child");

    tree.node(c2).visit_count = 0;
    path = select_path(tree);
    ctx.expect(path.size() == 2 && path[1] == c2, "unvisited child must win over a visited one");

    tree.node(c1).visit_count = 0;
    path = select_path(tree);
    ctx.expect(path.size() == 2 && path[1] == c1,
               "two unvisited children must break toward the first-created one");
}

// ---- Criterion 3: byte-identical regeneration -----------------------------

void criterion_generate_determinism(CheckContext& ctx) {
    tftest::TempDir tmp;
    RunConfig a = toy_run_config(tmp.str("a"), 20260822, 10, 2);
    RunConfig b = toy_run_config(tmp.str("b"), 20260822, 10, 4);
    ctx.expect(cmd_generate(a, false) == 0, "first generation run failed");
    ctx.expect(cmd_generate(b, false) == 0, "second generation run failed");

    for (const char* stage : {"trees", "candidates"}) {
        auto left = read_dir_bytes(fs::path(tmp.str("a")) / "generate" / stage);
        auto right = read_dir_bytes(fs::path(tmp.str("b")) / "generate" / stage);
        ctx.expect(left.size() == right.size() && left.size() == 10,
                   std::string(stage) + ": expected 10 files per run");
        for (const auto& [name, bytes] : left) {
            auto it = right.find(name);
            ctx.expect(it != right.end(), std::string(stage) + "/" + name + " missing from rerun");
            if (it != right.end()) {
                ctx.expect(it->second == bytes,
                           std::string(stage) + "/" + name + " differs between reruns");
            }
        }
    }
    bool any_candidates = false;
    for (const auto& [name, bytes] : read_dir_bytes(fs::path(tmp.str("a")) / "generate" /
                                                    "candidates")) {
        if (!bytes.empty()) any_candidates = true;
    }
    ctx.expect(any_candidates, "no run produced a single candidate trace");
}

// ---- Criterion 4: hand-derived selection over a constructed pool ----------

void criterion_pool_selection(CheckContext& ctx) {
    Question q = pool_question();
    std::vector<Trace> pool;
    auto add = [&](const PoolSpec& spec) {
        char id[8];
        std::snprintf(id, sizeof(id), "t%03d", static_cast<int>(pool.size()));
        pool.push_back(make_pool_trace(std::string("fq/") + id, spec));
    };
    // Derivation, with lengths in steps:
    //   t000 full clean len 5          t006 partial + extra len 5
    //   t001 full + extra len 7        t007 bare terminal len 1
    //   t002 partial clean len 3       t008 full + 2 extras len 9
    //   t003 full + duplicate len 7    t009 full clean len 5
    //   t004 full ungrounded len 5     t010 partial + duplicate len 5
    //   t005 full wrong-final len 5    t011 full ungrounded + duplicate len 7
    add({.full_recall = true});
    add({.full_recall = true, .extra_hops = 1});
    add({});
    add({.full_recall = true, .dup_hop = true});
    add({.full_recall = true, .ungrounded = true});
    add({.full_recall = true, .wrong_final = true});
    add({.extra_hops = 1});
    add({.bare = true});
    add({.full_recall = true, .extra_hops = 2});
    add({.full_recall = true});
    add({.dup_hop = true});
    add({.full_recall = true, .dup_hop = true, .ungrounded = true});

    ScriptedJudge judge = make_pool_judge();
    FilterConfig config;

    // SP considers every candidate and picks the shortest: the bare t007.
    config.mode = SelectionMode::SP;
    FilterOutcome sp = run_filter_pipeline(pool, q, config, nullptr);
    ctx.expect(sp.candidates_in == 12, "SP candidates_in");
    ctx.expect(sp.survivors_stage1 == 12 && sp.survivors_stage2 == 12, "SP stage counts");
    ctx.expect(sp.selected && sp.selected->trace_id == "fq/t007",
               "SP must select fq/t007, got " + (sp.selected ? sp.selected->trace_id : "none"));
    ctx.expect(sp.judge_attempts.empty(), "SP must not judge");

    // SP_AV keeps the eight full-recall traces; among the length-5 survivors
    // t000, t004, t005, t009 the lexicographically smallest id wins.
    const std::vector<std::string> full_recall_ids = {"fq/t000", "fq/t001", "fq/t003", "fq/t004",
                                                      "fq/t005", "fq/t008", "fq/t009", "fq/t011"};
    config.mode = SelectionMode::SP_AV;
    FilterOutcome av = run_filter_pipeline(pool, q, config, nullptr);
    ctx.expect(av.stage1_ids == full_recall_ids, "SP_AV stage-1 survivor ids");
    ctx.expect(av.survivors_stage2 == 8, "SP_AV stage-2 count mirrors stage 1");
    ctx.expect(av.selected && av.selected->trace_id == "fq/t000",
               "SP_AV must select fq/t000, got " + (av.selected ? av.selected->trace_id : "none"));

    // SP_AV_LJ judges the eight survivors, drops the fatal t004, t005, t011,
    // scores the duplicate t003 at 1.0, and picks t000 over the equally
    // clean but longer t001/t008 and the tied-length t009.
    config.mode = SelectionMode::SP_AV_LJ;
    FilterOutcome lj = run_filter_pipeline(pool, q, config, &judge);
    ctx.expect(lj.stage1_ids == full_recall_ids, "SP_AV_LJ stage-1 survivor ids");
    ctx.expect(lj.stage2_ids == std::vector<std::string>{"fq/t000", "fq/t001", "fq/t003",
                                                         "fq/t008", "fq/t009"},
               "SP_AV_LJ stage-2 survivor ids");
    ctx.expect(lj.selected && lj.selected->trace_id == "fq/t000",
               "SP_AV_LJ must select fq/t000, got " +
                   (lj.selected ? lj.selected->trace_id : "none"));
    ctx.expect(lj.error_score_of_selected && *lj.error_score_of_selected == 0.0,
               "selected trace must carry error score 0");
    ctx.expect(lj.judge_attempts.size() == 8, "exactly the stage-1 survivors are judged");
    for (const JudgeAttempt& attempt : lj.judge_attempts) {
        ctx.expect(attempt.report.parse_ok, attempt.trace_id + ": verdict failed to parse");
        ctx.expect(attempt.raw_responses.size() == 1,
                   attempt.trace_id + ": rule verdict needed a repair round");
    }
    ctx.expect(judge.call_count() == 8, "judge call count");
}

// ---- Criterion 5: stage containment over random pools ---------------------

void criterion_random_pools(CheckContext& ctx) {
    std::mt19937_64 rng(20260822);
    std::uniform_int_distribution<int> pool_size(0, 8);
    std::uniform_int_distribution<int> extra(0, 2);
    std::bernoulli_distribution barep(0.1);
    std::bernoulli_distribution fullp(0.6);
    std::bernoulli_distribution dupp(0.25);
    std::bernoulli_distribution ungroundedp(0.2);
    std::bernoulli_distribution wrongp(0.15);

    Question q = pool_question();
    ScriptedJudge judge = make_pool_judge();
    FilterConfig sp_cfg;
    sp_cfg.mode = SelectionMode::SP;
    FilterConfig av_cfg;
    av_cfg.mode = SelectionMode::SP_AV;
    FilterConfig lj_cfg;
    lj_cfg.mode = SelectionMode::SP_AV_LJ;

    int lj_selected = 0;
    for (int round = 0; round < 1000; ++round) {
        std::vector<Trace> pool;
        int n = pool_size(rng);
        for (int t = 0; t < n; ++t) {
            PoolSpec spec;
            spec.bare = barep(rng);
            if (!spec.bare) {
                spec.full_recall = fullp(rng);
                spec.dup_hop = dupp(rng);
                spec.ungrounded = ungroundedp(rng);
                spec.wrong_final = wrongp(rng);
                spec.extra_hops = extra(rng);
            }
            char id[8];
            std::snprintf(id, sizeof(id), "t%03d", t);
            pool.push_back(make_pool_trace(std::string("fq/") + id, spec));
        }
        std::set<std::string> candidate_ids;
        for (const Trace& t : pool) candidate_ids.insert(t.trace_id);

        FilterOutcome sp = run_filter_pipeline(pool, q, sp_cfg, nullptr);
        FilterOutcome av = run_filter_pipeline(pool, q, av_cfg, nullptr);
        FilterOutcome lj = run_filter_pipeline(pool, q, lj_cfg, &judge);

        ctx.expect(sp.selected.has_value() == !pool.empty(),
                   "round " + std::to_string(round) + ": SP selection presence");
        ctx.expect(av.stage1_ids == lj.stage1_ids,
                   "round " + std::to_string(round) + ": stage-1 differs between modes");
        bool stage1_subset = true;
        for (const std::string& id : av.stage1_ids) {
            if (!candidate_ids.count(id)) stage1_subset = false;
        }
        ctx.expect(stage1_subset, "round " + std::to_string(round) + ": stage 1 not a subset");
        std::set<std::string> stage1_set(lj.stage1_ids.begin(), lj.stage1_ids.end());
        bool stage2_subset = true;
        for (const std::string& id : lj.stage2_ids) {
            if (!stage1_set.count(id)) stage2_subset = false;
        }
        ctx.expect(stage2_subset, "round " + std::to_string(round) + ": stage 2 not a subset");
        ctx.expect(lj.survivors_stage2 <= lj.survivors_stage1 &&
                       lj.survivors_stage1 <= lj.candidates_in,
                   "round " + std::to_string(round) + ": survivor counts not monotone");

        if (lj.selected) {
            ++lj_selected;
            const std::string& id = lj.selected->trace_id;
            bool in_stage2 = false;
            for (const std::string& s : lj.stage2_ids) {
                if (s == id) in_stage2 = true;
            }
            ctx.expect(in_stage2, "round " + std::to_string(round) + ": selected not in stage 2");
            ctx.expect(subanswer_recall(*lj.selected, q.gold_sub_answers) == 1.0,
                       "round " + std::to_string(round) + ": selected trace recall below 1");
            bool verdict_clean = false;
            for (const JudgeAttempt& attempt : lj.judge_attempts) {
                if (attempt.trace_id == id) {
                    verdict_clean = attempt.report.parse_ok && !is_fatal(attempt.report);
                }
            }
            ctx.expect(verdict_clean,
                       "round " + std::to_string(round) + ": selected trace has a fatal verdict");
        }
    }
    ctx.expect(lj_selected > 100, "judged mode selected only " + std::to_string(lj_selected) +
                                      " traces over 1000 pools");
}

// ---- Criterion 6: export masking and round-trip ---------------------------

void criterion_export_roundtrip(CheckContext& ctx) {
    std::mt19937_64 rng(97);
    std::uniform_int_distribution<int> hop_count(0, 3);
    std::uniform_int_distribution<int> doc_count(0, 3);

    std::vector<TrainingSample> samples;
    for (int i = 0; i < 150; ++i) {
        std::string qid = "eq" + std::to_string(i);
        Question q;
        q.id = qid;
        q.text = "What does item " + std::to_string(i) + " concern?";
        q.gold_answers = {"Quillmere"};

        std::vector<Step> steps;
        int hops = hop_count(rng);
        for (int h = 0; h < hops; ++h) {
            steps.push_back(make_thought("Considering " + tftest::random_sentence(rng, 1, 5) + "."));
            std::vector<Document> docs;
            int m = doc_count(rng);
            for (int d = 0; d < m; ++d) {
                Document doc = tftest::doc(qid + "-d" + std::to_string(h) + std::to_string(d),
                                           "Passage " + std::to_string(d),
                                           tftest::random_sentence(rng, 2, 8) + ".");
                doc.rank = d + 1;
                docs.push_back(doc);
            }
            steps.push_back(make_subqa("What about " + tftest::random_sentence(rng, 1, 4) + "?",
                                       std::move(docs), tftest::random_sentence(rng, 1, 3)));
        }
        steps.push_back(make_thought("Wrapping up. The final answer is: " +
                                     tftest::random_sentence(rng, 1, 3)));
        Trace trace = Trace::build(qid + "/t000", qid, std::move(steps), TraceSource::Mcts);

        TrainingSample sample = render_trace(trace, q);

        // Mask layout: learn = false exactly for the question and documents.
        std::vector<std::pair<SegmentKind, int>> expected;
        expected.emplace_back(SegmentKind::Question, 0);
        for (std::size_t si = 0; si < trace.steps.size(); ++si) {
            int index = static_cast<int>(si) + 1;
            if (is_thought(trace.steps[si])) {
                bool last = si + 1 == trace.steps.size();
                expected.emplace_back(last ? SegmentKind::FinalThought : SegmentKind::Thought,
                                      index);
            } else {
                expected.emplace_back(SegmentKind::Subquestion, index);
                expected.emplace_back(SegmentKind::Documents, index);
                expected.emplace_back(SegmentKind::Subanswer, index);
            }
        }
        ctx.expect(sample.segments.size() == expected.size(), qid + ": segment count");
        if (sample.segments.size() == expected.size()) {
            for (std::size_t s = 0; s < expected.size(); ++s) {
                const Segment& seg = sample.segments[s];
                ctx.expect(seg.kind == expected[s].first && seg.step_index == expected[s].second,
                           qid + ": segment " + std::to_string(s) + " layout");
                bool masked = seg.kind == SegmentKind::Question || seg.kind == SegmentKind::Documents;
                ctx.expect(seg.learn == !masked, qid + ": learn flag on segment " +
                                                     std::to_string(s));
                ctx.expect(learn_flag_for(seg.kind) == seg.learn, qid + ": learn flag helper");
            }
        }
        ctx.expect(sample.rendered_text == render_chain(q, trace.steps),
                   qid + ": rendered text is not the chain rendering");

        // In-memory JSON round trip is the identity.
        Json j = sample_to_json(sample);
        TrainingSample back = sample_from_json(j, qid);
        ctx.expect(back == sample, qid + ": JSON round trip changed the sample");
        ctx.expect(sample_to_json(back).dump() == j.dump(), qid + ": second encoding differs");
        samples.push_back(std::move(sample));
    }

    // File round trip with manifest integrity.
    tftest::TempDir tmp;
    std::string path = tmp.str("training.jsonl");
    Json manifest = export_samples(samples, path, Json::object());
    ctx.expect(manifest["samples"] == 150, "manifest sample count");
    std::vector<TrainingSample> loaded = load_samples(path);
    ctx.expect(loaded.size() == samples.size(), "loaded sample count");
    for (std::size_t i = 0; i < samples.size() && i < loaded.size(); ++i) {
        ctx.expect(loaded[i] == samples[i], "sample " + std::to_string(i) + " changed on disk");
    }
    std::string manifest_path = path + ".manifest.json";
    bool integrity_ok = true;
    try {
        check_export_integrity(path, manifest_path);
    } catch (const Error&) {
        integrity_ok = false;
    }
    ctx.expect(integrity_ok, "integrity check failed on a clean export");

    std::string original = read_text_file(path);
    tftest::write_file(path, original + "x");
    bool tamper_caught = false;
    try {
        check_export_integrity(path, manifest_path);
    } catch (const IntegrityError&) {
        tamper_caught = true;
    }
    ctx.expect(tamper_caught, "tampered export passed the integrity check");
    tftest::write_file(path, original);
}

// ---- Criterion 7: answer metrics ------------------------------------------

void criterion_metrics(CheckContext& ctx) {
    struct MetricCase {
        const char* pred;
        std::vector<std::string> golds;
        bool em;
        bool acc;
        double f1;
    };
    const std::vector<MetricCase> cases = {
        {"London", {"London"}, true, true, 1.0},
        {"London, England", {"London"}, false, true, 2.0 / 3.0},
        {"the London", {"London"}, true, true, 1.0},
        {"in London, England", {"London"}, false, true, 0.5},
        {"Lond", {"London"}, false, false, 0.0},
        {"londonderry", {"London"}, false, false, 0.0},
        {"London England", {"London"}, false, true, 2.0 / 3.0},
        {"LONDON", {"london"}, true, true, 1.0},
        {"U.S.A.", {"USA"}, true, true, 1.0},
        {"", {"London"}, false, false, 0.0},
        {"a an the", {"x"}, false, false, 0.0},
        {"42", {"forty-two", "42"}, true, true, 1.0},
        {"london london", {"london"}, false, true, 2.0 / 3.0},
        {"red blue", {"blue red"}, false, false, 1.0},
        {"paris france", {"paris", "france city"}, false, true, 2.0 / 3.0},
        {"1952 stone", {"stone 1952 tower"}, false, false, 0.8},
        {"Tower of London", {"tower london"}, false, false, 0.8},
        {"Curie Marie", {"Marie Curie"}, false, false, 1.0},
        {"the winner was Marie Curie", {"Marie Curie"}, false, true, 2.0 / 3.0},
        {"answer: 1952.", {"1952"}, false, true, 2.0 / 3.0},
        {"x y z", {"q"}, false, false, 0.0},
        {"New York City", {"new york city"}, true, true, 1.0},
        {"york new city", {"new york city"}, false, false, 1.0},
        {"London", {}, false, false, 0.0},
    };
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const MetricCase& c = cases[i];
        ctx.expect(exact_match(c.pred, c.golds) == c.em,
                   "case " + std::to_string(i) + " ('" + c.pred + "'): exact match");
        ctx.expect(accuracy_contains(c.pred, c.golds) == c.acc,
                   "case " + std::to_string(i) + " ('" + c.pred + "'): containment accuracy");
        double f1 = token_f1(c.pred, c.golds);
        ctx.expect(std::abs(f1 - c.f1) <= kMetricTol,
                   "case " + std::to_string(i) + " ('" + c.pred + "'): F1 " + std::to_string(f1));
    }

    // Implication chain over 10000 random pairs: exact match implies
    // containment and F1 = 1; containment implies positive F1.
    const std::vector<std::string> vocab = {"London,", "the",   "Paris!", "stone",  "1952",
                                            "a",       "tower", "harbor", "east",   "west",
                                            "museum",  "an",    "glass",  "bridge", "north"};
    std::mt19937_64 rng(13);
    std::bernoulli_distribution splice(0.5);
    std::uniform_int_distribution<int> gold_len(1, 3);
    int em_hits = 0;
    int acc_hits = 0;
    for (int round = 0; round < 10000; ++round) {
        std::string pred = random_phrase(rng, vocab, 1, 7);
        std::string gold = random_phrase(rng, vocab, 1, 3);
        if (splice(rng)) {
            // Insert the gold phrase into the prediction at a random word
            // boundary so containment fires often.
            std::vector<std::string> words;
            std::istringstream in(pred);
            std::string w;
            while (in >> w) words.push_back(w);
            std::uniform_int_distribution<std::size_t> at(0, words.size());
            words.insert(words.begin() + at(rng), gold);
            pred.clear();
            for (const std::string& piece : words) {
                if (!pred.empty()) pred += " ";
                pred += piece;
            }
        }
        bool em = exact_match(pred, {gold});
        bool acc = accuracy_contains(pred, {gold});
        double f1 = token_f1(pred, {gold});
        if (em) {
            ++em_hits;
            ctx.expect(acc, "round " + std::to_string(round) + ": exact match without containment");
            ctx.expect(std::abs(f1 - 1.0) <= kMetricTol,
                       "round " + std::to_string(round) + ": exact match with F1 below 1");
        }
        if (acc) {
            ++acc_hits;
            ctx.expect(f1 > 0.0, "round " + std::to_string(round) + ": containment with zero F1");
        }
        ctx.expect(f1 >= 0.0 && f1 <= 1.0 + kMetricTol,
                   "round " + std::to_string(round) + ": F1 out of range");
    }
    ctx.expect(em_hits > 0, "no random round produced an exact match");
    ctx.expect(acc_hits > em_hits, "containment never exceeded exact match");
}

// ---- Criterion 8: offline pipeline end to end -----------------------------

void criterion_pipeline_end_to_end(CheckContext& ctx) {
    tftest::TempDir tmp;
    RunConfig config = toy_run_config(tmp.str("run"), 20260822, 0, 4);
    fs::path out(tmp.str("run"));

    ctx.expect(cmd_generate(config, false) == 0, "generation stage failed");
    std::vector<Question> questions =
        load_dataset(config.paths.questions, DatasetKind::Custom, 0);
    ctx.expect(questions.size() == 12, "toy dataset must hold 12 questions");
    int with_candidates = 0;
    for (const Question& q : questions) {
        fs::path cand = out / "generate" / "candidates" / (sanitize_component(q.id) + ".jsonl");
        if (fs::exists(cand) && !read_text_file(cand.string()).empty()) ++with_candidates;
    }
    ctx.expect(with_candidates >= 11, "only " + std::to_string(with_candidates) +
                                          "/12 questions produced a correct trace");

    ctx.expect(cmd_filter(config, false) == 0, "filter stage failed");
    Json filter_summary =
        parse_json(read_text_file((out / "filter" / "summary.json").string()), "summary");
    int selected = filter_summary["selected"].get<int>();
    ctx.expect(selected >= 11, "filter selected only " + std::to_string(selected) + " traces");
    ctx.expect(filter_summary["judge_failed"] == 0, "judge failures during filtering");

    ctx.expect(cmd_export(config, false) == 0, "export stage failed");
    std::string training = (out / "export" / "training.jsonl").string();
    bool integrity_ok = true;
    try {
        check_export_integrity(training, training + ".manifest.json");
    } catch (const Error&) {
        integrity_ok = false;
    }
    ctx.expect(integrity_ok, "exported training file failed its integrity check");
    ctx.expect(static_cast<int>(load_samples(training).size()) == selected,
               "exported sample count differs from the selection count");

    ctx.expect(cmd_eval(config, false) == 0, "evaluation stage failed");
    Json eval_summary =
        parse_json(read_text_file((out / "eval" / "summary.json").string()), "summary");
    ctx.expect(eval_summary["n"] == 12, "evaluation must cover all 12 questions");
    ctx.expect(eval_summary["failed"] == 0, "evaluation reported failures");

    // The detour question recovers by reformulating: exactly two retrievals
    // and a correct answer.
    bool found_detour = false;
    std::istringstream records(read_text_file((out / "eval" / "records.jsonl").string()));
    std::string line;
    while (std::getline(records, line)) {
        if (line.empty()) continue;
        Json record = parse_json(line, "record");
        ctx.expect(record["failed"] == false,
                   std::string(record["question_id"]) + ": inference failed");
        if (record["question_id"] == "q12") {
            found_detour = true;
            ctx.expect(record["retrievals"] == 2,
                       "detour question used " + record["retrievals"].dump() + " retrievals");
            ctx.expect(record["accuracy"] == true, "detour question answered incorrectly");
        }
    }
    ctx.expect(found_detour, "no evaluation record for the detour question q12");
}

// ---- Criterion 9: terminal reward oracle ----------------------------------

void criterion_reward_oracle(CheckContext& ctx) {
    const std::vector<std::string> vocab = {"london", "paris",  "stone", "1952", "tower",
                                            "harbor", "museum", "east",  "the",  "glass"};
    std::mt19937_64 rng(7);
    std::bernoulli_distribution terminal(0.8);
    std::bernoulli_distribution splice(0.5);
    MctsConfig config;

    int rewards_seen = 0;
    for (int round = 0; round < 1000; ++round) {
        std::string gold = random_phrase(rng, vocab, 1, 2);
        std::string pred = random_phrase(rng, vocab, 1, 6);
        if (splice(rng)) {
            std::vector<std::string> words;
            std::istringstream in(pred);
            std::string w;
            while (in >> w) words.push_back(w);
            std::uniform_int_distribution<std::size_t> at(0, words.size());
            words.insert(words.begin() + at(rng), gold);
            pred.clear();
            for (const std::string& piece : words) {
                if (!pred.empty()) pred += " ";
                pred += piece;
            }
        }
        Question q;
        q.id = "rw" + std::to_string(round);
        q.text = "Which phrase is expected?";
        q.gold_answers = {gold};

        SearchTree tree(q, config, 0);
        std::string root = tree.root_id();
        bool is_terminal = terminal(rng);
        std::string text = is_terminal
                               ? "Conclusion reached. The final answer is: " + pred
                               : "Still considering " + pred;
        std::string child = tree.add_child(root, make_thought(text));
        int reward = terminal_reward(tree, child);
        int expected = is_terminal && naive_contains(pred, {gold}) ? 1 : 0;
        ctx.expect(reward == expected,
                   "round " + std::to_string(round) + ": reward " + std::to_string(reward) +
                       " vs oracle " + std::to_string(expected) + " for '" + pred + "' / '" +
                       gold + "'");
        if (reward == 1) ++rewards_seen;
        if (round == 0) {
            ctx.expect(terminal_reward(tree, root) == 0, "root pseudo-thought earned a reward");
        }
    }
    ctx.expect(rewards_seen > 100, "oracle rounds produced only " + std::to_string(rewards_seen) +
                                       " positive rewards");
}

struct Criterion {
    const char* name;
    double time_limit_s;
    std::function<void(CheckContext&)> fn;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"search statistics replay from the rollout log", 1.0, criterion_search_replay},
        {"selection score formula and tie-breaking", 1.0, criterion_score_formula},
        {"generation is byte-identical across reruns", 5.0, criterion_generate_determinism},
        {"hand-derived selection over a constructed pool", 1.0, criterion_pool_selection},
        {"filter stage containment over random pools", 30.0, criterion_random_pools},
        {"training export masks and round-trips", 5.0, criterion_export_roundtrip},
        {"answer metrics match hand-scored fixtures", 10.0, criterion_metrics},
        {"offline pipeline end to end on the toy dataset", 60.0, criterion_pipeline_end_to_end},
        {"terminal reward agrees with a brute-force oracle", 5.0, criterion_reward_oracle},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& criterion = criteria[i];
        CheckContext ctx;
        auto start = std::chrono::steady_clock::now();
        try {
            criterion.fn(ctx);
        } catch (const std::exception& e) {
            ctx.expect(false, std::string("unhandled exception: ") + e.what());
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = elapsed <= criterion.time_limit_s;
        bool pass = ctx.failed == 0 && in_time;
        if (!pass) ++failures;
        std::printf("%s  %zu. %-50s %8.2fs / %2.0fs  %d checks\n", pass ? "PASS" : "FAIL", i + 1,
                    criterion.name, elapsed, criterion.time_limit_s, ctx.checked);
        if (!in_time) {
            std::printf("      exceeded the time budget\n");
        }
        for (const std::string& message : ctx.messages) {
            std::printf("      %s\n", message.c_str());
        }
        if (ctx.failed > static_cast<int>(ctx.messages.size())) {
            std::printf("      ... %d further failed checks\n",
                        ctx.failed - static_cast<int>(ctx.messages.size()));
        }
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
