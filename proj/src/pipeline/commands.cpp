#include "traceforge/pipeline/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include "traceforge/backend/interfaces.hpp"
#include "traceforge/backend/prompts.hpp"
#include "traceforge/backend/remote.hpp"
#include "traceforge/backend/retrievers.hpp"
#include "traceforge/backend/scripted.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/core/hash.hpp"
#include "traceforge/dataset/export.hpp"
#include "traceforge/eval/datasets.hpp"
#include "traceforge/eval/harness.hpp"
#include "traceforge/mcts/search.hpp"
#include "traceforge/util/parallel.hpp"

namespace traceforge {

namespace fs = std::filesystem;

namespace {

std::string pretty(const Json& j) { return j.dump(2) + "\n"; }

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    out.close();
    if (!out) throw IoError("write failed: " + path.string());
}

PromptSet prompts_for(const RunConfig& config) {
    return config.paths.prompt_dir.empty() ? PromptSet::defaults()
                                           : PromptSet::with_overrides(config.paths.prompt_dir);
}

// Counts calls so reports can state how much judge traffic a mode caused.
class CountingJudge : public JudgeClient {
  public:
    explicit CountingJudge(std::unique_ptr<JudgeClient> inner) : inner_(std::move(inner)) {}

    std::string judge(const std::string& rendering) override {
        calls_.fetch_add(1);
        return inner_->judge(rendering);
    }

    std::uint64_t calls() const { return calls_.load(); }

  private:
    std::unique_ptr<JudgeClient> inner_;
    std::atomic<std::uint64_t> calls_{0};
};

struct Backends {
    std::shared_ptr<RequestLimiter> limiter;
    std::unique_ptr<PolicyBackend> policy;
    std::unique_ptr<CountingJudge> judge;
    std::unique_ptr<Retriever> retriever;
};

Backends make_backends(const RunConfig& config, bool need_policy, bool need_judge,
                       bool need_retriever) {
    Backends b;
    if (config.mock) {
        std::vector<Playbook> playbooks = load_playbooks(config.paths.questions);
        if (need_policy) b.policy = std::make_unique<ScriptedPolicyBackend>(playbooks);
        if (need_judge) b.judge = std::make_unique<CountingJudge>(std::make_unique<ScriptedJudge>(playbooks));
        if (need_retriever) {
            if (config.paths.corpus.empty()) {
                throw ConfigError("mock mode needs 'paths.corpus' for the in-memory retriever");
            }
            b.retriever =
                std::make_unique<LexicalRetriever>(LexicalRetriever::from_jsonl(config.paths.corpus));
        }
        return b;
    }
    int in_flight = std::max({1, config.generator.max_concurrent_requests,
                              config.judge.max_concurrent_requests});
    b.limiter = std::make_shared<RequestLimiter>(in_flight);
    PromptSet prompts = prompts_for(config);
    if (need_policy) {
        b.policy = std::make_unique<RemotePolicyBackend>(config.generator, prompts, b.limiter);
    }
    if (need_judge) {
        b.judge = std::make_unique<CountingJudge>(
            std::make_unique<RemoteJudge>(config.judge, prompts, b.limiter));
    }
    if (need_retriever) {
        if (!config.retriever.endpoint_url.empty()) {
            b.retriever = std::make_unique<HttpRetriever>(config.retriever);
        } else {
            if (config.paths.corpus.empty()) {
                throw ConfigError("either 'retriever.endpoint_url' or 'paths.corpus' is required");
            }
            b.retriever =
                std::make_unique<LexicalRetriever>(LexicalRetriever::from_jsonl(config.paths.corpus));
        }
    }
    return b;
}

// Everything needed to reproduce the stage byte-for-byte: the effective
// knobs, prompt digest, input digests, and the config document exactly as
// written (so ${VAR} secrets stay as references).
Json stage_manifest(const RunConfig& config, const std::string& stage) {
    Json inputs = Json::object();
    inputs["questions"] = content_hash(read_text_file(config.paths.questions));
    if (config.paths.corpus.empty()) {
        inputs["corpus"] = nullptr;
    } else {
        inputs["corpus"] = content_hash(read_text_file(config.paths.corpus));
    }
    Json m = Json::object();
    m["stage"] = stage;
    m["seed"] = config.seed;
    m["limit"] = config.limit;
    m["mock"] = config.mock;
    m["selection_mode"] = to_string(config.filter.mode);
    m["prompt_content_hash"] = hex64(prompts_for(config).content_hash());
    m["inputs"] = inputs;
    m["config"] = config.raw;
    return m;
}

std::vector<Trace> read_trace_lines(const fs::path& path) {
    std::vector<Trace> traces;
    std::string body = read_text_file(path.string());
    std::istringstream in(body);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = path.string() + ":" + std::to_string(line_no);
        traces.push_back(trace_from_json(parse_json(line, where)));
    }
    return traces;
}

}  // namespace

std::string sanitize_component(const std::string& id) {
    std::string out = id.empty() ? std::string("_") : id;
    for (char& c : out) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '.' || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return out;
}

int cmd_generate(const RunConfig& config, bool force) {
    std::vector<Question> questions = load_dataset(config.paths.questions, config.dataset, config.limit);
    Backends backends = make_backends(config, true, false, true);
    Policy policy{*backends.policy, *backends.retriever};

    fs::path stage_dir = fs::path(config.paths.output_dir) / "generate";
    fs::path trees_dir = stage_dir / "trees";
    fs::path candidates_dir = stage_dir / "candidates";
    fs::create_directories(trees_dir);
    fs::create_directories(candidates_dir);
    write_file(stage_dir / "manifest.json", pretty(stage_manifest(config, "generate")));

    struct Row {
        bool skipped = false;
        bool failed = false;
        std::string error;
        int traces = 0;
    };
    std::vector<Row> rows(questions.size());
    parallel_for(questions.size(), config.workers, [&](std::size_t i) {
        const Question& q = questions[i];
        std::string stem = sanitize_component(q.id);
        fs::path tree_path = trees_dir / (stem + ".json");
        fs::path cand_path = candidates_dir / (stem + ".jsonl");
        if (!force && fs::exists(tree_path) && fs::exists(cand_path)) {
            rows[i].skipped = true;
            return;
        }
        try {
            std::uint64_t question_seed = fnv1a64(std::to_string(config.seed) + ":" + q.id);
            SearchTree tree = run_search(q, config.mcts, policy, question_seed);
            std::vector<Trace> correct = extract_correct_traces(tree);
            std::string lines;
            for (const Trace& t : correct) lines += trace_to_json(t).dump() + "\n";
            write_file(tree_path, pretty(tree.to_json()));
            write_file(cand_path, lines);
            rows[i].traces = static_cast<int>(correct.size());
        } catch (const std::exception& e) {
            rows[i].failed = true;
            rows[i].error = e.what();
        }
    });

    int generated = 0;
    int skipped = 0;
    int failed = 0;
    std::string failure_lines;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (rows[i].skipped) {
            ++skipped;
        } else if (rows[i].failed) {
            ++failed;
            std::fprintf(stderr, "generate failed for %s: %s\n", questions[i].id.c_str(),
                         rows[i].error.c_str());
            Json record = Json::object();
            record["question_id"] = questions[i].id;
            record["error"] = rows[i].error;
            failure_lines += record.dump() + "\n";
        } else {
            ++generated;
        }
    }
    fs::path failures_path = stage_dir / "failures.jsonl";
    if (failed > 0) {
        write_file(failures_path, failure_lines);
    } else if (fs::exists(failures_path)) {
        fs::remove(failures_path);
    }
    std::printf("generate: %zu questions, %d new, %d skipped, %d failed\n", questions.size(),
                generated, skipped, failed);
    return failed > 0 ? 1 : 0;
}

int cmd_filter(const RunConfig& config, bool force) {
    std::vector<Question> questions = load_dataset(config.paths.questions, config.dataset, config.limit);
    fs::path candidates_dir = fs::path(config.paths.output_dir) / "generate" / "candidates";
    if (!fs::exists(candidates_dir)) {
        throw ConfigError("no candidates at " + candidates_dir.string() + "; run generate first");
    }
    fs::path stage_dir = fs::path(config.paths.output_dir) / "filter";
    fs::path outcomes_path = stage_dir / "outcomes.jsonl";
    fs::path selected_path = stage_dir / "selected.jsonl";
    fs::path summary_path = stage_dir / "summary.json";
    if (!force && fs::exists(outcomes_path) && fs::exists(selected_path) && fs::exists(summary_path)) {
        std::printf("filter: outputs already present, skipping (use --force to redo)\n");
        return 0;
    }

    bool needs_judge = config.filter.mode == SelectionMode::SP_AV_LJ;
    Backends backends = make_backends(config, false, needs_judge, false);
    fs::create_directories(stage_dir);
    write_file(stage_dir / "manifest.json", pretty(stage_manifest(config, "filter")));

    struct Row {
        bool missing = false;
        FilterOutcome outcome;
    };
    std::vector<Row> rows(questions.size());
    parallel_for(questions.size(), config.workers, [&](std::size_t i) {
        const Question& q = questions[i];
        fs::path cand_path = candidates_dir / (sanitize_component(q.id) + ".jsonl");
        rows[i].outcome.question_id = q.id;
        rows[i].outcome.selection_mode = config.filter.mode;
        if (!fs::exists(cand_path)) {
            rows[i].missing = true;
            rows[i].outcome.failed = true;
            rows[i].outcome.failure = "candidates file missing; run generate for this question";
            return;
        }
        try {
            std::vector<Trace> candidates = read_trace_lines(cand_path);
            rows[i].outcome =
                run_filter_pipeline(candidates, q, config.filter, backends.judge.get());
        } catch (const std::exception& e) {
            rows[i].outcome.failed = true;
            rows[i].outcome.failure = e.what();
        }
    });

    std::string outcome_lines;
    std::string selected_lines;
    int selected = 0;
    int no_candidates = 0;
    int eliminated_stage1 = 0;
    int eliminated_stage2 = 0;
    int judge_failed = 0;
    int missing = 0;
    fs::path transcripts_dir = stage_dir / "judge_transcripts";
    for (const Row& row : rows) {
        const FilterOutcome& o = row.outcome;
        outcome_lines += filter_outcome_to_json(o).dump() + "\n";
        if (o.selected) {
            ++selected;
            selected_lines += trace_to_json(*o.selected).dump() + "\n";
        }
        if (row.missing) {
            ++missing;
        } else if (o.failed) {
            ++judge_failed;
            std::fprintf(stderr, "filter failed for %s: %s\n", o.question_id.c_str(), o.failure.c_str());
        } else if (o.candidates_in == 0) {
            ++no_candidates;
        } else if (o.survivors_stage1 == 0) {
            ++eliminated_stage1;
        } else if (o.survivors_stage2 == 0) {
            ++eliminated_stage2;
        }
        for (const JudgeAttempt& attempt : o.judge_attempts) {
            std::string transcript;
            for (std::size_t k = 0; k < attempt.raw_responses.size(); ++k) {
                transcript += "=== attempt " + std::to_string(k + 1) + " ===\n";
                transcript += attempt.raw_responses[k];
                transcript += "\n";
            }
            write_file(transcripts_dir / (sanitize_component(attempt.trace_id) + ".txt"), transcript);
        }
    }
    write_file(outcomes_path, outcome_lines);
    write_file(selected_path, selected_lines);

    Json summary = Json::object();
    summary["mode"] = to_string(config.filter.mode);
    summary["questions"] = questions.size();
    summary["selected"] = selected;
    summary["no_candidates"] = no_candidates;
    summary["eliminated_stage1"] = eliminated_stage1;
    summary["eliminated_stage2"] = eliminated_stage2;
    summary["judge_failed"] = judge_failed;
    summary["missing_candidates"] = missing;
    summary["judge_calls"] = backends.judge ? backends.judge->calls() : 0;
    write_file(summary_path, pretty(summary));

    std::printf("filter[%s]: %zu questions, %d selected, %d without candidates, %d failed\n",
                to_string(config.filter.mode).c_str(), questions.size(), selected,
                no_candidates + missing, judge_failed);
    return (judge_failed > 0 || missing > 0) ? 1 : 0;
}

int cmd_export(const RunConfig& config, bool force) {
    fs::path selected_path = fs::path(config.paths.output_dir) / "filter" / "selected.jsonl";
    if (!fs::exists(selected_path)) {
        throw ConfigError("no selected traces at " + selected_path.string() + "; run filter first");
    }
    fs::path stage_dir = fs::path(config.paths.output_dir) / "export";
    fs::path training_path = stage_dir / "training.jsonl";
    fs::path manifest_path = stage_dir / "training.jsonl.manifest.json";
    if (!force && fs::exists(training_path) && fs::exists(manifest_path)) {
        std::printf("export: outputs already present, skipping (use --force to redo)\n");
        return 0;
    }

    std::vector<Question> questions = load_dataset(config.paths.questions, config.dataset, config.limit);
    std::map<std::string, const Question*> by_id;
    for (const Question& q : questions) by_id[q.id] = &q;

    std::vector<Trace> traces = read_trace_lines(selected_path);
    std::vector<TrainingSample> samples;
    samples.reserve(traces.size());
    for (const Trace& trace : traces) {
        auto it = by_id.find(trace.question_id);
        if (it == by_id.end()) {
            throw ValidationError("export failed for question '" + trace.question_id +
                                  "': not present in " + config.paths.questions);
        }
        try {
            samples.push_back(render_trace(trace, *it->second));
        } catch (const Error& e) {
            throw ValidationError("export failed for question '" + trace.question_id + "': " + e.what());
        }
    }

    fs::create_directories(stage_dir);
    Json extra = stage_manifest(config, "export");
    Json manifest = export_samples(samples, training_path.string(), extra);
    std::printf("export: %zu samples -> %s (content hash %s)\n", samples.size(),
                training_path.string().c_str(),
                manifest.at("content_hash").get<std::string>().c_str());
    return 0;
}

int cmd_eval(const RunConfig& config, bool force) {
    std::vector<Question> questions = load_dataset(config.paths.questions, config.dataset, config.limit);
    fs::path stage_dir = fs::path(config.paths.output_dir) / "eval";
    fs::path records_path = stage_dir / "records.jsonl";
    fs::path summary_path = stage_dir / "summary.json";
    fs::path by_type_path = stage_dir / "by_type.csv";
    if (!force && fs::exists(records_path) && fs::exists(summary_path) && fs::exists(by_type_path)) {
        std::printf("eval: outputs already present, skipping (use --force to redo)\n");
        return 0;
    }

    Backends backends = make_backends(config, true, false, true);
    fs::create_directories(stage_dir);
    write_file(stage_dir / "manifest.json", pretty(stage_manifest(config, "eval")));

    EvalConfig eval_config;
    eval_config.max_steps = config.eval_max_steps;
    eval_config.top_k = config.eval_top_k;
    eval_config.workers = config.workers;
    eval_config.dataset_label = to_string(config.dataset);
    auto [summary, records] = evaluate_dataset(questions, *backends.policy, *backends.retriever,
                                               eval_config);

    std::string record_lines;
    for (const EvalRecord& record : records) record_lines += eval_record_to_json(record).dump() + "\n";
    write_file(records_path, record_lines);
    write_file(summary_path, pretty(metrics_summary_to_json(summary)));
    write_file(by_type_path, by_type_csv(summary));

    auto cell = [](const std::optional<double>& v) {
        char buf[32];
        if (!v) return std::string("-");
        std::snprintf(buf, sizeof(buf), "%.2f", *v);
        return std::string(buf);
    };
    std::printf("%-16s %6s %8s %8s %8s %7s %7s\n", "dataset", "n", "em", "acc", "f1", "unans",
                "failed");
    std::printf("%-16s %6d %8s %8s %8s %7d %7d\n", summary.dataset.c_str(), summary.n,
                cell(summary.em).c_str(), cell(summary.accuracy).c_str(), cell(summary.f1).c_str(),
                summary.unanswered, summary.failed);
    for (const auto& [type, agg] : summary.by_question_type) {
        std::printf("  %-14s %6d %8.2f %8.2f %8.2f\n", type.c_str(), agg.n, agg.em, agg.accuracy,
                    agg.f1);
    }
    return summary.failed > 0 ? 1 : 0;
}

}  // namespace traceforge
