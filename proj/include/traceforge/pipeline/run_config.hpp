// Declarative run configuration: one JSON document driving every stage.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "traceforge/backend/config.hpp"
#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/types.hpp"
#include "traceforge/eval/harness.hpp"
#include "traceforge/filter/pipeline.hpp"
#include "traceforge/mcts/tree.hpp"

namespace traceforge {

struct RunPaths {
    std::string questions;   // dataset file the run reads
    std::string corpus;      // passage JSONL for in-memory retrieval; may be empty with a remote retriever
    std::string output_dir;  // created on demand; every stage writes under it
    std::string prompt_dir;  // optional prompt-body overrides
};

struct RunConfig {
    std::uint64_t seed = 0;
    int workers = 1;  // question-level parallelism
    int limit = 0;    // 0 = all questions
    bool mock = false;
    DatasetKind dataset = DatasetKind::Custom;
    MctsConfig mcts;
    BackendConfig generator;
    BackendConfig judge;
    RetrieverConfig retriever;
    FilterConfig filter;
    int eval_max_steps = 12;
    int eval_top_k = 3;
    RunPaths paths;
    // The document as written, before environment interpolation. Embedded in
    // manifests so secret values referenced via ${VAR} never reach disk.
    Json raw;
};

// Replaces each ${NAME} with the environment variable's value. An unset
// variable is a configuration error; everything else passes through.
std::string interpolate_env(const std::string& text);

// Parses, interpolates, maps, and checks that referenced input paths exist.
RunConfig load_run_config(const std::string& path);

// Command-line values that take precedence over the file.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;  // selection mode name
    std::optional<int> limit;
    bool mock = false;
};

void apply_overrides(RunConfig& config, const CliOverrides& overrides);

}  // namespace traceforge
