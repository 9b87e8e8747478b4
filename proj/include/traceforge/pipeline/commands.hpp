// The four pipeline stages behind the CLI subcommands. Each stage reads and
// writes files under the configured output directory and returns a process
// exit code: 0 for success, 1 when some questions failed.
#pragma once

#include "traceforge/pipeline/run_config.hpp"

namespace traceforge {

// Runs tree search per question and dumps trees plus correct candidate
// traces. Questions whose tree dump already exists are skipped unless
// force is set.
int cmd_generate(const RunConfig& config, bool force);

// Filters each question's candidates under the configured selection mode
// and writes outcome records, the selected traces, judge transcripts, and
// a summary of discard reasons.
int cmd_filter(const RunConfig& config, bool force);

// Renders the selected traces into masked training samples and writes the
// training JSONL with its manifest.
int cmd_export(const RunConfig& config, bool force);

// Runs the iterative inference agent over the dataset and writes records,
// a metrics summary, and a per-question-type breakdown.
int cmd_eval(const RunConfig& config, bool force);

// Replaces every character outside [A-Za-z0-9._-] so an id can name a file.
std::string sanitize_component(const std::string& id);

}  // namespace traceforge
