// traceforge: generate, filter, export, and evaluate multi-hop reasoning
// traces from one declarative config file.
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/pipeline/commands.hpp"
#include "traceforge/pipeline/run_config.hpp"

namespace {

struct StageArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> mode;
    std::optional<int> limit;
    bool force = false;
    bool mock = false;
};

// Registers the shared flag set on one subcommand.
void add_stage_options(CLI::App* cmd, StageArgs& args) {
    cmd->add_option("--config", args.config_path, "Run configuration JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "Override the configured random seed");
    cmd->add_option("--mode", args.mode, "Override the selection mode (SP, SP_AV, SP_AV_LJ)");
    cmd->add_option("--limit", args.limit, "Process at most this many questions (0 = all)");
    cmd->add_flag("--force", args.force, "Recompute outputs that already exist");
    cmd->add_flag("--mock", args.mock, "Use scripted offline backends");
}

int run_stage(const StageArgs& args,
              const std::function<int(const traceforge::RunConfig&, bool)>& stage) {
    traceforge::RunConfig config = traceforge::load_run_config(args.config_path);
    traceforge::CliOverrides overrides;
    overrides.seed = args.seed;
    overrides.mode = args.mode;
    overrides.limit = args.limit;
    overrides.mock = args.mock;
    traceforge::apply_overrides(config, overrides);
    return stage(config, args.force);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-hop reasoning trace pipeline"};
    app.require_subcommand(1);

    StageArgs generate_args;
    StageArgs filter_args;
    StageArgs export_args;
    StageArgs eval_args;
    CLI::App* generate = app.add_subcommand("generate", "Search each question and dump candidate traces");
    CLI::App* filter = app.add_subcommand("filter", "Select the best trace per question");
    CLI::App* export_cmd = app.add_subcommand("export", "Write the masked training dataset");
    CLI::App* eval_cmd = app.add_subcommand("eval", "Run the inference agent and score it");
    add_stage_options(generate, generate_args);
    add_stage_options(filter, filter_args);
    add_stage_options(export_cmd, export_args);
    add_stage_options(eval_cmd, eval_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) return run_stage(generate_args, traceforge::cmd_generate);
        if (filter->parsed()) return run_stage(filter_args, traceforge::cmd_filter);
        if (export_cmd->parsed()) return run_stage(export_args, traceforge::cmd_export);
        if (eval_cmd->parsed()) return run_stage(eval_args, traceforge::cmd_eval);
    } catch (const traceforge::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
