#include "traceforge/pipeline/run_config.hpp"

#include <cstdlib>
#include <filesystem>

#include "traceforge/core/errors.hpp"

namespace traceforge {
namespace {

bool name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Applies interpolate_env to every string value in the document.
Json interpolate_tree(const Json& j) {
    if (j.is_string()) return interpolate_env(j.get<std::string>());
    if (j.is_object()) {
        Json out = Json::object();
        for (const auto& [key, value] : j.items()) out[key] = interpolate_tree(value);
        return out;
    }
    if (j.is_array()) {
        Json out = Json::array();
        for (const Json& value : j) out.push_back(interpolate_tree(value));
        return out;
    }
    return j;
}

const Json* child(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) return nullptr;
    return &j.at(key);
}

void read_string(const Json& j, const char* key, std::string& out) {
    if (const Json* v = child(j, key)) {
        if (!v->is_string()) throw ConfigError(std::string("config field '") + key + "' must be a string");
        out = v->get<std::string>();
    }
}

void read_int(const Json& j, const char* key, int& out) {
    if (const Json* v = child(j, key)) {
        if (!v->is_number_integer()) throw ConfigError(std::string("config field '") + key + "' must be an integer");
        out = v->get<int>();
    }
}

void read_double(const Json& j, const char* key, double& out) {
    if (const Json* v = child(j, key)) {
        if (!v->is_number()) throw ConfigError(std::string("config field '") + key + "' must be a number");
        out = v->get<double>();
    }
}

void read_bool(const Json& j, const char* key, bool& out) {
    if (const Json* v = child(j, key)) {
        if (!v->is_boolean()) throw ConfigError(std::string("config field '") + key + "' must be a boolean");
        out = v->get<bool>();
    }
}

BackendConfig read_backend(const Json& j, const char* key) {
    BackendConfig cfg;
    if (const Json* v = child(j, key)) cfg = backend_config_from_json(*v);
    return cfg;
}

void require_file(const std::string& path, const char* label) {
    if (path.empty()) return;
    if (!std::filesystem::exists(path)) {
        throw ConfigError(std::string(label) + " path does not exist: " + path);
    }
}

}  // namespace

std::string interpolate_env(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
            std::size_t name_begin = i + 2;
            std::size_t name_end = name_begin;
            while (name_end < text.size() && name_char(text[name_end])) ++name_end;
            if (name_end > name_begin && name_end < text.size() && text[name_end] == '}') {
                std::string name = text.substr(name_begin, name_end - name_begin);
                const char* value = std::getenv(name.c_str());
                if (value == nullptr) {
                    throw ConfigError("config references environment variable '" + name +
                                      "' which is not set");
                }
                out += value;
                i = name_end + 1;
                continue;
            }
        }
        out += text[i];
        ++i;
    }
    return out;
}

RunConfig load_run_config(const std::string& path) {
    std::string body;
    try {
        body = read_text_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    RunConfig config;
    try {
        config.raw = parse_json(body, path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!config.raw.is_object()) throw ConfigError(path + ": config document must be a JSON object");
    Json doc = interpolate_tree(config.raw);

    if (const Json* v = child(doc, "seed")) {
        if (!v->is_number_integer() || v->get<long long>() < 0) {
            throw ConfigError("config field 'seed' must be a non-negative integer");
        }
        config.seed = v->get<std::uint64_t>();
    }
    read_int(doc, "workers", config.workers);
    read_int(doc, "limit", config.limit);
    read_bool(doc, "mock", config.mock);
    if (config.workers < 1) throw ConfigError("config field 'workers' must be at least 1");
    if (config.limit < 0) throw ConfigError("config field 'limit' must be non-negative");

    std::string dataset_name = to_string(config.dataset);
    read_string(doc, "dataset", dataset_name);
    try {
        config.dataset = dataset_kind_from_string(dataset_name);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }

    if (const Json* v = child(doc, "mcts")) {
        try {
            config.mcts = mcts_config_from_json(*v);
            validate_config(config.mcts);
        } catch (const Error& e) {
            throw ConfigError(std::string("config section 'mcts': ") + e.what());
        }
    }
    config.generator = read_backend(doc, "generator");
    config.judge = read_backend(doc, "judge");
    if (const Json* v = child(doc, "retriever")) config.retriever = retriever_config_from_json(*v);

    if (const Json* v = child(doc, "filter")) {
        std::string mode = to_string(config.filter.mode);
        read_string(*v, "selection_mode", mode);
        try {
            config.filter.mode = selection_mode_from_string(mode);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
        read_double(*v, "w_redundant", config.filter.w_redundant);
        read_double(*v, "w_irrelevant", config.filter.w_irrelevant);
        read_int(*v, "judge_workers", config.filter.judge_workers);
        if (config.filter.judge_workers < 1) {
            throw ConfigError("config field 'judge_workers' must be at least 1");
        }
    }
    if (const Json* v = child(doc, "eval")) {
        read_int(*v, "max_steps", config.eval_max_steps);
        read_int(*v, "top_k", config.eval_top_k);
        if (config.eval_max_steps < 1) throw ConfigError("config field 'eval.max_steps' must be at least 1");
        if (config.eval_top_k < 1) throw ConfigError("config field 'eval.top_k' must be at least 1");
    }

    if (const Json* v = child(doc, "paths")) {
        read_string(*v, "questions", config.paths.questions);
        read_string(*v, "corpus", config.paths.corpus);
        read_string(*v, "output_dir", config.paths.output_dir);
        read_string(*v, "prompt_dir", config.paths.prompt_dir);
    }
    if (config.paths.questions.empty()) throw ConfigError("config field 'paths.questions' is required");
    if (config.paths.output_dir.empty()) throw ConfigError("config field 'paths.output_dir' is required");
    require_file(config.paths.questions, "questions");
    require_file(config.paths.corpus, "corpus");
    require_file(config.paths.prompt_dir, "prompt_dir");
    return config;
}

void apply_overrides(RunConfig& config, const CliOverrides& overrides) {
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.mode) {
        try {
            config.filter.mode = selection_mode_from_string(*overrides.mode);
        } catch (const Error& e) {
            throw ConfigError(e.what());
        }
    }
    if (overrides.limit) {
        if (*overrides.limit < 0) throw ConfigError("--limit must be non-negative");
        config.limit = *overrides.limit;
    }
    if (overrides.mock) config.mock = true;
}

}  // namespace traceforge
