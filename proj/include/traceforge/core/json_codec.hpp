#pragma once
// Canonical JSON encodings for the shared domain types. Field names and
// order are fixed; every file format in the pipeline builds on these.

#include "traceforge/core/types.hpp"

#include <nlohmann/json.hpp>

namespace traceforge {

// Insertion-ordered so serialized output is byte-stable.
using Json = nlohmann::ordered_json;

Json question_to_json(const Question& q);
Question question_from_json(const Json& j);

Json document_to_json(const Document& d);
Document document_from_json(const Json& j);

// Steps are tagged with "kind": "thought" | "subqa".
Json step_to_json(const Step& s);
Step step_from_json(const Json& j);

Json trace_to_json(const Trace& t);
Trace trace_from_json(const Json& j);

// Shared helpers for readers of line- and file-oriented JSON.
Json parse_json(const std::string& text, const std::string& where);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// One record of a file that is either a single JSON array or JSONL,
// with a location string for error messages.
struct JsonRecord {
    Json value;
    std::string where;
};

// Sniffs the format (leading '[' means one array, anything else JSONL)
// and returns the records in file order.
std::vector<JsonRecord> read_json_records(const std::string& path);

}  // namespace traceforge
