#include "traceforge/core/json_codec.hpp"

#include "traceforge/core/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

namespace traceforge {

namespace {

void require_field(const Json& j, const char* field, const std::string& what) {
    if (!j.contains(field)) {
        throw ValidationError(what + ": missing field \"" + field + "\"");
    }
}

}  // namespace

Json question_to_json(const Question& q) {
    Json j;
    j["id"] = q.id;
    j["text"] = q.text;
    j["gold_answers"] = q.gold_answers;
    j["gold_sub_answers"] = q.gold_sub_answers;
    j["dataset"] = to_string(q.dataset);
    if (q.question_type) j["question_type"] = *q.question_type;
    return j;
}

Question question_from_json(const Json& j) {
    for (const char* f : {"id", "text", "gold_answers", "gold_sub_answers", "dataset"}) {
        require_field(j, f, "question");
    }
    Question q;
    q.id = j.at("id").get<std::string>();
    q.text = j.at("text").get<std::string>();
    q.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
    q.gold_sub_answers = j.at("gold_sub_answers").get<std::vector<std::string>>();
    q.dataset = dataset_kind_from_string(j.at("dataset").get<std::string>());
    if (j.contains("question_type") && !j.at("question_type").is_null()) {
        q.question_type = j.at("question_type").get<std::string>();
    }
    validate_question(q);
    return q;
}

Json document_to_json(const Document& d) {
    Json j;
    j["doc_id"] = d.doc_id;
    j["title"] = d.title;
    j["text"] = d.text;
    j["score"] = d.score;
    j["rank"] = d.rank;
    return j;
}

Document document_from_json(const Json& j) {
    for (const char* f : {"doc_id", "title", "text", "score", "rank"}) {
        require_field(j, f, "document");
    }
    Document d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.title = j.at("title").get<std::string>();
    d.text = j.at("text").get<std::string>();
    d.score = j.at("score").get<double>();
    d.rank = j.at("rank").get<int>();
    if (d.rank < 1) throw ValidationError("document " + d.doc_id + ": rank < 1");
    return d;
}

Json step_to_json(const Step& s) {
    Json j;
    if (is_thought(s)) {
        const auto& t = as_thought(s);
        j["kind"] = "thought";
        j["text"] = t.text;
        j["is_terminal"] = t.is_terminal;
        if (t.final_answer) j["final_answer"] = *t.final_answer;
    } else {
        const auto& q = as_subqa(s);
        j["kind"] = "subqa";
        j["sub_question"] = q.sub_question;
        j["documents"] = Json::array();
        for (const auto& d : q.documents) j["documents"].push_back(document_to_json(d));
        j["sub_answer"] = q.sub_answer;
        j["answer_found"] = q.answer_found;
    }
    return j;
}

Step step_from_json(const Json& j) {
    require_field(j, "kind", "step");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "thought") {
        require_field(j, "text", "thought step");
        ThoughtStep t = make_thought(j.at("text").get<std::string>());
        // Decoder trusts the text; stored flags must agree with it.
        if (j.contains("is_terminal") && j.at("is_terminal").get<bool>() != t.is_terminal) {
            throw ValidationError("thought step: is_terminal disagrees with marker in text");
        }
        return t;
    }
    if (kind == "subqa") {
        for (const char* f : {"sub_question", "documents", "sub_answer"}) {
            require_field(j, f, "subqa step");
        }
        std::vector<Document> docs;
        for (const auto& dj : j.at("documents")) docs.push_back(document_from_json(dj));
        return make_subqa(j.at("sub_question").get<std::string>(), std::move(docs),
                          j.at("sub_answer").get<std::string>());
    }
    throw ValidationError("step: unknown kind \"" + kind + "\"");
}

Json trace_to_json(const Trace& t) {
    Json j;
    j["trace_id"] = t.trace_id;
    j["question_id"] = t.question_id;
    j["steps"] = Json::array();
    for (const auto& s : t.steps) j["steps"].push_back(step_to_json(s));
    if (t.predicted_answer) j["predicted_answer"] = *t.predicted_answer;
    j["length"] = t.length();
    j["source"] = to_string(t.source);
    return j;
}

Trace trace_from_json(const Json& j) {
    for (const char* f : {"trace_id", "question_id", "steps", "length", "source"}) {
        require_field(j, f, "trace");
    }
    std::vector<Step> steps;
    for (const auto& sj : j.at("steps")) steps.push_back(step_from_json(sj));
    if (j.at("length").get<int>() != static_cast<int>(steps.size())) {
        throw ValidationError("trace " + j.at("trace_id").get<std::string>() +
                              ": length field disagrees with step count");
    }
    Trace t = Trace::build(j.at("trace_id").get<std::string>(),
                           j.at("question_id").get<std::string>(), std::move(steps),
                           trace_source_from_string(j.at("source").get<std::string>()));
    if (j.contains("predicted_answer") && !j.at("predicted_answer").is_null()) {
        const auto stored = j.at("predicted_answer").get<std::string>();
        if (!t.predicted_answer || *t.predicted_answer != stored) {
            throw ValidationError("trace " + t.trace_id +
                                  ": predicted_answer disagrees with terminal step");
        }
    }
    return t;
}

Json parse_json(const std::string& text, const std::string& where) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ValidationError(where + ": malformed JSON");
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("write failed for " + path);
}

std::vector<JsonRecord> read_json_records(const std::string& path) {
    std::string body = read_text_file(path);
    std::vector<JsonRecord> records;
    std::size_t first = body.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && body[first] == '[') {
        Json root = parse_json(body, path);
        int index = 0;
        for (Json& item : root) {
            records.push_back({std::move(item), path + " item " + std::to_string(index)});
            ++index;
        }
        return records;
    }
    std::istringstream lines(body);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = path + ":" + std::to_string(line_no);
        records.push_back({parse_json(line, where), std::move(where)});
    }
    return records;
}

}  // namespace traceforge
