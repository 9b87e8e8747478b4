#include "traceforge/eval/datasets.hpp"

#include <sstream>
#include <utility>

#include "traceforge/core/errors.hpp"
#include "traceforge/core/json_codec.hpp"

namespace traceforge {
namespace {

const Json& require(const Json& j, const char* field, const std::string& where) {
    if (!j.is_object() || !j.contains(field)) {
        throw ValidationError(where + ": missing field '" + field + "'");
    }
    return j.at(field);
}

std::string require_string(const Json& j, const char* field, const std::string& where) {
    const Json& v = require(j, field, where);
    if (!v.is_string()) throw ValidationError(where + ": field '" + field + "' must be a string");
    return v.get<std::string>();
}

void push_unique(std::vector<std::string>& list, const std::string& value) {
    if (value.empty()) return;
    for (const std::string& existing : list) {
        if (existing == value) return;
    }
    list.push_back(value);
}

Question map_two_wiki(const Json& j, const std::string& where) {
    Question q;
    q.dataset = DatasetKind::TwoWiki;
    q.id = require_string(j, "_id", where);
    q.text = require_string(j, "question", where);
    q.gold_answers.push_back(require_string(j, "answer", where));
    if (j.contains("type") && j.at("type").is_string()) q.question_type = j.at("type").get<std::string>();
    // Evidence triples [subject, relation, object]; objects are the
    // intermediate answers of the reasoning chain.
    if (j.contains("evidences") && j.at("evidences").is_array()) {
        for (const Json& triple : j.at("evidences")) {
            if (triple.is_array() && triple.size() == 3 && triple.at(2).is_string()) {
                push_unique(q.gold_sub_answers, triple.at(2).get<std::string>());
            }
        }
    }
    return q;
}

Question map_musique(const Json& j, const std::string& where) {
    Question q;
    q.dataset = DatasetKind::Musique;
    q.id = require_string(j, "id", where);
    q.text = require_string(j, "question", where);
    q.gold_answers.push_back(require_string(j, "answer", where));
    if (j.contains("answer_aliases") && j.at("answer_aliases").is_array()) {
        for (const Json& alias : j.at("answer_aliases")) {
            if (alias.is_string()) push_unique(q.gold_answers, alias.get<std::string>());
        }
    }
    if (j.contains("question_decomposition") && j.at("question_decomposition").is_array()) {
        for (const Json& hop : j.at("question_decomposition")) {
            if (hop.is_object() && hop.contains("answer") && hop.at("answer").is_string()) {
                push_unique(q.gold_sub_answers, hop.at("answer").get<std::string>());
            }
        }
    }
    return q;
}

Question map_hotpot(const Json& j, const std::string& where) {
    Question q;
    q.dataset = DatasetKind::HotpotQa;
    q.id = require_string(j, "_id", where);
    q.text = require_string(j, "question", where);
    q.gold_answers.push_back(require_string(j, "answer", where));
    if (j.contains("type") && j.at("type").is_string()) q.question_type = j.at("type").get<std::string>();
    return q;
}

Question map_web_questions(const Json& j, const std::string& where, int index) {
    Question q;
    q.dataset = DatasetKind::WebQuestions;
    if (j.contains("id") && j.at("id").is_string()) {
        q.id = j.at("id").get<std::string>();
    } else {
        q.id = "wq-" + std::to_string(index);
    }
    if (j.contains("question")) {
        q.text = require_string(j, "question", where);
    } else {
        q.text = require_string(j, "utterance", where);
    }
    const Json& answers = require(j, "answers", where);
    if (!answers.is_array()) throw ValidationError(where + ": field 'answers' must be an array");
    for (const Json& a : answers) {
        if (a.is_string()) push_unique(q.gold_answers, a.get<std::string>());
    }
    return q;
}

Question map_custom(const Json& j, const std::string& where) {
    Question q;
    q.dataset = DatasetKind::Custom;
    q.id = require_string(j, "id", where);
    if (j.contains("question")) {
        q.text = require_string(j, "question", where);
    } else {
        q.text = require_string(j, "text", where);
    }
    const Json& answers = require(j, "gold_answers", where);
    if (!answers.is_array()) throw ValidationError(where + ": field 'gold_answers' must be an array");
    for (const Json& a : answers) {
        if (a.is_string()) push_unique(q.gold_answers, a.get<std::string>());
    }
    if (j.contains("gold_sub_answers") && j.at("gold_sub_answers").is_array()) {
        for (const Json& a : j.at("gold_sub_answers")) {
            if (a.is_string()) push_unique(q.gold_sub_answers, a.get<std::string>());
        }
    } else if (j.contains("decomposition") && j.at("decomposition").is_array()) {
        for (const Json& hop : j.at("decomposition")) {
            if (hop.is_object() && hop.contains("answer") && hop.at("answer").is_string()) {
                push_unique(q.gold_sub_answers, hop.at("answer").get<std::string>());
            }
        }
    }
    if (j.contains("question_type") && j.at("question_type").is_string()) {
        q.question_type = j.at("question_type").get<std::string>();
    }
    return q;
}

}  // namespace

std::vector<Question> load_dataset(const std::string& path, DatasetKind kind, int limit) {
    std::vector<JsonRecord> records = read_json_records(path);
    std::vector<Question> questions;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (limit > 0 && static_cast<int>(questions.size()) >= limit) break;
        const JsonRecord& record = records[i];
        Question q;
        switch (kind) {
            case DatasetKind::TwoWiki: q = map_two_wiki(record.value, record.where); break;
            case DatasetKind::Musique: q = map_musique(record.value, record.where); break;
            case DatasetKind::HotpotQa: q = map_hotpot(record.value, record.where); break;
            case DatasetKind::WebQuestions:
                q = map_web_questions(record.value, record.where, static_cast<int>(i));
                break;
            case DatasetKind::Custom: q = map_custom(record.value, record.where); break;
        }
        try {
            validate_question(q);
        } catch (const ValidationError& e) {
            throw ValidationError(record.where + ": " + e.what());
        }
        questions.push_back(std::move(q));
    }
    return questions;
}

}  // namespace traceforge
