#include "traceforge/backend/scripted.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <utility>

#include "traceforge/core/errors.hpp"
#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/normalize.hpp"
#include "traceforge/filter/judge.hpp"

namespace traceforge {
namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// True when any found sub-answer in the chain already carries hop's answer.
bool hop_covered(const PlaybookHop& hop, const std::vector<std::string>& found_answers) {
    for (const std::string& answer : found_answers) {
        if (contains_gold(answer, {hop.answer})) return true;
    }
    return false;
}

std::vector<std::string> found_answers_in(const std::vector<Step>& steps) {
    std::vector<std::string> found;
    for (const Step& step : steps) {
        if (is_subqa(step) && as_subqa(step).answer_found) found.push_back(as_subqa(step).sub_answer);
    }
    return found;
}

bool last_step_failed_retrieval(const std::vector<Step>& steps) {
    if (steps.empty()) return false;
    const Step& last = steps.back();
    return is_subqa(last) && !as_subqa(last).answer_found;
}

bool chain_has_subqa(const std::vector<Step>& steps) {
    for (const Step& step : steps) {
        if (is_subqa(step)) return true;
    }
    return false;
}

// Pads base variants out to n, keeping the final-answer marker parseable by
// inserting the pass tag before it rather than after the answer span.
std::vector<std::string> take_variants(const std::vector<std::string>& base, int n) {
    std::vector<std::string> out;
    for (int i = 0; i < n; ++i) {
        if (i < static_cast<int>(base.size())) {
            out.push_back(base[static_cast<std::size_t>(i)]);
            continue;
        }
        std::string v = base[static_cast<std::size_t>(i) % base.size()];
        std::string tag = " (pass " + std::to_string(i) + ")";
        std::size_t marker = v.find(kFinalAnswerMarker);
        if (marker != std::string::npos) {
            v.insert(marker, "(pass " + std::to_string(i) + ") ");
        } else {
            v += tag;
        }
        out.push_back(v);
    }
    return out;
}

const char* kVagueOpener = "Tell me something relevant to this question.";
const char* kVagueFollowup = "What else should I know here?";

// Parsed line of a judged-trace rendering: "Step K [kind]: rest".
bool parse_step_line(const std::string& line, int& index, std::string& kind, std::string& rest) {
    const std::string prefix = "Step ";
    if (line.rfind(prefix, 0) != 0) return false;
    std::size_t i = prefix.size();
    std::size_t digits = i;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits == i) return false;
    index = std::stoi(line.substr(i, digits - i));
    if (line.compare(digits, 2, " [") != 0) return false;
    std::size_t close = line.find("]: ", digits);
    if (close == std::string::npos) return false;
    kind = line.substr(digits + 2, close - digits - 2);
    rest = line.substr(close + 3);
    return true;
}

struct RenderedSubqa {
    std::string question;
    std::string documents;
    std::string answer;
    bool has_answer = false;
};

}  // namespace

std::vector<Playbook> load_playbooks(const std::string& path) {
    std::vector<Playbook> playbooks;
    for (const JsonRecord& record : read_json_records(path)) {
        const Json& j = record.value;
        if (!j.is_object() || !j.contains("id") || !j.at("id").is_string()) {
            throw ValidationError(record.where + ": playbook record needs a string 'id'");
        }
        Playbook pb;
        pb.question_id = j.at("id").get<std::string>();
        if (!j.contains("gold_answers") || !j.at("gold_answers").is_array() || j.at("gold_answers").empty()) {
            throw ValidationError(record.where + ": playbook record needs non-empty 'gold_answers'");
        }
        for (const Json& a : j.at("gold_answers")) {
            if (a.is_string()) pb.gold_answers.push_back(a.get<std::string>());
        }
        if (pb.gold_answers.empty()) {
            throw ValidationError(record.where + ": 'gold_answers' holds no strings");
        }
        if (!j.contains("decomposition") || !j.at("decomposition").is_array() || j.at("decomposition").empty()) {
            throw ValidationError(record.where + ": playbook record needs non-empty 'decomposition'");
        }
        for (const Json& hop : j.at("decomposition")) {
            if (!hop.is_object() || !hop.contains("sub_question") || !hop.at("sub_question").is_string() ||
                !hop.contains("answer") || !hop.at("answer").is_string()) {
                throw ValidationError(record.where + ": decomposition entries need 'sub_question' and 'answer'");
            }
            pb.hops.push_back({hop.at("sub_question").get<std::string>(), hop.at("answer").get<std::string>()});
        }
        pb.final_answer = j.contains("final_answer") && j.at("final_answer").is_string()
                              ? j.at("final_answer").get<std::string>()
                              : pb.gold_answers.front();
        if (j.contains("detour") && j.at("detour").is_boolean()) pb.detour = j.at("detour").get<bool>();
        playbooks.push_back(std::move(pb));
    }
    return playbooks;
}

ScriptedPolicyBackend::ScriptedPolicyBackend(std::vector<Playbook> playbooks) {
    for (Playbook& pb : playbooks) {
        std::string id = pb.question_id;
        if (!playbooks_.emplace(id, std::move(pb)).second) {
            throw ValidationError("duplicate playbook for question '" + id + "'");
        }
    }
}

const Playbook& ScriptedPolicyBackend::playbook_for(const Question& question) const {
    auto it = playbooks_.find(question.id);
    if (it == playbooks_.end()) {
        throw BackendError("no playbook for question '" + question.id + "'");
    }
    return it->second;
}

std::vector<std::string> ScriptedPolicyBackend::thoughts(const ChainView& chain, int n, double) {
    calls_.fetch_add(1);
    if (n < 1) throw BackendError("thought request asked for " + std::to_string(n) + " completions");
    const Playbook& pb = playbook_for(chain.question);
    std::vector<std::string> found = found_answers_in(chain.steps);
    std::size_t next = 0;
    while (next < pb.hops.size() && hop_covered(pb.hops[next], found)) ++next;

    std::vector<std::string> base;
    if (next == pb.hops.size()) {
        base = {"All the evidence is gathered. " + std::string(kFinalAnswerMarker) + " " + pb.final_answer,
                "The collected sub-answers settle it. " + std::string(kFinalAnswerMarker) + " " +
                    pb.final_answer,
                "Every sub-question is resolved. " + std::string(kFinalAnswerMarker) + " " + pb.final_answer};
    } else if (last_step_failed_retrieval(chain.steps)) {
        const std::string& q = pb.hops[next].sub_question;
        base = {"That retrieval came back empty, so I should rephrase and ask: " + q,
                "The last query found nothing; a clearer wording would be: " + q,
                "Nothing useful was retrieved, so I will reword the query as: " + q};
    } else {
        const std::string& q = pb.hops[next].sub_question;
        base = {"I need to find out: " + q, "The next fact to establish is: " + q,
                "Before answering I must determine: " + q};
    }
    return take_variants(base, n);
}

std::vector<std::string> ScriptedPolicyBackend::subquestions(const ChainView& chain, int n, double) {
    calls_.fetch_add(1);
    if (n < 1) throw BackendError("sub-question request asked for " + std::to_string(n) + " completions");
    const Playbook& pb = playbook_for(chain.question);
    std::vector<std::string> found = found_answers_in(chain.steps);
    std::size_t next = 0;
    while (next < pb.hops.size() && hop_covered(pb.hops[next], found)) ++next;

    std::vector<std::string> base;
    if (next == pb.hops.size()) {
        const std::string& q = pb.hops.back().sub_question;
        base = {q, "Once more: " + q, "To confirm: " + q};
    } else if (pb.detour && !chain_has_subqa(chain.steps)) {
        base = {kVagueOpener, pb.hops[next].sub_question, kVagueFollowup};
    } else {
        const std::string& q = pb.hops[next].sub_question;
        base = {q, "To be precise: " + q, kVagueFollowup};
    }
    return take_variants(base, n);
}

std::string ScriptedPolicyBackend::subanswer(const ChainView& chain, const std::string& sub_question,
                                             const std::vector<Document>& documents, double) {
    calls_.fetch_add(1);
    if (trimmed(sub_question).empty()) throw BackendError("sub-answer request with empty sub-question");
    const Playbook& pb = playbook_for(chain.question);
    std::vector<std::string> found = found_answers_in(chain.steps);
    auto answer_in_documents = [&](const PlaybookHop& hop) {
        for (const Document& d : documents) {
            if (contains_gold(d.text, {hop.answer})) return true;
        }
        return false;
    };
    for (const PlaybookHop& hop : pb.hops) {
        if (!hop_covered(hop, found) && answer_in_documents(hop)) return hop.answer;
    }
    for (const PlaybookHop& hop : pb.hops) {
        if (hop_covered(hop, found) && answer_in_documents(hop)) return hop.answer;
    }
    return kNotFoundSentinel;
}

ScriptedJudge::ScriptedJudge(const std::vector<Playbook>& playbooks) {
    for (const Playbook& pb : playbooks) gold_[pb.question_id] = pb.gold_answers;
}

void ScriptedJudge::push_response(const std::string& trace_id, std::string response) {
    std::lock_guard<std::mutex> lock(mu_);
    queued_[trace_id].push_back(std::move(response));
}

std::string ScriptedJudge::judge(const std::string& rendering) {
    if (fail_.load()) throw BackendError("judge backend unavailable");
    calls_.fetch_add(1);

    std::string trace_id;
    std::istringstream head(rendering);
    std::string first_line;
    if (std::getline(head, first_line) && first_line.rfind("Trace: ", 0) == 0) {
        trace_id = trimmed(first_line.substr(7));
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = queued_.find(trace_id);
        if (it != queued_.end() && !it->second.empty()) {
            std::string response = std::move(it->second.front());
            it->second.pop_front();
            return response;
        }
    }
    return rule_based_verdict(rendering);
}

std::string ScriptedJudge::rule_based_verdict(const std::string& rendering) const {
    std::string question_id;
    std::map<int, RenderedSubqa> subqas;
    int final_thought_index = 0;
    std::string final_answer;

    std::istringstream lines(rendering);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("Trace: ", 0) == 0) {
            std::string trace_id = trimmed(line.substr(7));
            std::size_t slash = trace_id.rfind('/');
            question_id = slash == std::string::npos ? trace_id : trace_id.substr(0, slash);
            continue;
        }
        int index = 0;
        std::string kind;
        std::string rest;
        if (!parse_step_line(line, index, kind, rest)) continue;
        if (kind == "sub-question") {
            subqas[index].question = rest;
        } else if (kind == "documents") {
            subqas[index].documents = rest;
        } else if (kind == "sub-answer") {
            subqas[index].answer = rest;
            subqas[index].has_answer = true;
        } else if (kind == "thought") {
            std::size_t marker = rest.find(kFinalAnswerMarker);
            if (marker != std::string::npos) {
                final_thought_index = index;
                final_answer = trimmed(rest.substr(marker + std::string(kFinalAnswerMarker).size()));
            }
        }
    }

    Json justifications = Json::array();
    int incorrect = 0;
    int redundant = 0;
    int unfaithful = 0;
    std::vector<std::string> seen_answers;    // normalized found sub-answers
    std::vector<std::string> seen_questions;  // normalized questions that were answered
    auto seen = [](const std::vector<std::string>& pool, const std::string& value) {
        return std::find(pool.begin(), pool.end(), value) != pool.end();
    };
    for (const auto& [index, sq] : subqas) {
        if (!sq.has_answer || is_not_found(sq.answer)) continue;
        if (!contains_gold(sq.documents, {sq.answer})) {
            ++unfaithful;
            justifications.push_back(Json{{"step_index", index},
                                          {"criterion", kCriterionFaithfulness},
                                          {"text", "The sub-answer does not appear in the retrieved documents."}});
        }
        std::string norm_answer = normalize_answer(sq.answer);
        std::string norm_question = normalize_answer(sq.question);
        if (seen(seen_answers, norm_answer) || seen(seen_questions, norm_question)) {
            ++redundant;
            justifications.push_back(Json{{"step_index", index},
                                          {"criterion", kCriterionRedundancy},
                                          {"text", "The step re-derives a fact the trace already established."}});
        }
        seen_answers.push_back(std::move(norm_answer));
        seen_questions.push_back(std::move(norm_question));
    }
    auto gold_it = gold_.find(question_id);
    if (final_thought_index > 0 && gold_it != gold_.end() &&
        !contains_gold(final_answer, gold_it->second)) {
        ++incorrect;
        justifications.push_back(Json{{"step_index", final_thought_index},
                                      {"criterion", kCriterionIncorrectness},
                                      {"text", "The stated final answer does not match the expected answer."}});
    }

    Json verdict = Json::object();
    verdict[kCriterionIncorrectness] = incorrect;
    verdict[kCriterionRedundancy] = redundant;
    verdict[kCriterionIrrelevance] = 0;
    verdict[kCriterionFaithfulness] = unfaithful;
    verdict["justifications"] = justifications;
    return verdict.dump();
}

}  // namespace traceforge
