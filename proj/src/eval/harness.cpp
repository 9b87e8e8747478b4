#include "traceforge/eval/harness.hpp"

#include <cstdio>
#include <exception>

#include "traceforge/backend/ops.hpp"
#include "traceforge/core/errors.hpp"
#include "traceforge/eval/metrics.hpp"
#include "traceforge/util/parallel.hpp"

namespace traceforge {

EvalRecord run_inference_agent(const Question& question, PolicyBackend& model, Retriever& retriever,
                               const EvalConfig& config) {
    if (config.max_steps < 1) throw ConfigError("max_steps must be at least 1");
    if (config.top_k < 1) throw ConfigError("top_k must be at least 1");
    EvalRecord record;
    record.question_id = question.id;
    std::vector<Step> steps;
    std::optional<std::string> answer;
    try {
        while (static_cast<int>(steps.size()) < config.max_steps) {
            {
                ChainView chain{question, steps};
                ThoughtStep thought = generate_thoughts(chain, 1, 0.0, model).at(0);
                bool terminal = thought.is_terminal;
                if (terminal) answer = thought.final_answer;
                steps.push_back(std::move(thought));
                if (terminal) break;
            }
            if (static_cast<int>(steps.size()) >= config.max_steps) break;
            ChainView chain{question, steps};
            std::string sub_question = generate_subquestions(chain, 1, 0.0, model).at(0);
            std::vector<Document> docs = retrieve_documents(sub_question, config.top_k, retriever);
            SubAnswer sub = extract_subanswer(chain, sub_question, docs, 0.0, model);
            steps.push_back(make_subqa(sub_question, std::move(docs), sub.answer));
            ++record.retrievals;
        }
    } catch (const Error& e) {
        record.failed = true;
        record.failure = e.what();
        record.steps_used = static_cast<int>(steps.size());
        return record;
    }
    record.steps_used = static_cast<int>(steps.size());
    record.unanswered = !answer.has_value();
    record.prediction = answer.value_or("");
    record.trace = Trace::build(question.id + "/inf", question.id, std::move(steps), TraceSource::Inference);
    record.em = exact_match(record.prediction, question.gold_answers);
    record.accuracy = accuracy_contains(record.prediction, question.gold_answers);
    record.f1 = token_f1(record.prediction, question.gold_answers);
    return record;
}

std::pair<MetricsSummary, std::vector<EvalRecord>> evaluate_dataset(const std::vector<Question>& questions,
                                                                    PolicyBackend& model, Retriever& retriever,
                                                                    const EvalConfig& config) {
    std::vector<EvalRecord> records(questions.size());
    parallel_for(questions.size(), config.workers, [&](std::size_t i) {
        try {
            records[i] = run_inference_agent(questions[i], model, retriever, config);
        } catch (const std::exception& e) {
            records[i] = EvalRecord{};
            records[i].question_id = questions[i].id;
            records[i].failed = true;
            records[i].failure = e.what();
        }
    });

    MetricsSummary summary;
    summary.dataset = config.dataset_label;
    double em_sum = 0.0;
    double acc_sum = 0.0;
    double f1_sum = 0.0;
    std::map<std::string, TypeAggregate> raw_types;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const EvalRecord& record = records[i];
        if (record.failed) {
            ++summary.failed;
            continue;
        }
        ++summary.n;
        if (record.unanswered) ++summary.unanswered;
        em_sum += record.em ? 1.0 : 0.0;
        acc_sum += record.accuracy ? 1.0 : 0.0;
        f1_sum += record.f1;
        if (questions[i].question_type) {
            TypeAggregate& agg = raw_types[*questions[i].question_type];
            agg.em += record.em ? 1.0 : 0.0;
            agg.accuracy += record.accuracy ? 1.0 : 0.0;
            agg.f1 += record.f1;
            ++agg.n;
        }
    }
    if (summary.n > 0) {
        summary.em = 100.0 * em_sum / summary.n;
        summary.accuracy = 100.0 * acc_sum / summary.n;
        summary.f1 = 100.0 * f1_sum / summary.n;
    }
    for (auto& [type, agg] : raw_types) {
        TypeAggregate pct;
        pct.n = agg.n;
        pct.em = 100.0 * agg.em / agg.n;
        pct.accuracy = 100.0 * agg.accuracy / agg.n;
        pct.f1 = 100.0 * agg.f1 / agg.n;
        summary.by_question_type[type] = pct;
    }
    return {summary, records};
}

Json eval_record_to_json(const EvalRecord& record) {
    Json j;
    j["question_id"] = record.question_id;
    j["prediction"] = record.prediction;
    j["em"] = record.em;
    j["accuracy"] = record.accuracy;
    j["f1"] = record.f1;
    j["steps_used"] = record.steps_used;
    j["retrievals"] = record.retrievals;
    j["unanswered"] = record.unanswered;
    j["failed"] = record.failed;
    if (record.failed) j["failure"] = record.failure;
    if (record.trace) j["trace"] = trace_to_json(*record.trace);
    return j;
}

Json metrics_summary_to_json(const MetricsSummary& summary) {
    Json j;
    j["dataset"] = summary.dataset;
    j["n"] = summary.n;
    j["em"] = summary.em ? Json(*summary.em) : Json(nullptr);
    j["accuracy"] = summary.accuracy ? Json(*summary.accuracy) : Json(nullptr);
    j["f1"] = summary.f1 ? Json(*summary.f1) : Json(nullptr);
    j["failed"] = summary.failed;
    j["unanswered"] = summary.unanswered;
    Json types = Json::object();
    for (const auto& [type, agg] : summary.by_question_type) {
        Json t;
        t["em"] = agg.em;
        t["accuracy"] = agg.accuracy;
        t["f1"] = agg.f1;
        t["n"] = agg.n;
        types[type] = std::move(t);
    }
    j["by_question_type"] = std::move(types);
    return j;
}

std::string by_type_csv(const MetricsSummary& summary) {
    std::string out = "type,n,em,accuracy,f1\n";
    char row[160];
    for (const auto& [type, agg] : summary.by_question_type) {
        std::snprintf(row, sizeof(row), "%s,%d,%.4f,%.4f,%.4f\n", type.c_str(), agg.n, agg.em, agg.accuracy,
                      agg.f1);
        out += row;
    }
    return out;
}

}  // namespace traceforge
