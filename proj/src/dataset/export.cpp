#include "traceforge/dataset/export.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "traceforge/core/errors.hpp"
#include "traceforge/core/hash.hpp"
#include "traceforge/core/render.hpp"

namespace traceforge {

std::string to_string(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::Question: return "question";
        case SegmentKind::Thought: return "thought";
        case SegmentKind::Subquestion: return "subquestion";
        case SegmentKind::Documents: return "documents";
        case SegmentKind::Subanswer: return "subanswer";
        case SegmentKind::FinalThought: return "final_thought";
    }
    throw ValidationError("unknown segment kind");
}

SegmentKind segment_kind_from_string(const std::string& name) {
    if (name == "question") return SegmentKind::Question;
    if (name == "thought") return SegmentKind::Thought;
    if (name == "subquestion") return SegmentKind::Subquestion;
    if (name == "documents") return SegmentKind::Documents;
    if (name == "subanswer") return SegmentKind::Subanswer;
    if (name == "final_thought") return SegmentKind::FinalThought;
    throw ValidationError("unknown segment kind '" + name + "'");
}

bool learn_flag_for(SegmentKind kind) {
    return kind != SegmentKind::Question && kind != SegmentKind::Documents;
}

TrainingSample render_trace(const Trace& trace, const Question& question) {
    validate_trace_steps(trace.steps);
    if (trace.steps.empty() || !is_terminal_thought(trace.steps.back())) {
        throw ValidationError("trace " + trace.trace_id + ": final step must be a terminal thought");
    }
    TrainingSample sample;
    sample.question_id = question.id;
    sample.trace_length = trace.length();
    sample.segments.push_back({SegmentKind::Question, format_question(question.text), false, 0});
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        int idx = static_cast<int>(i) + 1;
        const Step& step = trace.steps[i];
        if (is_thought(step)) {
            SegmentKind kind = i + 1 == trace.steps.size() ? SegmentKind::FinalThought : SegmentKind::Thought;
            sample.segments.push_back({kind, format_thought(as_thought(step).text), true, idx});
            continue;
        }
        const SubQaStep& sq = as_subqa(step);
        sample.segments.push_back({SegmentKind::Subquestion, format_subquestion(sq.sub_question), true, idx});
        sample.segments.push_back({SegmentKind::Documents, format_documents(sq.documents), false, idx});
        sample.segments.push_back({SegmentKind::Subanswer, format_subanswer(sq.sub_answer), true, idx});
    }
    for (const Segment& seg : sample.segments) sample.rendered_text += seg.text;
    validate_sample(sample);
    return sample;
}

void validate_sample(const TrainingSample& sample) {
    if (sample.question_id.empty()) throw ValidationError("sample has an empty question_id");
    if (sample.segments.empty() || sample.segments.front().kind != SegmentKind::Question) {
        throw ValidationError("sample " + sample.question_id + ": first segment must be the question");
    }
    if (sample.segments.back().kind != SegmentKind::FinalThought) {
        throw ValidationError("sample " + sample.question_id + ": last segment must be the final thought");
    }
    std::string joined;
    for (std::size_t i = 0; i < sample.segments.size(); ++i) {
        const Segment& seg = sample.segments[i];
        if (seg.learn != learn_flag_for(seg.kind)) {
            throw ValidationError("sample " + sample.question_id + ": segment " + std::to_string(i) +
                                  " has the wrong learn flag for kind " + to_string(seg.kind));
        }
        bool question = seg.kind == SegmentKind::Question;
        if (question != (i == 0)) {
            throw ValidationError("sample " + sample.question_id + ": question segment out of place");
        }
        if (question != (seg.step_index == 0)) {
            throw ValidationError("sample " + sample.question_id + ": segment " + std::to_string(i) +
                                  " has a bad step_index");
        }
        joined += seg.text;
    }
    if (joined != sample.rendered_text) {
        throw ValidationError("sample " + sample.question_id +
                              ": rendered_text does not equal the segment concatenation");
    }
}

Json sample_to_json(const TrainingSample& sample) {
    Json j;
    j["question_id"] = sample.question_id;
    j["trace_length"] = sample.trace_length;
    Json segments = Json::array();
    for (const Segment& seg : sample.segments) {
        Json s;
        s["kind"] = to_string(seg.kind);
        s["text"] = seg.text;
        s["learn"] = seg.learn;
        s["step_index"] = seg.step_index;
        segments.push_back(std::move(s));
    }
    j["segments"] = std::move(segments);
    return j;
}

TrainingSample sample_from_json(const Json& j, const std::string& where) {
    auto require = [&](const char* field) -> const Json& {
        if (!j.is_object() || !j.contains(field)) {
            throw ValidationError(where + ": missing field '" + field + "'");
        }
        return j.at(field);
    };
    TrainingSample sample;
    sample.question_id = require("question_id").get<std::string>();
    sample.trace_length = require("trace_length").get<int>();
    const Json& segments = require("segments");
    if (!segments.is_array()) throw ValidationError(where + ": 'segments' must be an array");
    for (const Json& s : segments) {
        for (const char* field : {"kind", "text", "learn", "step_index"}) {
            if (!s.is_object() || !s.contains(field)) {
                throw ValidationError(where + ": segment missing field '" + field + "'");
            }
        }
        Segment seg;
        seg.kind = segment_kind_from_string(s.at("kind").get<std::string>());
        seg.text = s.at("text").get<std::string>();
        seg.learn = s.at("learn").get<bool>();
        seg.step_index = s.at("step_index").get<int>();
        sample.segments.push_back(std::move(seg));
    }
    for (const Segment& seg : sample.segments) sample.rendered_text += seg.text;
    try {
        validate_sample(sample);
    } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
    }
    return sample;
}

Json export_samples(const std::vector<TrainingSample>& samples, const std::string& path, const Json& extra) {
    std::set<std::string> ids;
    for (const TrainingSample& sample : samples) {
        validate_sample(sample);
        if (!ids.insert(sample.question_id).second) {
            throw ValidationError("duplicate question_id '" + sample.question_id + "' in export input");
        }
    }
    std::string body;
    int learn_segments = 0;
    int mask_segments = 0;
    for (const TrainingSample& sample : samples) {
        body += sample_to_json(sample).dump();
        body += "\n";
        for (const Segment& seg : sample.segments) {
            if (seg.learn) {
                ++learn_segments;
            } else {
                ++mask_segments;
            }
        }
    }
    write_text_file(path, body);

    Json manifest;
    manifest["samples"] = static_cast<int>(samples.size());
    manifest["file"] = std::filesystem::path(path).filename().string();
    manifest["content_hash"] = content_hash(body);
    manifest["learn_segments"] = learn_segments;
    manifest["mask_segments"] = mask_segments;
    if (extra.is_object()) {
        for (const auto& [key, value] : extra.items()) manifest[key] = value;
    }
    write_text_file(path + ".manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

std::vector<TrainingSample> load_samples(const std::string& path) {
    std::string body = read_text_file(path);
    std::vector<TrainingSample> samples;
    std::istringstream lines(body);
    std::string line;
    int line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::string where = path + ":" + std::to_string(line_no);
        samples.push_back(sample_from_json(parse_json(line, where), where));
    }
    return samples;
}

void check_export_integrity(const std::string& path, const std::string& manifest_path) {
    Json manifest = parse_json(read_text_file(manifest_path), manifest_path);
    if (!manifest.contains("content_hash")) {
        throw IntegrityError(manifest_path + ": missing content_hash");
    }
    std::string expected = manifest.at("content_hash").get<std::string>();
    std::string actual = content_hash(read_text_file(path));
    if (expected != actual) {
        throw IntegrityError(path + ": content hash " + actual + " does not match manifest " + expected);
    }
}

}  // namespace traceforge
