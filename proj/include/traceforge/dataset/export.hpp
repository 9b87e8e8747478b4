#pragma once

#include <string>
#include <vector>

#include "traceforge/core/json_codec.hpp"
#include "traceforge/core/types.hpp"

namespace traceforge {

enum class SegmentKind { Question, Thought, Subquestion, Documents, Subanswer, FinalThought };

std::string to_string(SegmentKind kind);
SegmentKind segment_kind_from_string(const std::string& name);

// One contiguous span of a rendered training sample. learn = false holds
// exactly for the question and retrieved-document spans: they are
// conditioning context, never generation targets.
struct Segment {
    SegmentKind kind = SegmentKind::Question;
    std::string text;
    bool learn = false;
    int step_index = 0;  // 0 for the question, else the 1-based trace step

    bool operator==(const Segment&) const = default;
};

struct TrainingSample {
    std::string question_id;
    std::vector<Segment> segments;
    std::string rendered_text;  // concatenation of segment texts, byte-exact
    int trace_length = 0;

    bool operator==(const TrainingSample&) const = default;
};

// The mask a segment kind must carry: only question and documents spans
// are masked out of the loss.
bool learn_flag_for(SegmentKind kind);

// Splits a filter-selected trace into ordered segments: question (mask),
// then per step thought/sub-question (learn), documents (mask),
// sub-answer (learn), ending with the marker-bearing final thought
// (learn). The trace must end in a terminal thought.
TrainingSample render_trace(const Trace& trace, const Question& question);

// Structural checks: segment order, learn flags, step indices, and the
// byte-identity of rendered_text with the segment concatenation.
void validate_sample(const TrainingSample& sample);

// One sample per line at path, plus "<path>.manifest.json" recording
// counts, a content hash of the file, and whatever carry-through fields
// (config snapshot, prompt hashes) the caller passes in extra.
Json export_samples(const std::vector<TrainingSample>& samples, const std::string& path, const Json& extra);

// Reads an export back; line numbers are cited on any schema violation.
std::vector<TrainingSample> load_samples(const std::string& path);

// Recomputes the file hash and compares it with the manifest.
void check_export_integrity(const std::string& path, const std::string& manifest_path);

Json sample_to_json(const TrainingSample& sample);
TrainingSample sample_from_json(const Json& j, const std::string& where);

}  // namespace traceforge
