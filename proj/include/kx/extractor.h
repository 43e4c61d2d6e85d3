#pragma once

// Segment-wise extraction: every knowledge-point question is asked of every
// segment; the highest-scoring surviving answer wins, and a knowledge point
// with no surviving answer is reported absent.

#include "kx/chunker.h"
#include "kx/dataset.h"
#include "kx/error.h"
#include "kx/reader.h"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace kx::extract {

struct Answer {
    std::string answer_text;
    std::size_t segment_index = 0;
    double score = 0.0;
    std::size_t start = 0;  // char offset in the document

    bool operator==(const Answer&) const = default;
};

struct ExtractionResult {
    std::string document_id;
    // Every catalog kp_id is present; nullopt = abstained.
    std::map<std::string, std::optional<Answer>> answers;

    bool operator==(const ExtractionResult&) const = default;
};

struct Options {
    std::size_t limit = chunker::kDefaultLimit;
    double tau = 0.0;        // keep predictions with score - null_score > tau
    std::size_t workers = 1;
};

// Creates a reader for one worker. Thread-safe readers may be shared by
// returning the same instance from every call.
using ReaderFactory = std::function<std::shared_ptr<reader::Reader>()>;

// Raised when the reader fails mid-document; carries the knowledge points
// that completed before the failure.
class ExtractionAborted : public Error {
public:
    ExtractionAborted(const Error& cause, ExtractionResult partial)
        : Error(cause.name(), cause.what()), partial_(std::move(partial)) {}

    const ExtractionResult& partial() const noexcept { return partial_; }

private:
    ExtractionResult partial_;
};

// Per-segment prediction table for one knowledge point, in segment order.
std::optional<Answer> select_answer(std::span<const reader::SpanPrediction> per_segment,
                                    std::span<const chunker::Segment> segments, double tau);

ExtractionResult extract(const std::string& document_id, std::string_view document_text,
                         const dataset::Catalog& catalog, const ReaderFactory& make_reader,
                         const Options& options = {});

ExtractionResult extract(const std::string& document_id, std::string_view document_text,
                         const dataset::Catalog& catalog, reader::Reader& reader, const Options& options = {});

std::string results_to_json(const std::vector<ExtractionResult>& results);
std::vector<ExtractionResult> parse_results_json(std::string_view json);

}  // namespace kx::extract
