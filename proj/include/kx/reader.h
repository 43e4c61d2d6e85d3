#pragma once

// Span readers: (question, context) -> best span plus a null score. Scores
// of one reader are comparable across contexts; abstention is decided by
// the extractor, not here.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kx::reader {

struct SpanPrediction {
    std::string answer_text;         // empty = no answer in this context
    std::optional<std::size_t> start;
    std::optional<std::size_t> end;  // exclusive
    double score = 0.0;
    double null_score = 0.0;

    bool has_answer() const noexcept { return !answer_text.empty(); }
    bool operator==(const SpanPrediction&) const = default;
};

SpanPrediction empty_prediction(double score, double null_score);

// Throws MalformedResponse if the prediction violates its invariants
// against the context it was produced for.
void validate_prediction(const SpanPrediction& prediction, std::string_view context);

struct Query {
    std::string question;
    std::string context;
};

class Reader {
public:
    virtual ~Reader() = default;

    // Both arguments must be non-empty after trimming (InvalidInput).
    virtual SpanPrediction read_span(std::string_view question, std::string_view context) = 0;

    // Default: read_span per query, in order.
    virtual std::vector<SpanPrediction> read_batch(std::span<const Query> queries);

    // True when read_span may be called from several threads at once.
    virtual bool thread_safe() const noexcept { return true; }
};

// Throws InvalidInput when either side is blank.
void check_query(std::string_view question, std::string_view context);

// Distinct character bigrams of the NFKC form, whitespace removed.
std::vector<std::u32string> char_bigrams(std::string_view text);

// Sentence-level baseline: the sentence with the highest share of the
// question's bigrams is the answer (earliest wins ties); score is that
// share and null_score its complement.
class LexicalReader final : public Reader {
public:
    SpanPrediction read_span(std::string_view question, std::string_view context) override;
};

// Test reader planted with gold answers keyed by question. Returns the gold
// span (score 1, null 0) whenever the context contains it, otherwise an
// empty prediction (score 0, null 1).
class OracleReader final : public Reader {
public:
    explicit OracleReader(std::unordered_map<std::string, std::string> gold_by_question);

    SpanPrediction read_span(std::string_view question, std::string_view context) override;

private:
    std::unordered_map<std::string, std::string> gold_;
};

}  // namespace kx::reader
