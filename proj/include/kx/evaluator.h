#pragma once

// Precision / recall / F1 over (document, knowledge point) pairs. Pairs
// where both gold and prediction are absent count nowhere.

#include "kx/dataset.h"
#include "kx/extractor.h"

#include <string>
#include <string_view>
#include <vector>

namespace kx::eval {

// Equal after NFKC normalization and whitespace trimming.
bool match_answer(std::string_view predicted, std::string_view gold);

// Harmonic mean; 0 when p + r == 0.
double f1(double p, double r);

struct Counts {
    std::size_t n_predicted_nonnull = 0;
    std::size_t n_correct_nonnull = 0;  // predicted non-null and equal to gold
    std::size_t n_gold_nonnull = 0;
    std::size_t n_recalled = 0;         // gold non-null and prediction equal to gold

    Counts& operator+=(const Counts& o);
    bool operator==(const Counts&) const = default;
};

// 0/0 ratios are reported as 0 with the matching *_undefined flag set.
struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

Scores scores_from(const Counts& counts);

struct DocumentReport {
    std::string document_id;
    Counts counts;
    Scores scores;
};

struct EvalReport {
    Counts counts;   // pooled over all documents
    Scores micro;    // from pooled counts
    // Mean per-document precision (documents with predictions) and recall
    // (documents with gold answers); f1 is their harmonic mean.
    Scores macro;
    std::vector<DocumentReport> documents;

    // Headline numbers follow the per-document average.
    const Scores& headline() const noexcept { return macro; }
};

// Throws MissingDocument when the result and gold document sets differ and
// UnknownKnowledgePoint for ids outside the catalog.
EvalReport evaluate(const std::vector<extract::ExtractionResult>& results,
                    const std::vector<dataset::Annotation>& gold, const dataset::Catalog& catalog);

std::string report_to_json(const EvalReport& report);
// Human-readable P / R / F1 table in percent.
std::string report_table(const EvalReport& report);

}  // namespace kx::eval
