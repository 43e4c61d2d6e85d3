#pragma once

// QA dataset construction under two regimes:
//   tree     each annotation's context is the document-tree leaf holding the
//            answer; positives only.
//   segment  the tree examples plus, for every (document, knowledge point,
//            segment) triple, a positive when the segment holds the answer
//            and otherwise a sampled negative.

#include "kx/chunker.h"
#include "kx/doc_model.h"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kx::dataset {

struct KnowledgePoint {
    std::string kp_id;
    std::string question;

    bool operator==(const KnowledgePoint&) const = default;
};
using Catalog = std::vector<KnowledgePoint>;

struct Annotation {
    std::string document_id;
    std::string kp_id;
    std::string answer_text;

    bool operator==(const Annotation&) const = default;
};

struct Document {
    std::string document_id;
    std::string text;
};

struct QAExample {
    std::string example_id;
    std::string document_id;
    std::string question;
    std::string context;
    std::string answer_text;                 // empty for impossible examples
    std::optional<std::size_t> answer_start; // char offset into context
    bool is_impossible = false;

    bool operator==(const QAExample&) const = default;
};

struct SamplingPolicy {
    double p_absent = 0.10;        // segment of a document lacking the knowledge point
    double p_present_miss = 0.50;  // segment missing an annotated answer
    std::uint64_t seed = 0;
};

struct BuildOptions {
    doc::Format format = doc::Format::markdown;
    std::size_t limit = chunker::kDefaultLimit;
    bool include_tree_contexts = true;
};

// Bernoulli bookkeeping for the segment regime.
struct SamplingStats {
    std::size_t positives = 0;
    std::size_t absent_eligible = 0;
    std::size_t absent_included = 0;
    std::size_t present_eligible = 0;
    std::size_t present_included = 0;
};

struct BuildResult {
    std::vector<QAExample> examples;
    std::vector<std::string> warnings;
    SamplingStats stats;
};

// Throws InvalidInput on empty/duplicate ids or empty questions.
void validate_catalog(const Catalog& catalog);
// Throws InvalidInput when the QAExample invariants do not hold.
void validate_example(const QAExample& example);

// Negative-inclusion draw for one (document, kp, segment) triple.
bool sample_negative(std::uint64_t seed, std::string_view document_id, std::string_view kp_id,
                     std::size_t segment_index, double p);

// Output is ordered by (document_id, kp_id), tree example first, then
// segment examples by index. Throws UnknownKnowledgePoint, UnknownDocument,
// InvalidInput (duplicate annotation).
BuildResult build_tree_dataset(const std::vector<Document>& documents, const Catalog& catalog,
                               const std::vector<Annotation>& annotations,
                               doc::Format format = doc::Format::markdown);

BuildResult build_segment_dataset(const std::vector<Document>& documents, const Catalog& catalog,
                                  const std::vector<Annotation>& annotations, const SamplingPolicy& policy,
                                  const BuildOptions& options = {});

// SQuAD v2 JSON. Consecutive examples sharing a document form one "data"
// entry and consecutive examples sharing a context one paragraph, so
// parsing returns the examples in their original order.
std::string to_squad_json(const std::vector<QAExample>& examples);
std::vector<QAExample> parse_squad_json(std::string_view json);

// If path is an existing directory the file is written as <path>/<split>.json.
// Returns the written path. Throws IOError.
std::filesystem::path write_squad_json(const std::vector<QAExample>& examples, std::string_view split_name,
                                       const std::filesystem::path& path);
std::vector<QAExample> read_squad_json(const std::filesystem::path& path);

}  // namespace kx::dataset
