#pragma once

// Synthetic clause corpora with planted knowledge points.
//
// Each knowledge point owns a four-character term built from a private
// character pool; no character bigram occurs in two terms. Its question is
// "<term>为多少？" and its planted answer is one whole sentence such as
// "本合同<term>为15天。". Distractor paragraphs reuse two-character term
// fragments and generic clause sentences but never a planted answer.

#include "kx/dataset.h"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kx::corpus {

struct CorpusSpec {
    std::size_t n_train_docs = 251;
    std::size_t n_test_docs = 98;
    std::size_t catalog_size = 309;
    std::size_t avg_kps_per_doc = 45;
    std::uint64_t seed = 0;
    double distractor_density = 2.0;  // distractor paragraphs per planted paragraph
};

// Throws InvalidInput when counts are zero, avg exceeds catalog size, or
// density is negative.
void validate(const CorpusSpec& spec);
CorpusSpec parse_spec(std::string_view json);

struct Corpus {
    CorpusSpec spec;
    dataset::Catalog catalog;
    std::vector<dataset::Document> train_documents;
    std::vector<dataset::Document> test_documents;
    std::vector<dataset::Annotation> train_annotations;
    std::vector<dataset::Annotation> test_annotations;

    std::vector<dataset::Document> all_documents() const;
    std::vector<dataset::Annotation> all_annotations() const;
};

// Upper bound on catalog size the term pool can support.
std::size_t term_capacity();

// Deterministic in spec (including seed). Throws TemplateExhaustion when the
// catalog cannot be given pairwise bigram-disjoint terms.
Corpus generate_corpus(const CorpusSpec& spec);

std::string manifest_json(const Corpus& corpus);

// Writes docs/train/<id>.md, docs/test/<id>.md, catalog.json, annotations_train.json,
// annotations_test.json and manifest.json under dir.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace kx::corpus
