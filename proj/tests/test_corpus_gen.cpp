#include "kx/corpus_gen.h"
#include "kx/doc_model.h"
#include "kx/error.h"
#include "kx/io.h"
#include "kx/text.h"

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <set>

using namespace kx;

namespace {

corpus::CorpusSpec small_spec() {
    corpus::CorpusSpec spec;
    spec.n_train_docs = 7;
    spec.n_test_docs = 3;
    spec.catalog_size = 20;
    spec.avg_kps_per_doc = 5;
    spec.seed = 3;
    return spec;
}

std::string read_tree(const std::filesystem::path& dir) {
    std::string all;
    std::set<std::filesystem::path> files;
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) files.insert(e.path());
    }
    for (const auto& f : files) {
        all += std::filesystem::relative(f, dir).string() + "\n" + io::read_file(f) + "\n";
    }
    return all;
}

}  // namespace

TEST_CASE("corpus output is byte-identical for a fixed seed") {
    const auto base = std::filesystem::temp_directory_path() / "kx_corpus_det";
    std::filesystem::remove_all(base);
    corpus::write_corpus(corpus::generate_corpus(small_spec()), base / "a");
    corpus::write_corpus(corpus::generate_corpus(small_spec()), base / "b");
    CHECK(read_tree(base / "a") == read_tree(base / "b"));
    CHECK(std::filesystem::exists(base / "a" / "docs" / "train" / "train_001.md"));
    CHECK(std::filesystem::exists(base / "a" / "annotations_test.json"));

    auto other = small_spec();
    other.seed = 4;
    corpus::write_corpus(corpus::generate_corpus(other), base / "c");
    CHECK(read_tree(base / "a") != read_tree(base / "c"));
    std::filesystem::remove_all(base);
}

TEST_CASE("annotation counts follow the requested density") {
    const auto c = corpus::generate_corpus(small_spec());
    CHECK(c.train_documents.size() == 7);
    CHECK(c.test_documents.size() == 3);
    CHECK(c.catalog.size() == 20);
    const auto n = c.all_annotations().size();
    // Binomial(200, 0.25): mean 50, sd ~6.1.
    CHECK(n >= 19);
    CHECK(n <= 81);
    CHECK(corpus::manifest_json(c).find("\"n_annotations\": " + std::to_string(n)) != std::string::npos);
}

TEST_CASE("every planted answer sits in exactly one leaf") {
    const auto c = corpus::generate_corpus(small_spec());
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& doc : c.all_documents()) {
        const auto tree = doc::parse_document(doc.text, doc::Format::markdown, doc.document_id);
        for (const auto& a : c.all_annotations()) {
            if (a.document_id != doc.document_id) continue;
            CHECK(seen.insert({a.document_id, a.kp_id}).second);
            std::vector<std::string> warnings;
            const auto ctx = doc::locate_answer_context(tree, a.answer_text, &warnings);
            REQUIRE(ctx);
            CHECK(warnings.empty());
            CHECK(text::count_normalized(text::normalize(text::decode_utf8(doc.text)), text::nfkc(text::decode_utf8(a.answer_text))) == 1);
        }
    }
}

TEST_CASE("train and test splits are disjoint") {
    const auto c = corpus::generate_corpus(small_spec());
    std::set<std::string> train;
    for (const auto& d : c.train_documents) train.insert(d.document_id);
    for (const auto& d : c.test_documents) CHECK_FALSE(train.contains(d.document_id));
    for (const auto& a : c.train_annotations) CHECK(train.contains(a.document_id));
    for (const auto& a : c.test_annotations) CHECK_FALSE(train.contains(a.document_id));
}

TEST_CASE("catalog larger than the term pool is refused") {
    auto spec = small_spec();
    spec.catalog_size = corpus::term_capacity() + 1;
    spec.avg_kps_per_doc = 1;
    CHECK_THROWS_AS(corpus::generate_corpus(spec), TemplateExhaustion);
}

TEST_CASE("spec validation") {
    auto spec = small_spec();
    spec.avg_kps_per_doc = 21;
    CHECK_THROWS_AS(corpus::validate(spec), InvalidInput);
    spec = small_spec();
    spec.n_test_docs = 0;
    CHECK_THROWS_AS(corpus::validate(spec), InvalidInput);
    spec = small_spec();
    spec.distractor_density = -1;
    CHECK_THROWS_AS(corpus::validate(spec), InvalidInput);
    const auto parsed = corpus::parse_spec(R"({"n_train_docs": 4, "seed": 11})");
    CHECK(parsed.n_train_docs == 4);
    CHECK(parsed.seed == 11);
    CHECK(parsed.catalog_size == 309);
}
