#include "kx/corpus_gen.h"
#include "kx/doc_model.h"
#include "kx/error.h"
#include "kx/text.h"

#include "test_support.h"

#include <catch_amalgamated.hpp>

#include <functional>

using namespace kx;
using doc::Node;

namespace {

Node heading(int level, std::string text, std::size_t offset, std::vector<Node> children = {}) {
    return Node{Node::Kind::heading, level, std::move(text), offset, std::move(children)};
}

Node leaf(std::string text, std::size_t offset) {
    return Node{Node::Kind::leaf, 0, std::move(text), offset, {}};
}

void walk(const Node& node, const std::function<void(const Node&, const Node*)>& visit, const Node* parent = nullptr) {
    visit(node, parent);
    for (const auto& c : node.children) {
        walk(c, visit, &node);
    }
}

}  // namespace

TEST_CASE("minimal document") {
    const auto tree = doc::parse_document("# 条款A\n第一段。", doc::Format::markdown, "a");
    CHECK_FALSE(tree.synthetic_root);
    CHECK(tree.root == heading(1, "条款A", 2, {leaf("第一段。", 6)}));
}

TEST_CASE("nested sections keep sibling order") {
    const auto tree = doc::parse_document("# T\n## S1\np1。\n## S2\np2。\np3。", doc::Format::markdown);
    const auto expected =
        heading(1, "T", 2, {heading(2, "S1", 7, {leaf("p1。", 10)}), heading(2, "S2", 17, {leaf("p2。", 20), leaf("p3。", 24)})});
    CHECK(tree.root == expected);
}

TEST_CASE("empty input gives a synthetic root") {
    const auto tree = doc::parse_document("", doc::Format::markdown);
    CHECK(tree.synthetic_root);
    CHECK(tree.root.children.empty());
    CHECK(doc::leaf_contexts(tree).empty());
}

TEST_CASE("synthetic root when the title is not the unique top heading") {
    const auto body_first = doc::parse_document("导言。\n# A\n正文。", doc::Format::markdown);
    CHECK(body_first.synthetic_root);
    CHECK(body_first.root.children.size() == 2);

    const auto two_titles = doc::parse_document("# A\na。\n# B\nb。", doc::Format::markdown);
    CHECK(two_titles.synthetic_root);
    REQUIRE(two_titles.root.children.size() == 2);
    CHECK(two_titles.root.children[1].text == "B");
}

TEST_CASE("shallower heading closes deeper sections") {
    const auto tree = doc::parse_document("# T\n### deep\nx。\n## mid\ny。", doc::Format::markdown);
    REQUIRE(tree.root.children.size() == 2);
    CHECK(tree.root.children[0].level == 3);
    CHECK(tree.root.children[1].text == "mid");
    CHECK(tree.root.children[1].children == std::vector<Node>{leaf("y。", 23)});
}

TEST_CASE("seven hashes are body text") {
    const auto tree = doc::parse_document("####### not a heading", doc::Format::markdown);
    REQUIRE(doc::leaf_contexts(tree).size() == 1);
}

TEST_CASE("heading marker without text is rejected with its line") {
    try {
        doc::parse_document("# T\nbody\n##   \nmore", doc::Format::markdown);
        FAIL("expected MalformedHeading");
    } catch (const MalformedHeading& e) {
        CHECK(e.line() == 3);
        CHECK(e.name() == "MalformedHeading");
    }
    CHECK_THROWS_AS(doc::parse_document("1.\n", doc::Format::plain), MalformedHeading);
}

TEST_CASE("plain outline headings") {
    const std::string text =
        "第一章 总则\n"
        "第一条 保险责任\n"
        "本合同犹豫期为15天。\n"
        "1. 适用范围\n"
        "1.1 细则\n"
        "具体内容。\n"
        "第二章 其他\n"
        "附则。\n";
    const auto tree = doc::parse_document(text, doc::Format::plain);
    CHECK(tree.synthetic_root);
    REQUIRE(tree.root.children.size() == 2);
    const auto& chapter = tree.root.children[0];
    CHECK(chapter.level == 1);
    CHECK(chapter.text == "第一章 总则");
    REQUIRE(chapter.children.size() == 1);
    const auto& article = chapter.children[0];
    CHECK(article.level == 3);
    REQUIRE(article.children.size() == 2);
    CHECK(article.children[0] == leaf("本合同犹豫期为15天。", 16));
    CHECK(article.children[1].level == 4);
    CHECK(article.children[1].children.at(0).level == 5);
    CHECK(article.children[1].children.at(0).children.at(0).text == "具体内容。");

    const auto leaves = doc::leaf_contexts(tree);
    REQUIRE(leaves.size() == 3);
    CHECK(leaves[1].path == std::vector<std::string>{"第一章 总则", "第一条 保险责任", "1. 适用范围", "1.1 细则"});
}

TEST_CASE("plain format leaves ordinary lines alone") {
    const auto tree = doc::parse_document("2023年起生效。\n第三方责任除外。\n", doc::Format::plain);
    CHECK(doc::leaf_contexts(tree).size() == 2);
}

TEST_CASE("locate answer: direct containment") {
    const auto tree = doc::parse_document("# 条款\n诉讼时效期间为2年，自其知道或应当知道之日起计算。\n其他。",
                                          doc::Format::markdown, "d");
    const auto ctx = doc::locate_answer_context(tree, "2年");
    REQUIRE(ctx);
    CHECK(ctx->leaf_text == "诉讼时效期间为2年，自其知道或应当知道之日起计算。");
    CHECK(ctx->char_offset == 5);
    CHECK(ctx->path == std::vector<std::string>{"条款"});
}

TEST_CASE("locate answer: first of several leaves, with a warning") {
    const std::string text = "# T\n## A\n甲为2年。\n## B\n乙为2年。\n丙。";
    const auto tree = doc::parse_document(text, doc::Format::markdown, "d");

    // Brute force: scan all leaves in order, take the first containing the answer.
    const auto leaves = doc::leaf_contexts(tree);
    std::optional<doc::LeafContext> brute;
    for (const auto& l : leaves) {
        if (!brute && l.leaf_text.find("2年") != std::string::npos) {
            brute = l;
        }
    }
    std::vector<std::string> warnings;
    const auto found = doc::locate_answer_context(tree, "2年", &warnings);
    REQUIRE(found);
    CHECK(*found == *brute);
    CHECK(found->leaf_text == "甲为2年。");
    CHECK(warnings.size() == 1);
}

TEST_CASE("locate answer: absence and normalization") {
    const auto tree = doc::parse_document("# T\n期限为１５天。", doc::Format::markdown);
    CHECK_FALSE(doc::locate_answer_context(tree, "不存在"));
    const auto ctx = doc::locate_answer_context(tree, "15天");
    REQUIRE(ctx);
    CHECK(ctx->leaf_text == "期限为１５天。");
}

TEST_CASE("tree invariants on random documents") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        std::string text;
        std::vector<std::string> body_lines;
        const int lines = static_cast<int>(rng() % 20);
        for (int i = 0; i < lines; ++i) {
            if (rng() % 3 == 0) {
                text += std::string(1 + rng() % 6, '#') + " 标题" + std::to_string(i) + "\n";
            } else if (rng() % 5 == 0) {
                text += "\n";
            } else {
                auto line = "段落" + std::to_string(i) + testing::random_text(rng, 10);
                // Keep one paragraph per line.
                std::erase(line, '\n');
                text += "  " + line + "\n";
                body_lines.push_back(kx::text::trim(line));
            }
        }
        const auto tree = doc::parse_document(text, doc::Format::markdown);
        CHECK(tree == doc::parse_document(text, doc::Format::markdown));

        walk(tree.root, [](const Node& n, const Node* parent) {
            if (n.is_leaf()) {
                CHECK(n.children.empty());
                CHECK_FALSE(n.text.empty());
            }
            if (parent != nullptr && !n.is_leaf()) {
                CHECK(n.level > parent->level);
            }
        });

        const auto source = kx::text::decode_utf8(text);
        const auto leaves = doc::leaf_contexts(tree);
        REQUIRE(leaves.size() == body_lines.size());
        for (std::size_t i = 0; i < leaves.size(); ++i) {
            CHECK(leaves[i].leaf_text == body_lines[i]);
            const auto leaf32 = kx::text::decode_utf8(leaves[i].leaf_text);
            CHECK(source.substr(leaves[i].char_offset, leaf32.size()) == leaf32);
            if (i > 0) {
                CHECK(leaves[i].char_offset > leaves[i - 1].char_offset);
            }
        }
    }
}

TEST_CASE("planted answers are located in their own leaf") {
    corpus::CorpusSpec spec;
    spec.n_train_docs = 4;
    spec.n_test_docs = 2;
    spec.catalog_size = 40;
    spec.avg_kps_per_doc = 10;
    spec.seed = 5;
    const auto generated = corpus::generate_corpus(spec);
    const auto docs = generated.all_documents();
    for (const auto& a : generated.all_annotations()) {
        const auto it = std::find_if(docs.begin(), docs.end(), [&](const auto& d) { return d.document_id == a.document_id; });
        REQUIRE(it != docs.end());
        const auto tree = doc::parse_document(it->text, doc::Format::markdown, it->document_id);
        std::size_t containing = 0;
        for (const auto& l : doc::leaf_contexts(tree)) {
            containing += l.leaf_text.find(a.answer_text) != std::string::npos ? 1 : 0;
        }
        CHECK(containing == 1);
        const auto ctx = doc::locate_answer_context(tree, a.answer_text);
        REQUIRE(ctx);
        CHECK(ctx->leaf_text.find(a.answer_text) != std::string::npos);
    }
}
