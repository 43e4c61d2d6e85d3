#include "kx/dataset.h"
#include "kx/error.h"
#include "kx/io.h"
#include "kx/text.h"

#include "test_support.h"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <filesystem>

using namespace kx;
using dataset::QAExample;

namespace {

QAExample positive(std::string id, std::string doc, std::string context, std::string answer, std::size_t start) {
    return QAExample{std::move(id), std::move(doc), "问题？", std::move(context), std::move(answer), start, false};
}

QAExample negative(std::string id, std::string doc, std::string context) {
    return QAExample{std::move(id), std::move(doc), "问题？", std::move(context), "", std::nullopt, true};
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("kx_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("squad json has the v2 schema") {
    const std::vector<QAExample> examples{positive("a:k:tree", "a", "犹豫期为15天。", "15天", 4),
                                          negative("a:k:seg0", "a", "其他。")};
    const auto json = dataset::to_squad_json(examples);
    CHECK(json ==
          R"({"version":"v2.0","data":[{"title":"a","paragraphs":[)"
          R"({"context":"犹豫期为15天。","qas":[{"id":"a:k:tree","question":"问题？","is_impossible":false,"answers":[{"text":"15天","answer_start":4}]}]},)"
          R"({"context":"其他。","qas":[{"id":"a:k:seg0","question":"问题？","is_impossible":true,"answers":[]}]}]}]})");
    CHECK(json.rfind("\xEF\xBB\xBF", 0) == std::string::npos);
}

TEST_CASE("positive answers re-slice from their context") {
    const auto json = dataset::to_squad_json({positive("x", "d", "甲乙丙丁。", "丙丁", 2)});
    const auto j = nlohmann::json::parse(json);
    const auto& qa = j["data"][0]["paragraphs"][0]["qas"][0];
    const auto context = text::decode_utf8(j["data"][0]["paragraphs"][0]["context"].get<std::string>());
    const auto answer = text::decode_utf8(qa["answers"][0]["text"].get<std::string>());
    const auto start = qa["answers"][0]["answer_start"].get<std::size_t>();
    CHECK(context.substr(start, answer.size()) == answer);
}

TEST_CASE("shared contexts share a paragraph only when adjacent") {
    const std::vector<QAExample> examples{negative("1", "d", "A。"), negative("2", "d", "A。"), negative("3", "d", "B。"),
                                          negative("4", "d", "A。"), negative("5", "e", "A。")};
    const auto j = nlohmann::json::parse(dataset::to_squad_json(examples));
    REQUIRE(j["data"].size() == 2);
    CHECK(j["data"][0]["paragraphs"].size() == 3);
    CHECK(j["data"][0]["paragraphs"][0]["qas"].size() == 2);
    CHECK(dataset::parse_squad_json(j.dump()) == examples);
}

TEST_CASE("squad round trip is lossless") {
    std::mt19937_64 rng(5);
    std::vector<QAExample> examples;
    for (int i = 0; i < 200; ++i) {
        const auto doc = "d" + std::to_string(rng() % 4);
        const auto head = "前" + testing::random_text(rng, 40);
        const auto ctx = head + "答案" + testing::random_text(rng, 20);
        const auto prefix = text::length(head);
        if (rng() % 2) {
            examples.push_back(positive(std::to_string(i), doc, ctx, "答案", prefix));
        } else {
            examples.push_back(negative(std::to_string(i), doc, ctx));
        }
    }
    const auto dir = temp_dir("squad");
    const auto path = dataset::write_squad_json(examples, "train", dir);
    CHECK(path == dir / "train.json");
    CHECK(dataset::read_squad_json(path) == examples);

    const auto file = dir / "explicit.json";
    CHECK(dataset::write_squad_json(examples, "ignored", file) == file);
    CHECK(io::read_file(file) == io::read_file(path));
}

TEST_CASE("invalid examples are refused") {
    auto bad = positive("x", "d", "甲乙丙", "乙丙", 0);
    CHECK_THROWS_AS(dataset::to_squad_json({bad}), InvalidInput);
    auto inconsistent = negative("y", "d", "甲");
    inconsistent.answer_start = 0;
    CHECK_THROWS_AS(dataset::validate_example(inconsistent), InvalidInput);
    CHECK_THROWS_AS(dataset::parse_squad_json("{\"version\":\"v2.0\"}"), InvalidInput);
    CHECK_THROWS_AS(dataset::parse_squad_json("not json"), InvalidInput);
    CHECK_THROWS_AS(dataset::read_squad_json("/nonexistent/kx.json"), IOError);
}
