#include "kx/cli.h"
#include "kx/io.h"

#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>

using namespace kx;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run kx_run(std::vector<std::string> args) {
    args.insert(args.begin(), "kx");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path small_corpus(const fs::path& dir) {
    io::write_file(dir / "spec.json",
                   R"({"n_train_docs": 3, "n_test_docs": 2, "catalog_size": 12, "avg_kps_per_doc": 4, "seed": 1})");
    const auto r = kx_run({"gen-corpus", "--spec", (dir / "spec.json").string(), "--out", (dir / "corpus").string()});
    REQUIRE(r.code == 0);
    return dir / "corpus";
}

}  // namespace

TEST_CASE("generate, build, extract with oracle, evaluate") {
    const auto dir = fresh_dir("kx_cli_e2e");
    const auto corpus = small_corpus(dir);
    const auto docs = (corpus / "docs" / "test").string();
    const auto catalog = (corpus / "catalog.json").string();
    const auto gold = (corpus / "annotations_test.json").string();

    const auto built = kx_run({"build-dataset", "--docs", (corpus / "docs" / "train").string(), "--catalog", catalog,
                               "--annotations", (corpus / "annotations_train.json").string(), "--out",
                               dir.string(), "--split", "train"});
    REQUIRE(built.code == 0);
    const auto squad = nlohmann::json::parse(io::read_file(dir / "train.json"));
    CHECK(squad.at("version") == "v2.0");
    CHECK_FALSE(squad.at("data").empty());

    const auto extracted = kx_run({"extract", "--docs", docs, "--catalog", catalog, "--reader", "oracle:" + gold,
                                   "--out", (dir / "pred.json").string()});
    REQUIRE(extracted.code == 0);

    const auto evaluated = kx_run({"evaluate", "--pred", (dir / "pred.json").string(), "--gold", gold, "--catalog",
                                   catalog});
    REQUIRE(evaluated.code == 0);
    const auto report = nlohmann::json::parse(evaluated.out);
    CHECK(report.at("f1") == 1.0);
    CHECK(report.at("precision") == 1.0);
    CHECK(report.at("recall") == 1.0);
    fs::remove_all(dir);
}

TEST_CASE("dataset build is reproducible for a fixed seed") {
    const auto dir = fresh_dir("kx_cli_seed");
    const auto corpus = small_corpus(dir);
    auto build = [&](const std::string& out) {
        return kx_run({"build-dataset", "--docs", (corpus / "docs" / "train").string(), "--catalog",
                       (corpus / "catalog.json").string(), "--annotations",
                       (corpus / "annotations_train.json").string(), "--seed", "7", "--out", out});
    };
    REQUIRE(build((dir / "a.json").string()).code == 0);
    REQUIRE(build((dir / "b.json").string()).code == 0);
    CHECK(io::read_file(dir / "a.json") == io::read_file(dir / "b.json"));
    fs::remove_all(dir);
}

TEST_CASE("unavailable external reader exits with a domain error") {
    const auto dir = fresh_dir("kx_cli_ext");
    const auto corpus = small_corpus(dir);
    const auto r = kx_run({"extract", "--docs", (corpus / "docs" / "test").string(), "--catalog",
                           (corpus / "catalog.json").string(), "--reader", "external:true"});
    CHECK(r.code == 1);
    const auto error = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
    CHECK(error.at("error") == "ReaderUnavailable");
    CHECK(error.contains("document_id"));
    CHECK(error.contains("completed_kps"));
    fs::remove_all(dir);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(kx_run({}).code == 2);
    CHECK(kx_run({"frobnicate"}).code == 2);
    CHECK(kx_run({"extract", "--docs", "x"}).code == 2);
    CHECK(kx_run({"chunk", "f.txt", "--limit", "0"}).code == 2);
    CHECK(kx_run({"build-dataset", "--docs", "d", "--catalog", "c", "--annotations", "a", "--regime", "x"}).code ==
          2);
}

TEST_CASE("missing input files are domain errors") {
    const auto r = kx_run({"parse", "/nonexistent/kx/doc.md"});
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.err).at("error") == "IOError");
}

TEST_CASE("malformed heading is reported with its name") {
    const auto dir = fresh_dir("kx_cli_heading");
    io::write_file(dir / "bad.md", "# 标题\n##\n正文。\n");
    const auto r = kx_run({"parse", (dir / "bad.md").string()});
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.err).at("error") == "MalformedHeading");
    fs::remove_all(dir);
}

TEST_CASE("parse and chunk outputs") {
    const auto dir = fresh_dir("kx_cli_parse");
    io::write_file(dir / "doc.md", "# 标题\n## 小节\n第一句。第二句。\n");
    const auto parsed = kx_run({"parse", (dir / "doc.md").string()});
    REQUIRE(parsed.code == 0);
    const auto tree = nlohmann::json::parse(parsed.out);
    CHECK(tree.dump().find("小节") != std::string::npos);

    const auto chunked = kx_run({"chunk", (dir / "doc.md").string(), "--limit", "6"});
    REQUIRE(chunked.code == 0);
    std::istringstream lines(chunked.out);
    std::string line;
    std::size_t expected_index = 0;
    std::string rebuilt;
    while (std::getline(lines, line)) {
        const auto seg = nlohmann::json::parse(line);
        CHECK(seg.at("index") == expected_index++);
        rebuilt += seg.at("text").get<std::string>();
    }
    CHECK(rebuilt == io::read_file(dir / "doc.md"));
    fs::remove_all(dir);
}

TEST_CASE("config file supplies flags and explicit flags win") {
    const auto dir = fresh_dir("kx_cli_config");
    io::write_file(dir / "doc.txt", "甲乙丙丁。戊己庚辛。");
    io::write_file(dir / "cfg.json", R"({"limit": 5})");
    const auto from_config = kx_run({"chunk", (dir / "doc.txt").string(), "--config", (dir / "cfg.json").string()});
    REQUIRE(from_config.code == 0);
    CHECK(std::count(from_config.out.begin(), from_config.out.end(), '\n') == 2);
    const auto overridden = kx_run(
        {"chunk", (dir / "doc.txt").string(), "--config", (dir / "cfg.json").string(), "--limit", "300"});
    REQUIRE(overridden.code == 0);
    CHECK(std::count(overridden.out.begin(), overridden.out.end(), '\n') == 1);
    fs::remove_all(dir);
}

TEST_CASE("reader defaults to the environment variable") {
    const auto dir = fresh_dir("kx_cli_env");
    const auto corpus = small_corpus(dir);
    ::setenv(cli::kReaderEnv, "external:true", 1);
    const auto r = kx_run({"extract", "--docs", (corpus / "docs" / "test").string(), "--catalog",
                           (corpus / "catalog.json").string()});
    ::unsetenv(cli::kReaderEnv);
    CHECK(r.code == 1);
    CHECK(r.err.find("ReaderUnavailable") != std::string::npos);
    fs::remove_all(dir);
}
