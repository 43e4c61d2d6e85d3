#include "kx/error.h"
#include "kx/external_reader.h"
#include "kx/protocol.h"
#include "kx/reader.h"

#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <sys/socket.h>
#include <sys/un.h>
#include <thread>
#include <unistd.h>

using namespace kx;

namespace {

std::string fake(const std::string& mode) {
    return std::string(KX_FAKE_READER) + " " + mode;
}

}  // namespace

TEST_CASE("external reader: schema example") {
    auto r = reader::ExternalReader::spawn(fake("fixed"));
    const auto p = r->read_span("q", "abc");
    CHECK(p == reader::SpanPrediction{"b", 1, 2, 0.9, 0.1});
}

TEST_CASE("external reader: responses are matched by id") {
    auto r = reader::ExternalReader::spawn(fake("shuffle 3"));
    const std::vector<reader::Query> queries{
        {"犹豫期是多少天", "本合同犹豫期为15天。"},
        {"诉讼时效", "诉讼时效为2年。"},
        {"保险金额", "其他内容。保险金额为10万元。"},
    };
    const auto got = r->read_batch(queries);
    reader::LexicalReader lexical;
    REQUIRE(got.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(got[i] == lexical.read_span(queries[i].question, queries[i].context));
    }
    CHECK(got[0].answer_text != got[2].answer_text);
}

TEST_CASE("external reader: large pipelined batch") {
    auto r = reader::ExternalReader::spawn(fake("lexical"));
    std::vector<reader::Query> queries;
    for (int i = 0; i < 2000; ++i) {
        queries.push_back({"犹豫期是多少天", "第" + std::to_string(i) + "段。本合同犹豫期为" + std::to_string(i) + "天。"});
    }
    const auto got = r->read_batch(queries);
    REQUIRE(got.size() == queries.size());
    CHECK(got[1234].answer_text == "本合同犹豫期为1234天。");
}

TEST_CASE("external reader: invariant violations are rejected") {
    auto r = reader::ExternalReader::spawn(fake("bad-slice"));
    CHECK_THROWS_AS(r->read_span("q", "abc"), MalformedResponse);
    CHECK_THROWS_AS(r->read_span("q", "abc"), ReaderUnavailable);

    auto unknown = reader::ExternalReader::spawn(fake("unknown-id"));
    CHECK_THROWS_AS(unknown->read_span("q", "abc"), MalformedResponse);
}

TEST_CASE("external reader: dead process") {
    auto r = reader::ExternalReader::spawn(fake("exit"));
    CHECK_THROWS_AS(r->read_span("q", "abc"), ReaderUnavailable);

    auto missing = reader::ExternalReader::spawn("/nonexistent/reader-binary");
    CHECK_THROWS_AS(missing->read_span("q", "abc"), ReaderUnavailable);
}

TEST_CASE("external reader: unix socket transport") {
    const auto path = (std::filesystem::temp_directory_path() / ("kx_reader_" + std::to_string(::getpid()) + ".sock")).string();
    ::unlink(path.c_str());
    const int listener = ::socket(AF_UNIX, SOCK_STREAM, 0);
    REQUIRE(listener >= 0);
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, path.c_str(), sizeof addr.sun_path - 1);
    REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
    REQUIRE(::listen(listener, 1) == 0);

    std::thread server([listener] {
        const int conn = ::accept(listener, nullptr, nullptr);
        reader::LexicalReader lexical;
        std::string buffer;
        char chunk[4096];
        ssize_t n;
        while ((n = ::read(conn, chunk, sizeof chunk)) > 0) {
            buffer.append(chunk, static_cast<std::size_t>(n));
            std::size_t nl;
            while ((nl = buffer.find('\n')) != std::string::npos) {
                const auto req = protocol::decode_request(buffer.substr(0, nl));
                buffer.erase(0, nl + 1);
                const auto line =
                    protocol::encode_response({req.id, lexical.read_span(req.question, req.context)}) + "\n";
                if (::write(conn, line.data(), line.size()) < 0) break;
            }
        }
        ::close(conn);
    });

    {
        auto r = reader::ExternalReader::connect_unix(path);
        const auto p = r->read_span("犹豫期是多少天", "其他。本合同犹豫期为15天。");
        CHECK(p.answer_text == "本合同犹豫期为15天。");
        CHECK(p.start == 3u);
    }
    server.join();
    ::close(listener);
    ::unlink(path.c_str());

    CHECK_THROWS_AS(reader::ExternalReader::connect_unix(path), ReaderUnavailable);
}
