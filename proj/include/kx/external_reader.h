#pragma once

#include "kx/reader.h"

#include <memory>
#include <string>

namespace kx::reader {

// Client for an out-of-process reader speaking the JSON-lines protocol in
// kx/protocol.h. Requests in a batch are pipelined and responses matched
// by id, so the server may answer out of order. Every response is validated
// against its context; violations raise MalformedResponse. A dead or
// silent peer raises ReaderUnavailable. After either error the client is
// unusable.
//
// Not safe for concurrent calls; use one client per worker.
class ExternalReader final : public Reader {
public:
    // Runs `command` through /bin/sh with stdin/stdout connected to the client.
    static std::unique_ptr<ExternalReader> spawn(const std::string& command);
    // Connects to a listening unix-domain stream socket.
    static std::unique_ptr<ExternalReader> connect_unix(const std::string& socket_path);

    ~ExternalReader() override;
    ExternalReader(const ExternalReader&) = delete;
    ExternalReader& operator=(const ExternalReader&) = delete;

    SpanPrediction read_span(std::string_view question, std::string_view context) override;
    std::vector<SpanPrediction> read_batch(std::span<const Query> queries) override;
    bool thread_safe() const noexcept override { return false; }

private:
    struct Impl;
    explicit ExternalReader(std::unique_ptr<Impl> impl);
    std::unique_ptr<Impl> impl_;
};

}  // namespace kx::reader
