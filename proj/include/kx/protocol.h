#pragma once

// JSON-lines reader protocol, one object per line, UTF-8, char offsets:
//   request  {"id","question","context"}
//   response {"id","answer_text","start","end","score","null_score"}
// start/end are null (or omitted) when answer_text is empty.

#include "kx/reader.h"

#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace kx::protocol {

struct Request {
    std::string id;
    std::string question;
    std::string context;
};

struct Response {
    std::string id;
    reader::SpanPrediction prediction;
};

std::string encode_request(const Request& request);
Request decode_request(std::string_view line);  // InvalidInput

std::string encode_response(const Response& response);
// Checks shape and types only; MalformedResponse on failure.
Response decode_response(std::string_view line);

// Serves requests from `in` until EOF, answering each with `reader`. Used
// by test fakes and for exposing in-tree readers to other processes.
void serve(reader::Reader& reader, std::istream& in, std::ostream& out);

}  // namespace kx::protocol
