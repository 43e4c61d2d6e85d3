#include "kx/protocol.h"

#include "kx/error.h"

#include <json.hpp>

namespace kx::protocol {

using nlohmann::json;
using nlohmann::ordered_json;

std::string encode_request(const Request& r) {
    return ordered_json{{"id", r.id}, {"question", r.question}, {"context", r.context}}.dump(-1, ' ', false);
}

Request decode_request(std::string_view line) {
    try {
        const auto obj = json::parse(line);
        return Request{obj.at("id").get<std::string>(), obj.at("question").get<std::string>(),
                       obj.at("context").get<std::string>()};
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("bad reader request: ") + e.what());
    }
}

std::string encode_response(const Response& r) {
    const auto& p = r.prediction;
    ordered_json out{{"id", r.id}, {"answer_text", p.answer_text}};
    out["start"] = p.start ? ordered_json(*p.start) : ordered_json(nullptr);
    out["end"] = p.end ? ordered_json(*p.end) : ordered_json(nullptr);
    out["score"] = p.score;
    out["null_score"] = p.null_score;
    return out.dump(-1, ' ', false);
}

namespace {

std::optional<std::size_t> optional_offset(const json& obj, const char* key) {
    if (!obj.contains(key) || obj[key].is_null()) {
        return std::nullopt;
    }
    if (!obj[key].is_number_integer() || obj[key].get<long long>() < 0) {
        throw MalformedResponse(std::string("field '") + key + "' must be a non-negative integer");
    }
    return obj[key].get<std::size_t>();
}

double number(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        throw MalformedResponse(std::string("field '") + key + "' must be a number");
    }
    return obj[key].get<double>();
}

}  // namespace

Response decode_response(std::string_view line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }
    if (!obj.is_object()) {
        throw MalformedResponse("response is not a JSON object");
    }
    Response r;
    if (obj.contains("id") && obj["id"].is_string()) {
        r.id = obj["id"].get<std::string>();
    } else if (obj.contains("id") && obj["id"].is_number_integer()) {
        r.id = std::to_string(obj["id"].get<long long>());
    } else {
        throw MalformedResponse("response without id");
    }
    if (!obj.contains("answer_text") || !obj["answer_text"].is_string()) {
        throw MalformedResponse("field 'answer_text' must be a string");
    }
    r.prediction.answer_text = obj["answer_text"].get<std::string>();
    r.prediction.start = optional_offset(obj, "start");
    r.prediction.end = optional_offset(obj, "end");
    r.prediction.score = number(obj, "score");
    r.prediction.null_score = number(obj, "null_score");
    return r;
}

void serve(reader::Reader& reader, std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto request = decode_request(line);
        const auto prediction = reader.read_span(request.question, request.context);
        out << encode_response(Response{request.id, prediction}) << '\n' << std::flush;
    }
}

}  // namespace kx::protocol
