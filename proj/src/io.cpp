#include "kx/io.h"

#include "kx/error.h"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kx::io {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IOError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IOError("cannot read " + path.string());
    }
    return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IOError("cannot open " + path.string() + " for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw IOError("cannot write " + path.string());
    }
}

namespace {

json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InvalidInput(std::string(what) + ": " + e.what());
    }
}

std::string required_string(const json& obj, const char* key, std::string_view what) {
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
        throw InvalidInput(std::string(what) + ": entry missing string field '" + key + "'");
    }
    return obj[key].get<std::string>();
}

}  // namespace

dataset::Catalog parse_catalog(std::string_view text) {
    const auto doc = parse_json(text, "catalog");
    if (!doc.is_array()) {
        throw InvalidInput("catalog: expected a JSON array");
    }
    dataset::Catalog catalog;
    for (const auto& entry : doc) {
        catalog.push_back({required_string(entry, "kp_id", "catalog"), required_string(entry, "question", "catalog")});
    }
    dataset::validate_catalog(catalog);
    return catalog;
}

dataset::Catalog read_catalog(const std::filesystem::path& path) {
    return parse_catalog(read_file(path));
}

std::string catalog_to_json(const dataset::Catalog& catalog) {
    ordered_json out = ordered_json::array();
    for (const auto& kp : catalog) {
        out.push_back({{"kp_id", kp.kp_id}, {"question", kp.question}});
    }
    return out.dump(2, ' ', false) + "\n";
}

std::vector<dataset::Annotation> parse_annotations(std::string_view text) {
    const auto doc = parse_json(text, "annotations");
    if (!doc.is_array()) {
        throw InvalidInput("annotations: expected a JSON array");
    }
    std::vector<dataset::Annotation> out;
    for (const auto& entry : doc) {
        dataset::Annotation a{required_string(entry, "document_id", "annotations"),
                              required_string(entry, "kp_id", "annotations"),
                              required_string(entry, "answer_text", "annotations")};
        if (a.answer_text.empty()) {
            throw InvalidInput("annotations: empty answer_text for " + a.document_id + "/" + a.kp_id);
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<dataset::Annotation> read_annotations(const std::filesystem::path& path) {
    return parse_annotations(read_file(path));
}

std::string annotations_to_json(const std::vector<dataset::Annotation>& annotations) {
    ordered_json out = ordered_json::array();
    for (const auto& a : annotations) {
        out.push_back({{"document_id", a.document_id}, {"kp_id", a.kp_id}, {"answer_text", a.answer_text}});
    }
    return out.dump(2, ' ', false) + "\n";
}

std::vector<dataset::Document> read_documents(const std::filesystem::path& path) {
    std::vector<dataset::Document> docs;
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        for (const auto& entry : std::filesystem::directory_iterator(path)) {
            const auto ext = entry.path().extension();
            if (entry.is_regular_file() && (ext == ".txt" || ext == ".md")) {
                docs.push_back({entry.path().stem().string(), read_file(entry.path())});
            }
        }
        std::sort(docs.begin(), docs.end(),
                  [](const auto& a, const auto& b) { return a.document_id < b.document_id; });
    } else {
        docs.push_back({path.stem().string(), read_file(path)});
    }
    return docs;
}

}  // namespace kx::io
