#pragma once

#include "kx/dataset.h"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace kx::io {

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

// JSON array of {kp_id, question}.
dataset::Catalog parse_catalog(std::string_view json);
dataset::Catalog read_catalog(const std::filesystem::path& path);
std::string catalog_to_json(const dataset::Catalog& catalog);

// JSON array of {document_id, kp_id, answer_text}.
std::vector<dataset::Annotation> parse_annotations(std::string_view json);
std::vector<dataset::Annotation> read_annotations(const std::filesystem::path& path);
std::string annotations_to_json(const std::vector<dataset::Annotation>& annotations);

// A document path is either a file (id = file stem) or a directory whose
// *.txt / *.md files are loaded sorted by id.
std::vector<dataset::Document> read_documents(const std::filesystem::path& path);

}  // namespace kx::io
