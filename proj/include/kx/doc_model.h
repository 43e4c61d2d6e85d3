#pragma once

// Clause documents parsed into a heading tree whose leaves are paragraphs.
//
// Heading conventions:
//   markdown  lines starting with 1..6 '#' are headings of that level; the
//             heading text follows the markers.
//   plain     outline labels are headings; the whole line is the heading
//             text. Levels: 第X章 / 第X部分 = 1, 第X节 = 2, 第X条 = 3,
//             numeric outlines "1." "1、" = 4, "1.1" = 5, "1.1.1" = 6, ...
//
// Every other non-blank line is one paragraph leaf (trimmed). The first
// heading becomes the root when it precedes all body text and every later
// heading is deeper; otherwise a synthetic level-0 root is created.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kx::doc {

enum class Format { plain, markdown };

Format parse_format(std::string_view name);
std::string_view format_name(Format format);

struct Node {
    enum class Kind { heading, leaf };

    Kind kind = Kind::leaf;
    int level = 0;            // headings only
    std::string text;
    std::size_t offset = 0;   // char offset of text in the source
    std::vector<Node> children;

    bool is_leaf() const noexcept { return kind == Kind::leaf; }
    bool operator==(const Node&) const = default;
};

struct DocumentTree {
    Node root;
    std::string source_id;
    bool synthetic_root = false;

    bool operator==(const DocumentTree&) const = default;
};

struct LeafContext {
    std::string leaf_text;
    std::vector<std::string> path;  // ancestor heading texts, root first (synthetic root omitted)
    std::size_t char_offset = 0;

    bool operator==(const LeafContext&) const = default;
};

// Throws MalformedHeading (heading marker without text) and InvalidInput
// (bad UTF-8).
DocumentTree parse_document(std::string_view text, Format format, std::string source_id = {});

// All leaves in source order.
std::vector<LeafContext> leaf_contexts(const DocumentTree& tree);

// First leaf (source order) containing answer after NFKC normalization of
// both sides. When more than one leaf matches, a warning is appended.
std::optional<LeafContext> locate_answer_context(const DocumentTree& tree, std::string_view answer,
                                                 std::vector<std::string>* warnings = nullptr);

}  // namespace kx::doc
