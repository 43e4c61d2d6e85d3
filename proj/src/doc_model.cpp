#include "kx/doc_model.h"

#include "kx/error.h"
#include "kx/text.h"

#include <algorithm>

namespace kx::doc {

Format parse_format(std::string_view name) {
    if (name == "plain") {
        return Format::plain;
    }
    if (name == "markdown" || name == "markdown-headings") {
        return Format::markdown;
    }
    throw InvalidInput("unknown document format: " + std::string(name));
}

std::string_view format_name(Format format) {
    return format == Format::plain ? "plain" : "markdown";
}

namespace {

struct Line {
    std::u32string_view content;  // trimmed
    std::size_t offset = 0;       // char offset of content
    std::size_t number = 0;       // 1-based
};

struct HeadingMatch {
    int level = 0;
    std::u32string_view text;
    std::size_t offset = 0;
};

bool is_cjk_numeral(char32_t c) {
    static constexpr std::u32string_view numerals = U"零〇一二三四五六七八九十百千两";
    return numerals.find(c) != std::u32string_view::npos || (c >= U'0' && c <= U'9');
}

std::optional<HeadingMatch> match_markdown(const Line& line) {
    const auto s = line.content;
    std::size_t hashes = 0;
    while (hashes < s.size() && s[hashes] == U'#') {
        ++hashes;
    }
    if (hashes == 0 || hashes > 6) {
        return std::nullopt;
    }
    const auto rest = s.substr(hashes);
    const auto body = text::trim(rest);
    if (body.empty()) {
        throw MalformedHeading(line.number, "heading marker without text on line " + std::to_string(line.number));
    }
    const std::size_t lead = static_cast<std::size_t>(body.data() - s.data());
    return HeadingMatch{static_cast<int>(hashes), body, line.offset + lead};
}

std::optional<HeadingMatch> match_plain(const Line& line) {
    const auto s = line.content;
    if (!s.empty() && s[0] == U'第') {
        std::size_t i = 1;
        while (i < s.size() && is_cjk_numeral(s[i])) {
            ++i;
        }
        if (i > 1 && i < s.size()) {
            const auto suffix = s.substr(i);
            int level = 0;
            if (suffix.starts_with(U"部分") || suffix[0] == U'章') {
                level = 1;
            } else if (suffix[0] == U'节') {
                level = 2;
            } else if (suffix[0] == U'条') {
                level = 3;
            }
            if (level > 0) {
                return HeadingMatch{level, s, line.offset};
            }
        }
        return std::nullopt;
    }

    // Numeric outline: digits ('.' digits)* followed by '.', '、', or whitespace.
    std::size_t i = 0;
    int depth = 0;
    while (true) {
        const std::size_t start = i;
        while (i < s.size() && s[i] >= U'0' && s[i] <= U'9') {
            ++i;
        }
        if (i == start) {
            return std::nullopt;
        }
        ++depth;
        if (i + 1 < s.size() && s[i] == U'.' && s[i + 1] >= U'0' && s[i + 1] <= U'9') {
            ++i;
            continue;
        }
        break;
    }
    std::size_t marker_end = i;
    if (i < s.size() && (s[i] == U'.' || s[i] == U'、')) {
        marker_end = i + 1;
    } else if (i < s.size() && text::is_space(s[i]) && depth > 1) {
        marker_end = i;
    } else if (i == s.size() && depth > 1) {
        marker_end = i;
    } else {
        return std::nullopt;
    }
    if (text::trim(s.substr(marker_end)).empty()) {
        throw MalformedHeading(line.number, "heading marker without text on line " + std::to_string(line.number));
    }
    return HeadingMatch{3 + depth, s, line.offset};
}

std::vector<Line> split_lines(std::u32string_view source) {
    std::vector<Line> lines;
    std::size_t start = 0;
    std::size_t number = 1;
    while (start <= source.size()) {
        auto end = source.find(U'\n', start);
        if (end == std::u32string_view::npos) {
            end = source.size();
        }
        const auto raw = source.substr(start, end - start);
        const auto content = text::trim(raw);
        const std::size_t lead = content.empty() ? 0 : static_cast<std::size_t>(content.data() - raw.data());
        lines.push_back(Line{content, start + lead, number});
        if (end == source.size()) {
            break;
        }
        start = end + 1;
        ++number;
    }
    return lines;
}

}  // namespace

DocumentTree parse_document(std::string_view utf8, Format format, std::string source_id) {
    const auto source = text::decode_utf8(utf8);
    const auto lines = split_lines(source);

    struct Item {
        std::optional<HeadingMatch> heading;
        const Line* line;
    };
    std::vector<Item> items;
    for (const auto& line : lines) {
        if (line.content.empty()) {
            continue;
        }
        auto heading = format == Format::markdown ? match_markdown(line) : match_plain(line);
        items.push_back(Item{heading, &line});
    }

    DocumentTree tree;
    tree.source_id = std::move(source_id);

    bool title_root = !items.empty() && items.front().heading.has_value();
    if (title_root) {
        const int root_level = items.front().heading->level;
        title_root = std::all_of(items.begin() + 1, items.end(), [&](const Item& item) {
            return !item.heading || item.heading->level > root_level;
        });
    }

    std::size_t first = 0;
    if (title_root) {
        const auto& h = *items.front().heading;
        tree.root = Node{Node::Kind::heading, h.level, text::encode_utf8(h.text), h.offset, {}};
        first = 1;
    } else {
        tree.root = Node{Node::Kind::heading, 0, std::string(), 0, {}};
        tree.synthetic_root = true;
    }

    // Path of open headings; back() is where new nodes attach.
    std::vector<Node*> open{&tree.root};
    for (std::size_t k = first; k < items.size(); ++k) {
        const auto& item = items[k];
        if (item.heading) {
            const auto& h = *item.heading;
            while (open.size() > 1 && open.back()->level >= h.level) {
                open.pop_back();
            }
            auto& parent = *open.back();
            parent.children.push_back(
                Node{Node::Kind::heading, h.level, text::encode_utf8(h.text), h.offset, {}});
            open.push_back(&parent.children.back());
        } else {
            open.back()->children.push_back(
                Node{Node::Kind::leaf, 0, text::encode_utf8(item.line->content), item.line->offset, {}});
        }
    }
    return tree;
}

namespace {

void collect_leaves(const Node& node, std::vector<std::string>& path, std::vector<LeafContext>& out) {
    if (node.is_leaf()) {
        out.push_back(LeafContext{node.text, path, node.offset});
        return;
    }
    path.push_back(node.text);
    for (const auto& child : node.children) {
        collect_leaves(child, path, out);
    }
    path.pop_back();
}

}  // namespace

std::vector<LeafContext> leaf_contexts(const DocumentTree& tree) {
    std::vector<LeafContext> out;
    std::vector<std::string> path;
    if (tree.synthetic_root) {
        for (const auto& child : tree.root.children) {
            collect_leaves(child, path, out);
        }
    } else {
        collect_leaves(tree.root, path, out);
    }
    return out;
}

std::optional<LeafContext> locate_answer_context(const DocumentTree& tree, std::string_view answer,
                                                 std::vector<std::string>* warnings) {
    const auto needle = text::nfkc(std::u32string_view(text::decode_utf8(answer)));
    if (needle.empty()) {
        return std::nullopt;
    }
    std::optional<LeafContext> found;
    std::size_t matches = 0;
    for (auto& leaf : leaf_contexts(tree)) {
        const auto normalized = text::normalize(text::decode_utf8(leaf.leaf_text));
        if (text::find_normalized(normalized, needle)) {
            if (!found) {
                found = std::move(leaf);
            }
            ++matches;
        }
    }
    if (matches > 1 && warnings != nullptr) {
        warnings->push_back("answer '" + std::string(answer) + "' occurs in " + std::to_string(matches) +
                            " leaves of '" + tree.source_id + "'; using the first");
    }
    return found;
}

}  // namespace kx::doc
