#pragma once

// Sentence splitting and greedy, sentence-preserving segmentation. Lengths
// and offsets count Unicode scalar values.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace kx::chunker {

inline constexpr std::size_t kDefaultLimit = 300;

struct Sentence {
    std::string text;
    std::size_t offset = 0;

    bool operator==(const Sentence&) const = default;
};

struct Segment {
    std::string text;
    std::size_t start_offset = 0;
    std::size_t index = 0;
    std::size_t length = 0;  // in chars

    bool operator==(const Segment&) const = default;
};

// A sentence ends after one of 。！？；!?;\n. Closing quotes and brackets
// directly after the terminator stay with the sentence.
std::vector<Sentence> split_sentences(std::string_view text);

// Boundaries as [begin, end) char ranges; used where callers already hold
// decoded text.
struct Range {
    std::size_t begin = 0;
    std::size_t end = 0;
};
std::vector<Range> sentence_ranges(std::u32string_view text);

// Greedy packing of whole sentences up to `limit` chars. A sentence longer
// than the limit becomes its own segment. Throws InvalidInput if limit < 1.
std::vector<Segment> chunk(std::string_view text, std::size_t limit = kDefaultLimit);

}  // namespace kx::chunker
