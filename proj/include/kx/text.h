#pragma once

// UTF-8 helpers and NFKC normalization with an offset map back to the
// source. All offsets in this project count Unicode scalar values.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kx::text {

// Throws kx::InvalidInput on malformed UTF-8.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view text);

std::size_t length(std::string_view utf8);

bool is_space(char32_t c);
std::u32string_view trim(std::u32string_view text);
std::string trim(std::string_view utf8);

struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0;  // exclusive

    bool operator==(const CharSpan&) const = default;
};

// NFKC form of a source string. source_begin[i] / source_end[i] give the
// source range of the normalization segment that produced normalized char i.
struct Normalized {
    std::u32string text;
    std::vector<std::size_t> source_begin;
    std::vector<std::size_t> source_end;
};

Normalized normalize(std::u32string_view source);
std::u32string nfkc(std::u32string_view source);
std::string nfkc(std::string_view utf8);

// First occurrence of needle (already NFKC) in the normalized haystack,
// reported as a range of the haystack's source.
std::optional<CharSpan> find_normalized(const Normalized& haystack, std::u32string_view needle_nfkc);

// Convenience: normalizes both sides.
std::optional<CharSpan> find_normalized(std::u32string_view haystack, std::u32string_view needle);

// Number of non-overlapping occurrences of needle (already NFKC) in haystack.
std::size_t count_normalized(const Normalized& haystack, std::u32string_view needle_nfkc);

}  // namespace kx::text
