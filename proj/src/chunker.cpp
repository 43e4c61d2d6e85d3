#include "kx/chunker.h"

#include "kx/error.h"
#include "kx/text.h"

namespace kx::chunker {

namespace {

constexpr std::u32string_view kTerminators = U"。！？；!?;\n";
constexpr std::u32string_view kClosers = U"”’」』）)】》〉\"'";

bool is_terminator(char32_t c) {
    return kTerminators.find(c) != std::u32string_view::npos;
}

bool is_closer(char32_t c) {
    return kClosers.find(c) != std::u32string_view::npos;
}

}  // namespace

std::vector<Range> sentence_ranges(std::u32string_view text) {
    std::vector<Range> out;
    std::size_t begin = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (is_terminator(text[i])) {
            std::size_t end = i + 1;
            if (text[i] != U'\n') {
                while (end < text.size() && is_closer(text[end])) {
                    ++end;
                }
            }
            out.push_back(Range{begin, end});
            begin = end;
            i = end;
        } else {
            ++i;
        }
    }
    if (begin < text.size()) {
        out.push_back(Range{begin, text.size()});
    }
    return out;
}

std::vector<Sentence> split_sentences(std::string_view utf8) {
    const auto decoded = text::decode_utf8(utf8);
    const std::u32string_view view(decoded);
    std::vector<Sentence> out;
    for (const auto& r : sentence_ranges(view)) {
        out.push_back(Sentence{text::encode_utf8(view.substr(r.begin, r.end - r.begin)), r.begin});
    }
    return out;
}

std::vector<Segment> chunk(std::string_view utf8, std::size_t limit) {
    if (limit < 1) {
        throw InvalidInput("chunk limit must be at least 1");
    }
    const auto decoded = text::decode_utf8(utf8);
    const std::u32string_view view(decoded);

    std::vector<Segment> out;
    std::size_t seg_begin = 0;
    std::size_t seg_end = 0;
    auto flush = [&] {
        if (seg_end > seg_begin) {
            out.push_back(Segment{text::encode_utf8(view.substr(seg_begin, seg_end - seg_begin)), seg_begin,
                                  out.size(), seg_end - seg_begin});
        }
        seg_begin = seg_end;
    };
    for (const auto& r : sentence_ranges(view)) {
        const std::size_t current = seg_end - seg_begin;
        if (current > 0 && current + (r.end - r.begin) > limit) {
            flush();
        }
        seg_end = r.end;
    }
    flush();
    return out;
}

}  // namespace kx::chunker
