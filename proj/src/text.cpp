#include "kx/text.h"

#include "kx/error.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

namespace kx::text {

std::u32string decode_utf8(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    std::size_t i = 0;
    const auto n = utf8.size();
    auto byte = [&](std::size_t k) { return static_cast<unsigned char>(utf8[k]); };
    while (i < n) {
        const unsigned char b0 = byte(i);
        char32_t cp = 0;
        std::size_t extra = 0;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            extra = 1;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            extra = 2;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            extra = 3;
        } else {
            throw InvalidInput("invalid UTF-8 lead byte at offset " + std::to_string(i));
        }
        for (std::size_t k = 1; k <= extra; ++k) {
            if (i + k >= n || (byte(i + k) & 0xC0) != 0x80) {
                throw InvalidInput("invalid UTF-8 continuation at offset " + std::to_string(i));
            }
            cp = (cp << 6) | (byte(i + k) & 0x3F);
        }
        const bool overlong = (extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
                              (extra == 3 && cp < 0x10000);
        if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            throw InvalidInput("invalid UTF-8 scalar at offset " + std::to_string(i));
        }
        out.push_back(cp);
        i += extra + 1;
    }
    return out;
}

std::string encode_utf8(std::u32string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char32_t cp : text) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

std::size_t length(std::string_view utf8) {
    std::size_t n = 0;
    for (char c : utf8) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) {
            ++n;
        }
    }
    return n;
}

bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
           c == 0x3000 || c == 0x00A0 || u_isUWhiteSpace(static_cast<UChar32>(c));
}

std::u32string_view trim(std::u32string_view text) {
    std::size_t b = 0;
    std::size_t e = text.size();
    while (b < e && is_space(text[b])) {
        ++b;
    }
    while (e > b && is_space(text[e - 1])) {
        --e;
    }
    return text.substr(b, e - b);
}

std::string trim(std::string_view utf8) {
    const auto decoded = decode_utf8(utf8);
    return encode_utf8(trim(std::u32string_view(decoded)));
}

namespace {

const icu::Normalizer2& nfkc_instance() {
    static const icu::Normalizer2* instance = [] {
        UErrorCode status = U_ZERO_ERROR;
        const icu::Normalizer2* n = icu::Normalizer2::getNFKCInstance(status);
        if (U_FAILURE(status) || n == nullptr) {
            throw std::runtime_error("ICU NFKC normalizer unavailable");
        }
        return n;
    }();
    return *instance;
}

icu::UnicodeString to_icu(std::u32string_view s) {
    return icu::UnicodeString::fromUTF32(reinterpret_cast<const UChar32*>(s.data()),
                                         static_cast<int32_t>(s.size()));
}

std::u32string from_icu(const icu::UnicodeString& s) {
    std::u32string out;
    out.reserve(static_cast<std::size_t>(s.length()));
    for (int32_t i = 0; i < s.length();) {
        const UChar32 c = s.char32At(i);
        out.push_back(static_cast<char32_t>(c));
        i += U16_LENGTH(c);
    }
    return out;
}

}  // namespace

Normalized normalize(std::u32string_view source) {
    const auto& normalizer = nfkc_instance();
    Normalized out;
    UErrorCode status = U_ZERO_ERROR;
    if (normalizer.isNormalized(to_icu(source), status) && U_SUCCESS(status)) {
        out.text.assign(source);
        out.source_begin.resize(source.size());
        out.source_end.resize(source.size());
        for (std::size_t i = 0; i < source.size(); ++i) {
            out.source_begin[i] = i;
            out.source_end[i] = i + 1;
        }
        return out;
    }

    // Normalize segment by segment; boundaries are positions where the
    // normalizer guarantees no interaction with preceding text.
    std::size_t seg_start = 0;
    auto flush = [&](std::size_t seg_end) {
        if (seg_end == seg_start) {
            return;
        }
        UErrorCode st = U_ZERO_ERROR;
        const auto normalized =
            from_icu(normalizer.normalize(to_icu(source.substr(seg_start, seg_end - seg_start)), st));
        if (U_FAILURE(st)) {
            throw std::runtime_error("NFKC normalization failed");
        }
        for (char32_t c : normalized) {
            out.text.push_back(c);
            out.source_begin.push_back(seg_start);
            out.source_end.push_back(seg_end);
        }
        seg_start = seg_end;
    };
    for (std::size_t i = 1; i < source.size(); ++i) {
        if (normalizer.hasBoundaryBefore(static_cast<UChar32>(source[i]))) {
            flush(i);
        }
    }
    flush(source.size());
    return out;
}

std::u32string nfkc(std::u32string_view source) {
    return normalize(source).text;
}

std::string nfkc(std::string_view utf8) {
    return encode_utf8(nfkc(std::u32string_view(decode_utf8(utf8))));
}

std::optional<CharSpan> find_normalized(const Normalized& haystack, std::u32string_view needle_nfkc) {
    if (needle_nfkc.empty()) {
        return std::nullopt;
    }
    const auto pos = std::u32string_view(haystack.text).find(needle_nfkc);
    if (pos == std::u32string_view::npos) {
        return std::nullopt;
    }
    return CharSpan{haystack.source_begin[pos], haystack.source_end[pos + needle_nfkc.size() - 1]};
}

std::optional<CharSpan> find_normalized(std::u32string_view haystack, std::u32string_view needle) {
    return find_normalized(normalize(haystack), nfkc(needle));
}

std::size_t count_normalized(const Normalized& haystack, std::u32string_view needle_nfkc) {
    if (needle_nfkc.empty()) {
        return 0;
    }
    std::size_t count = 0;
    const std::u32string_view hay(haystack.text);
    for (auto pos = hay.find(needle_nfkc); pos != std::u32string_view::npos;
         pos = hay.find(needle_nfkc, pos + needle_nfkc.size())) {
        ++count;
    }
    return count;
}

}  // namespace kx::text
