#include "kx/reader.h"

#include "kx/chunker.h"
#include "kx/error.h"
#include "kx/text.h"

#include <algorithm>
#include <cmath>

namespace kx::reader {

SpanPrediction empty_prediction(double score, double null_score) {
    return SpanPrediction{std::string(), std::nullopt, std::nullopt, score, null_score};
}

void validate_prediction(const SpanPrediction& p, std::string_view context) {
    if (!std::isfinite(p.score) || !std::isfinite(p.null_score)) {
        throw MalformedResponse("non-finite score");
    }
    if (!p.has_answer()) {
        if (p.start || p.end) {
            throw MalformedResponse("empty answer with start/end offsets");
        }
        return;
    }
    if (!p.start || !p.end) {
        throw MalformedResponse("answer without start/end offsets");
    }
    if (*p.start >= *p.end) {
        throw MalformedResponse("span start must precede end");
    }
    const auto ctx = text::decode_utf8(context);
    if (*p.end > ctx.size()) {
        throw MalformedResponse("span end beyond context");
    }
    const auto slice = std::u32string_view(ctx).substr(*p.start, *p.end - *p.start);
    if (slice != text::decode_utf8(p.answer_text)) {
        throw MalformedResponse("context[start..end] does not equal answer_text");
    }
}

std::vector<SpanPrediction> Reader::read_batch(std::span<const Query> queries) {
    std::vector<SpanPrediction> out;
    out.reserve(queries.size());
    for (const auto& q : queries) {
        out.push_back(read_span(q.question, q.context));
    }
    return out;
}

void check_query(std::string_view question, std::string_view context) {
    if (text::trim(question).empty() || text::trim(context).empty()) {
        throw InvalidInput("reader queries need a non-blank question and context");
    }
}

namespace {

std::u32string squeeze(std::u32string_view s) {
    std::u32string out;
    for (char32_t c : text::nfkc(s)) {
        if (!text::is_space(c)) {
            out.push_back(c);
        }
    }
    return out;
}

std::uint64_t pack(char32_t a, char32_t b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

std::vector<std::uint64_t> packed_bigrams(std::u32string_view s) {
    const auto chars = squeeze(s);
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i + 1 < chars.size(); ++i) {
        out.push_back(pack(chars[i], chars[i + 1]));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

std::vector<std::u32string> char_bigrams(std::string_view text) {
    std::vector<std::u32string> out;
    for (auto packed : packed_bigrams(text::decode_utf8(text))) {
        out.push_back(std::u32string{static_cast<char32_t>(packed >> 32),
                                     static_cast<char32_t>(packed & 0xFFFFFFFFu)});
    }
    return out;
}

SpanPrediction LexicalReader::read_span(std::string_view question, std::string_view context) {
    check_query(question, context);
    const auto question_bigrams = packed_bigrams(text::decode_utf8(question));
    if (question_bigrams.empty()) {
        return empty_prediction(0.0, 1.0);
    }
    const auto ctx = text::decode_utf8(context);
    const std::u32string_view view(ctx);

    std::size_t best_overlap = 0;
    std::size_t best_start = 0;
    std::size_t best_end = 0;
    for (const auto& range : chunker::sentence_ranges(view)) {
        const auto sentence = view.substr(range.begin, range.end - range.begin);
        const auto trimmed = text::trim(sentence);
        if (trimmed.empty()) {
            continue;
        }
        const auto sentence_bigrams = packed_bigrams(trimmed);
        std::size_t overlap = 0;
        for (auto b : question_bigrams) {
            overlap += std::binary_search(sentence_bigrams.begin(), sentence_bigrams.end(), b) ? 1 : 0;
        }
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best_start = range.begin + static_cast<std::size_t>(trimmed.data() - sentence.data());
            best_end = best_start + trimmed.size();
        }
    }
    if (best_overlap == 0) {
        return empty_prediction(0.0, 1.0);
    }
    const double score = static_cast<double>(best_overlap) / static_cast<double>(question_bigrams.size());
    return SpanPrediction{text::encode_utf8(view.substr(best_start, best_end - best_start)), best_start, best_end,
                          score, 1.0 - score};
}

OracleReader::OracleReader(std::unordered_map<std::string, std::string> gold_by_question)
    : gold_(std::move(gold_by_question)) {}

SpanPrediction OracleReader::read_span(std::string_view question, std::string_view context) {
    check_query(question, context);
    const auto it = gold_.find(std::string(question));
    if (it == gold_.end()) {
        return empty_prediction(0.0, 1.0);
    }
    const auto ctx = text::decode_utf8(context);
    const auto span = text::find_normalized(ctx, text::decode_utf8(it->second));
    if (!span) {
        return empty_prediction(0.0, 1.0);
    }
    return SpanPrediction{text::encode_utf8(std::u32string_view(ctx).substr(span->start, span->end - span->start)),
                          span->start, span->end, 1.0, 0.0};
}

}  // namespace kx::reader
