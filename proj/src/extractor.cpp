#include "kx/extractor.h"

#include "kx/text.h"

#include <json.hpp>

#include <atomic>
#include <mutex>
#include <thread>

namespace kx::extract {

std::optional<Answer> select_answer(std::span<const reader::SpanPrediction> per_segment,
                                    std::span<const chunker::Segment> segments, double tau) {
    std::optional<Answer> best;
    for (std::size_t k = 0; k < per_segment.size(); ++k) {
        const auto& p = per_segment[k];
        if (!p.has_answer() || !(p.score - p.null_score > tau)) {
            continue;
        }
        Answer candidate{p.answer_text, segments[k].index, p.score, segments[k].start_offset + p.start.value_or(0)};
        const bool better = !best || candidate.score > best->score ||
                            (candidate.score == best->score &&
                             (candidate.segment_index < best->segment_index ||
                              (candidate.segment_index == best->segment_index && candidate.start < best->start)));
        if (better) {
            best = std::move(candidate);
        }
    }
    return best;
}

namespace {

bool blank(std::string_view s) {
    return text::trim(std::u32string_view(text::decode_utf8(s))).empty();
}

}  // namespace

ExtractionResult extract(const std::string& document_id, std::string_view document_text,
                         const dataset::Catalog& catalog, const ReaderFactory& make_reader, const Options& options) {
    if (catalog.empty()) {
        throw InvalidInput("extraction needs a non-empty catalog");
    }
    std::vector<chunker::Segment> segments;
    for (auto& s : chunker::chunk(document_text, options.limit)) {
        if (!blank(s.text)) {
            segments.push_back(std::move(s));
        }
    }

    std::vector<std::optional<std::optional<Answer>>> done(catalog.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex error_mutex;
    std::optional<Error> first_error;

    auto work = [&] {
        std::shared_ptr<reader::Reader> reader;
        try {
            reader = make_reader();
        } catch (const Error& e) {
            std::lock_guard lock(error_mutex);
            if (!first_error) {
                first_error = e;
            }
            stop = true;
            return;
        }
        std::vector<reader::Query> queries(segments.size());
        for (std::size_t k = 0; k < segments.size(); ++k) {
            queries[k].context = segments[k].text;
        }
        while (!stop) {
            const std::size_t i = next.fetch_add(1);
            if (i >= catalog.size()) {
                return;
            }
            for (auto& q : queries) {
                q.question = catalog[i].question;
            }
            try {
                const auto predictions = reader->read_batch(queries);
                done[i] = select_answer(predictions, segments, options.tau);
            } catch (const Error& e) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = e;
                }
                stop = true;
                return;
            }
        }
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, catalog.size()));
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    ExtractionResult result{document_id, {}};
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        if (done[i]) {
            result.answers.emplace(catalog[i].kp_id, std::move(*done[i]));
        }
    }
    if (first_error) {
        throw ExtractionAborted(*first_error, std::move(result));
    }
    return result;
}

ExtractionResult extract(const std::string& document_id, std::string_view document_text,
                         const dataset::Catalog& catalog, reader::Reader& reader, const Options& options) {
    auto opts = options;
    if (!reader.thread_safe()) {
        opts.workers = 1;
    }
    const std::shared_ptr<reader::Reader> shared(&reader, [](reader::Reader*) {});
    return extract(document_id, document_text, catalog, [shared] { return shared; }, opts);
}

using nlohmann::json;
using nlohmann::ordered_json;

std::string results_to_json(const std::vector<ExtractionResult>& results) {
    ordered_json out = ordered_json::array();
    for (const auto& r : results) {
        ordered_json answers = ordered_json::object();
        for (const auto& [kp_id, answer] : r.answers) {
            if (answer) {
                answers[kp_id] = ordered_json{{"answer_text", answer->answer_text},
                                              {"segment_index", answer->segment_index},
                                              {"score", answer->score},
                                              {"start", answer->start}};
            } else {
                answers[kp_id] = nullptr;
            }
        }
        out.push_back(ordered_json{{"document_id", r.document_id}, {"answers", std::move(answers)}});
    }
    return out.dump(2, ' ', false) + "\n";
}

std::vector<ExtractionResult> parse_results_json(std::string_view text) {
    std::vector<ExtractionResult> out;
    try {
        const auto doc = json::parse(text);
        for (const auto& entry : doc) {
            ExtractionResult r{entry.at("document_id").get<std::string>(), {}};
            for (const auto& [kp_id, value] : entry.at("answers").items()) {
                if (value.is_null()) {
                    r.answers.emplace(kp_id, std::nullopt);
                } else {
                    r.answers.emplace(kp_id, Answer{value.at("answer_text").get<std::string>(),
                                                    value.at("segment_index").get<std::size_t>(),
                                                    value.at("score").get<double>(),
                                                    value.value("start", std::size_t{0})});
                }
            }
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("extraction results: ") + e.what());
    }
    return out;
}

}  // namespace kx::extract
