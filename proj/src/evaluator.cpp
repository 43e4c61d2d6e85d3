#include "kx/evaluator.h"

#include "kx/error.h"
#include "kx/text.h"

#include <json.hpp>

#include <cstdio>
#include <map>
#include <set>

namespace kx::eval {

bool match_answer(std::string_view predicted, std::string_view gold) {
    const auto p = text::nfkc(std::u32string_view(text::decode_utf8(predicted)));
    const auto g = text::nfkc(std::u32string_view(text::decode_utf8(gold)));
    return text::trim(std::u32string_view(p)) == text::trim(std::u32string_view(g));
}

double f1(double p, double r) {
    if (p + r == 0.0) {
        return 0.0;
    }
    return 2.0 * p * r / (p + r);
}

Counts& Counts::operator+=(const Counts& o) {
    n_predicted_nonnull += o.n_predicted_nonnull;
    n_correct_nonnull += o.n_correct_nonnull;
    n_gold_nonnull += o.n_gold_nonnull;
    n_recalled += o.n_recalled;
    return *this;
}

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
    undefined = den == 0;
    return undefined ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Scores scores_from(const Counts& c) {
    Scores s;
    s.precision = ratio(c.n_correct_nonnull, c.n_predicted_nonnull, s.precision_undefined);
    s.recall = ratio(c.n_recalled, c.n_gold_nonnull, s.recall_undefined);
    s.f1_undefined = s.precision + s.recall == 0.0;
    s.f1 = f1(s.precision, s.recall);
    return s;
}

EvalReport evaluate(const std::vector<extract::ExtractionResult>& results,
                    const std::vector<dataset::Annotation>& gold, const dataset::Catalog& catalog) {
    std::set<std::string_view> kp_ids;
    for (const auto& kp : catalog) {
        kp_ids.insert(kp.kp_id);
    }

    std::map<std::string, std::map<std::string, std::string>> gold_by_doc;
    for (const auto& a : gold) {
        if (!kp_ids.contains(a.kp_id)) {
            throw UnknownKnowledgePoint(a.kp_id);
        }
        gold_by_doc[a.document_id][a.kp_id] = a.answer_text;
    }
    std::map<std::string, const extract::ExtractionResult*> result_by_doc;
    for (const auto& r : results) {
        if (!result_by_doc.emplace(r.document_id, &r).second) {
            throw InvalidInput("duplicate extraction result for " + r.document_id);
        }
        if (!gold_by_doc.contains(r.document_id)) {
            throw MissingDocument("no gold annotations for document " + r.document_id);
        }
        for (const auto& [kp_id, answer] : r.answers) {
            if (!kp_ids.contains(kp_id)) {
                throw UnknownKnowledgePoint(kp_id);
            }
        }
    }
    for (const auto& [doc_id, _] : gold_by_doc) {
        if (!result_by_doc.contains(doc_id)) {
            throw MissingDocument("no extraction result for document " + doc_id);
        }
    }

    EvalReport report;
    double p_sum = 0.0;
    double r_sum = 0.0;
    std::size_t p_docs = 0;
    std::size_t r_docs = 0;
    for (const auto& [doc_id, result] : result_by_doc) {
        const auto& doc_gold = gold_by_doc.at(doc_id);
        Counts c;
        for (const auto& kp : catalog) {
            const std::string* predicted = nullptr;
            if (auto it = result->answers.find(kp.kp_id); it != result->answers.end() && it->second) {
                predicted = &it->second->answer_text;
            }
            const std::string* expected = nullptr;
            if (auto it = doc_gold.find(kp.kp_id); it != doc_gold.end()) {
                expected = &it->second;
            }
            const bool correct = predicted && expected && match_answer(*predicted, *expected);
            if (predicted) {
                ++c.n_predicted_nonnull;
                c.n_correct_nonnull += correct ? 1 : 0;
            }
            if (expected) {
                ++c.n_gold_nonnull;
                c.n_recalled += correct ? 1 : 0;
            }
        }
        DocumentReport doc{doc_id, c, scores_from(c)};
        if (!doc.scores.precision_undefined) {
            p_sum += doc.scores.precision;
            ++p_docs;
        }
        if (!doc.scores.recall_undefined) {
            r_sum += doc.scores.recall;
            ++r_docs;
        }
        report.counts += c;
        report.documents.push_back(std::move(doc));
    }
    report.micro = scores_from(report.counts);
    report.macro.precision_undefined = p_docs == 0;
    report.macro.recall_undefined = r_docs == 0;
    report.macro.precision = p_docs == 0 ? 0.0 : p_sum / static_cast<double>(p_docs);
    report.macro.recall = r_docs == 0 ? 0.0 : r_sum / static_cast<double>(r_docs);
    report.macro.f1 = f1(report.macro.precision, report.macro.recall);
    report.macro.f1_undefined = report.macro.precision + report.macro.recall == 0.0;
    return report;
}

namespace {

using nlohmann::ordered_json;

ordered_json scores_json(const Scores& s) {
    return ordered_json{{"precision", s.precision},
                        {"recall", s.recall},
                        {"f1", s.f1},
                        {"precision_undefined", s.precision_undefined},
                        {"recall_undefined", s.recall_undefined},
                        {"f1_undefined", s.f1_undefined}};
}

ordered_json counts_json(const Counts& c) {
    return ordered_json{{"n_predicted_nonnull", c.n_predicted_nonnull},
                        {"n_correct_nonnull", c.n_correct_nonnull},
                        {"n_gold_nonnull", c.n_gold_nonnull},
                        {"n_recalled", c.n_recalled}};
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
    const auto& h = report.headline();
    ordered_json out = counts_json(report.counts);
    out["precision"] = h.precision;
    out["recall"] = h.recall;
    out["f1"] = h.f1;
    out["headline"] = "macro";
    out["macro"] = scores_json(report.macro);
    out["micro"] = scores_json(report.micro);
    ordered_json docs = ordered_json::array();
    for (const auto& d : report.documents) {
        auto entry = counts_json(d.counts);
        entry["document_id"] = d.document_id;
        entry["scores"] = scores_json(d.scores);
        docs.push_back(std::move(entry));
    }
    out["documents"] = std::move(docs);
    return out.dump(2, ' ', false) + "\n";
}

std::string report_table(const EvalReport& report) {
    auto row = [](const char* name, const Scores& s) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%-8s %8.2f%% %8.2f%% %8.2f%%\n", name, 100.0 * s.precision,
                      100.0 * s.recall, 100.0 * s.f1);
        return std::string(buf);
    };
    std::string out = "average         P         R        F1\n";
    out += row("macro", report.macro);
    out += row("micro", report.micro);
    return out;
}

}  // namespace kx::eval
