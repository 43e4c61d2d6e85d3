#include "kx/dataset.h"

#include "kx/error.h"
#include "kx/random.h"
#include "kx/text.h"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace kx::dataset {

void validate_catalog(const Catalog& catalog) {
    std::set<std::string_view> seen;
    for (const auto& kp : catalog) {
        if (kp.kp_id.empty()) {
            throw InvalidInput("catalog: empty kp_id");
        }
        if (text::trim(kp.question).empty()) {
            throw InvalidInput("catalog: empty question for " + kp.kp_id);
        }
        if (!seen.insert(kp.kp_id).second) {
            throw InvalidInput("catalog: duplicate kp_id " + kp.kp_id);
        }
    }
}

void validate_example(const QAExample& ex) {
    const bool empty_answer = ex.answer_text.empty();
    if (ex.is_impossible != empty_answer || empty_answer != !ex.answer_start.has_value()) {
        throw InvalidInput("example " + ex.example_id + ": is_impossible, answer_text and answer_start disagree");
    }
    if (ex.is_impossible) {
        return;
    }
    const auto context = text::decode_utf8(ex.context);
    const auto answer = text::decode_utf8(ex.answer_text);
    const auto start = *ex.answer_start;
    if (start + answer.size() > context.size() ||
        std::u32string_view(context).substr(start, answer.size()) != answer) {
        throw InvalidInput("example " + ex.example_id + ": answer does not re-slice from context");
    }
}

bool sample_negative(std::uint64_t seed, std::string_view document_id, std::string_view kp_id,
                     std::size_t segment_index, double p) {
    return random::KeyedStream(seed).key(document_id).key(kp_id).key(segment_index).bernoulli(p);
}

namespace {

using AnnotationIndex = std::map<std::pair<std::string, std::string>, const Annotation*>;

AnnotationIndex index_annotations(const std::vector<Document>& documents, const Catalog& catalog,
                                  const std::vector<Annotation>& annotations) {
    validate_catalog(catalog);
    std::set<std::string_view> kp_ids;
    for (const auto& kp : catalog) {
        kp_ids.insert(kp.kp_id);
    }
    std::set<std::string_view> doc_ids;
    for (const auto& d : documents) {
        doc_ids.insert(d.document_id);
    }
    AnnotationIndex index;
    for (const auto& a : annotations) {
        if (!kp_ids.contains(a.kp_id)) {
            throw UnknownKnowledgePoint(a.kp_id);
        }
        if (!doc_ids.contains(a.document_id)) {
            throw UnknownDocument(a.document_id);
        }
        if (a.answer_text.empty()) {
            throw InvalidInput("annotation " + a.document_id + "/" + a.kp_id + " has an empty answer");
        }
        if (!index.emplace(std::pair{a.document_id, a.kp_id}, &a).second) {
            throw InvalidInput("duplicate annotation " + a.document_id + "/" + a.kp_id);
        }
    }
    return index;
}

std::vector<const Document*> sorted_documents(const std::vector<Document>& documents) {
    std::vector<const Document*> out;
    for (const auto& d : documents) {
        out.push_back(&d);
    }
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->document_id < b->document_id; });
    return out;
}

std::vector<const KnowledgePoint*> sorted_catalog(const Catalog& catalog) {
    std::vector<const KnowledgePoint*> out;
    for (const auto& kp : catalog) {
        out.push_back(&kp);
    }
    std::sort(out.begin(), out.end(), [](auto* a, auto* b) { return a->kp_id < b->kp_id; });
    return out;
}

// Positive example whose answer_text is the context's own slice at the
// first normalized match; nullopt when the answer is absent.
std::optional<QAExample> make_positive(std::string example_id, const std::string& document_id,
                                       const std::string& question, const std::u32string& context,
                                       const text::Normalized& normalized_context,
                                       const std::u32string& answer_nfkc) {
    const auto span = text::find_normalized(normalized_context, answer_nfkc);
    if (!span) {
        return std::nullopt;
    }
    const std::u32string_view ctx(context);
    return QAExample{std::move(example_id),
                     document_id,
                     question,
                     text::encode_utf8(ctx),
                     text::encode_utf8(ctx.substr(span->start, span->end - span->start)),
                     span->start,
                     false};
}

std::string example_id(std::string_view doc, std::string_view kp, std::string_view suffix) {
    std::string id;
    id.reserve(doc.size() + kp.size() + suffix.size() + 2);
    id.append(doc).append(":").append(kp).append(":").append(suffix);
    return id;
}

// Tree examples keyed by (document_id, kp_id).
std::map<std::pair<std::string, std::string>, QAExample> tree_examples(
    const std::vector<const Document*>& docs, const std::vector<const KnowledgePoint*>& kps,
    const AnnotationIndex& index, doc::Format format, std::vector<std::string>& warnings) {
    std::map<std::pair<std::string, std::string>, QAExample> out;
    for (const auto* document : docs) {
        const auto tree = doc::parse_document(document->text, format, document->document_id);
        for (const auto* kp : kps) {
            const auto it = index.find({document->document_id, kp->kp_id});
            if (it == index.end()) {
                continue;
            }
            const auto& answer = it->second->answer_text;
            const auto leaf = doc::locate_answer_context(tree, answer, &warnings);
            if (!leaf) {
                warnings.push_back("answer for " + document->document_id + "/" + kp->kp_id +
                                   " not found in any leaf; skipped");
                continue;
            }
            const auto context = text::decode_utf8(leaf->leaf_text);
            auto example = make_positive(example_id(document->document_id, kp->kp_id, "tree"),
                                         document->document_id, kp->question, context,
                                         text::normalize(context), text::nfkc(text::decode_utf8(answer)));
            out.emplace(std::pair{document->document_id, kp->kp_id}, std::move(*example));
        }
    }
    return out;
}

}  // namespace

BuildResult build_tree_dataset(const std::vector<Document>& documents, const Catalog& catalog,
                               const std::vector<Annotation>& annotations, doc::Format format) {
    const auto index = index_annotations(documents, catalog, annotations);
    BuildResult result;
    auto examples = tree_examples(sorted_documents(documents), sorted_catalog(catalog), index, format,
                                  result.warnings);
    for (auto& [key, example] : examples) {
        result.examples.push_back(std::move(example));
    }
    return result;
}

BuildResult build_segment_dataset(const std::vector<Document>& documents, const Catalog& catalog,
                                  const std::vector<Annotation>& annotations, const SamplingPolicy& policy,
                                  const BuildOptions& options) {
    if (policy.p_absent < 0.0 || policy.p_absent > 1.0 || policy.p_present_miss < 0.0 ||
        policy.p_present_miss > 1.0) {
        throw InvalidInput("sampling probabilities must lie in [0, 1]");
    }
    const auto index = index_annotations(documents, catalog, annotations);
    const auto docs = sorted_documents(documents);
    const auto kps = sorted_catalog(catalog);

    BuildResult result;
    std::map<std::pair<std::string, std::string>, QAExample> tree;
    if (options.include_tree_contexts) {
        tree = tree_examples(docs, kps, index, options.format, result.warnings);
    }

    auto& stats = result.stats;
    for (const auto* document : docs) {
        const auto& doc_id = document->document_id;
        const auto segments = chunker::chunk(document->text, options.limit);
        std::vector<std::u32string> contexts;
        std::vector<text::Normalized> normalized;
        for (const auto& s : segments) {
            contexts.push_back(text::decode_utf8(s.text));
            normalized.push_back(text::normalize(contexts.back()));
        }

        for (const auto* kp : kps) {
            if (auto it = tree.find({doc_id, kp->kp_id}); it != tree.end()) {
                result.examples.push_back(std::move(it->second));
            }
            const auto ann = index.find({doc_id, kp->kp_id});
            const bool annotated = ann != index.end();
            const auto answer_nfkc =
                annotated ? text::nfkc(text::decode_utf8(ann->second->answer_text)) : std::u32string();

            for (std::size_t k = 0; k < segments.size(); ++k) {
                const auto& seg = segments[k];
                auto id = example_id(doc_id, kp->kp_id, "seg" + std::to_string(seg.index));
                if (annotated) {
                    if (auto pos = make_positive(std::move(id), doc_id, kp->question, contexts[k], normalized[k],
                                                 answer_nfkc)) {
                        result.examples.push_back(std::move(*pos));
                        ++stats.positives;
                        continue;
                    }
                    id = example_id(doc_id, kp->kp_id, "seg" + std::to_string(seg.index));
                }
                const double p = annotated ? policy.p_present_miss : policy.p_absent;
                const bool include = sample_negative(policy.seed, doc_id, kp->kp_id, seg.index, p);
                if (annotated) {
                    ++stats.present_eligible;
                    stats.present_included += include ? 1 : 0;
                } else {
                    ++stats.absent_eligible;
                    stats.absent_included += include ? 1 : 0;
                }
                if (include) {
                    result.examples.push_back(
                        QAExample{std::move(id), doc_id, kp->question, seg.text, std::string(), std::nullopt, true});
                }
            }
        }
    }
    return result;
}

}  // namespace kx::dataset
