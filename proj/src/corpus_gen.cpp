#include "kx/corpus_gen.h"

#include "kx/error.h"
#include "kx/io.h"
#include "kx/random.h"
#include "kx/text.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

namespace kx::corpus {

namespace {

constexpr std::u32string_view kQuestionTemplate = U"为多少？";

constexpr std::u32string_view kAnswerTemplates[] = {
    U"{T}为{V}。",
    U"本合同{T}为{V}。",
    U"经双方约定，{T}为{V}。",
};

constexpr std::u32string_view kFillerSentences[] = {
    U"本条款适用于全部被保险人。",
    U"具体情形以保险单载明内容确定。",
    U"投保人应当如实告知有关情况。",
    U"我们将按照本合同约定承担责任。",
    U"上述内容自本合同生效之日起计算。",
    U"如有变更，应当及时书面通知我们。",
};

constexpr std::u32string_view kDistractorTemplates[] = {
    U"{F}相关事项以本公司规定执行。",
    U"关于{F}的说明详见附件。",
    U"涉及{F}的内容另行书面通知。",
};

constexpr std::u32string_view kSections[] = {U"基本信息", U"购买条件", U"保险责任"};

// Characters used by every fixed template above, kept out of the term pool
// so terms cannot collide with template text.
std::u32string template_chars() {
    std::u32string all(kQuestionTemplate);
    for (auto t : kAnswerTemplates) all += t;
    for (auto t : kFillerSentences) all += t;
    for (auto t : kDistractorTemplates) all += t;
    for (auto t : kSections) all += t;
    all += U"示例条款天年元周岁%0123456789#";
    return all;
}

const std::u32string& term_pool() {
    static const std::u32string pool = [] {
        constexpr std::u32string_view candidates =
            U"安宝报备边标表宾病补财参残产偿车程储处传存达代担道等递东度短额法返范防费分封风福付"
            U"复改概高告给更工共固故管广规国过海号和核红后户护花华划话环换患恢会婚获机基积"
            U"急疾集计技继家价监检减建健将奖交教接节结解借金进经境旧救居举据决卡开康考可客"
            U"空控口库类累理力利联粮良疗料列临领流龙率贸美门免面民名明模母目内能年农欧排"
            U"判培配批片平评期其起企气器迁签前强桥亲青情请区取全缺确群燃热人仁日荣融入"
            U"赛三森山商上设社身深审生师石时识实史使始士市事势视适收手首受书属术数双水税"
            U"顺思司私死四送诉素速算随孙损所他台太谈特提体天条调铁听停通统投突图土团推退"
            U"外完万网危微围维卫文稳问屋无五物西息席系细下先险现线乡相详享项消小效校协"
            U"新信星行形修需序选学寻询压严研验养样要业一医依移遗已义益意因银引应英营影"
            U"勇优邮油友有余鱼预域元原源远院愿月越云运灾在暂早责增展站张章招照者珍诊"
            U"征整正证政支知执直职值止指至制治质中终种重州周主住助注专转装状准资子自"
            U"综总族组祖最遵左作座";
        const auto excluded = template_chars();
        std::u32string out;
        std::unordered_set<char32_t> seen;
        for (char32_t c : candidates) {
            if (excluded.find(c) == std::u32string::npos && seen.insert(c).second) {
                out.push_back(c);
            }
        }
        return out;
    }();
    return pool;
}

std::u32string render(std::u32string_view tmpl, std::u32string_view key, std::u32string_view value) {
    std::u32string out(tmpl);
    const auto pos = out.find(key);
    if (pos != std::u32string::npos) {
        out.replace(pos, key.size(), value);
    }
    return out;
}

std::u32string ascii(std::string_view s) {
    return std::u32string(s.begin(), s.end());
}

std::string padded(std::string_view prefix, std::size_t n, std::size_t total) {
    const int width = std::max<int>(3, static_cast<int>(std::to_string(total).size()));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, n);
    return std::string(prefix) + buf;
}

std::vector<std::u32string> make_terms(std::size_t count, std::uint64_t seed) {
    const auto& pool = term_pool();
    random::KeyedStream rng = random::KeyedStream(seed).key("terms");
    std::set<std::pair<char32_t, char32_t>> used;
    std::vector<std::u32string> terms;
    std::size_t failures = 0;
    while (terms.size() < count) {
        std::u32string term;
        while (term.size() < 4) {
            const char32_t c = pool[rng.next_below(pool.size())];
            if (term.find(c) == std::u32string::npos) {
                term.push_back(c);
            }
        }
        bool fresh = true;
        for (std::size_t i = 0; i + 1 < term.size(); ++i) {
            fresh = fresh && !used.contains({term[i], term[i + 1]});
        }
        if (!fresh) {
            if (++failures > 100000) {
                throw TemplateExhaustion("could not build " + std::to_string(count) +
                                         " bigram-disjoint terms; built " + std::to_string(terms.size()));
            }
            continue;
        }
        for (std::size_t i = 0; i + 1 < term.size(); ++i) {
            used.insert({term[i], term[i + 1]});
        }
        terms.push_back(std::move(term));
    }
    return terms;
}

std::u32string render_value(std::size_t kind, random::KeyedStream& rng) {
    switch (kind % 5) {
        case 0: return ascii(std::to_string(10 + rng.next_below(356))) + U"天";
        case 1: return ascii(std::to_string(1 + rng.next_below(30))) + U"年";
        case 2: return ascii(std::to_string(1000 * (1 + rng.next_below(999)))) + U"元";
        case 3: return ascii(std::to_string(rng.next_below(81))) + U"周岁";
        default: return ascii(std::to_string(1 + rng.next_below(100))) + U"%";
    }
}

struct GeneratedDocument {
    dataset::Document document;
    std::vector<dataset::Annotation> annotations;
};

GeneratedDocument generate_document(const CorpusSpec& spec, const std::string& doc_id, std::size_t ordinal,
                                    const dataset::Catalog& catalog, const std::vector<std::u32string>& terms) {
    random::KeyedStream rng = random::KeyedStream(spec.seed).key("document").key(doc_id);
    const double p_kp = static_cast<double>(spec.avg_kps_per_doc) / static_cast<double>(spec.catalog_size);

    std::vector<std::size_t> chosen;
    for (std::size_t k = 0; k < catalog.size(); ++k) {
        if (random::KeyedStream(spec.seed).key("kp").key(doc_id).key(k).bernoulli(p_kp)) {
            chosen.push_back(k);
        }
    }
    if (chosen.empty()) {
        chosen.push_back(rng.next_below(catalog.size()));
    }

    GeneratedDocument out;
    out.document.document_id = doc_id;

    std::vector<std::u32string> paragraphs;
    std::set<std::u32string> values;
    for (std::size_t k : chosen) {
        std::u32string value;
        do {
            value = render_value(k, rng);
        } while (!values.insert(value).second);
        const auto tmpl = kAnswerTemplates[rng.next_below(std::size(kAnswerTemplates))];
        const auto sentence = render(render(tmpl, U"{T}", terms[k]), U"{V}", value);

        std::u32string paragraph;
        if (rng.bernoulli(0.5)) {
            paragraph += kFillerSentences[rng.next_below(std::size(kFillerSentences))];
        }
        paragraph += sentence;
        if (rng.bernoulli(0.5)) {
            paragraph += kFillerSentences[rng.next_below(std::size(kFillerSentences))];
        }
        paragraphs.push_back(std::move(paragraph));
        out.annotations.push_back({doc_id, catalog[k].kp_id, text::encode_utf8(sentence)});
    }

    const double expected = spec.distractor_density * static_cast<double>(chosen.size());
    auto n_distractors = static_cast<std::size_t>(std::floor(expected));
    if (rng.bernoulli(expected - std::floor(expected))) {
        ++n_distractors;
    }
    for (std::size_t d = 0; d < n_distractors; ++d) {
        const auto& term = terms[rng.next_below(terms.size())];
        const auto offset = rng.next_below(3);
        const auto fragment = term.substr(offset, 2);
        std::u32string paragraph(kFillerSentences[rng.next_below(std::size(kFillerSentences))]);
        paragraph += render(kDistractorTemplates[rng.next_below(std::size(kDistractorTemplates))], U"{F}", fragment);
        paragraphs.push_back(std::move(paragraph));
    }

    // Fisher-Yates with the keyed stream.
    for (std::size_t i = paragraphs.size(); i > 1; --i) {
        std::swap(paragraphs[i - 1], paragraphs[rng.next_below(i)]);
    }

    std::u32string body = U"# 示例条款" + ascii(std::to_string(ordinal)) + U"\n\n";
    const std::size_t per_section = (paragraphs.size() + std::size(kSections) - 1) / std::size(kSections);
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
        if (i % per_section == 0) {
            body += U"## ";
            body += kSections[i / per_section];
            body += U"\n\n";
        }
        body += paragraphs[i];
        body += U"\n\n";
    }
    out.document.text = text::encode_utf8(body);

    std::sort(out.annotations.begin(), out.annotations.end(),
              [](const auto& a, const auto& b) { return a.kp_id < b.kp_id; });
    return out;
}

}  // namespace

void validate(const CorpusSpec& spec) {
    if (spec.n_train_docs < 1 || spec.n_test_docs < 1 || spec.catalog_size < 1 || spec.avg_kps_per_doc < 1) {
        throw InvalidInput("corpus spec: all counts must be at least 1");
    }
    if (spec.avg_kps_per_doc > spec.catalog_size) {
        throw InvalidInput("corpus spec: avg_kps_per_doc exceeds catalog_size");
    }
    if (!(spec.distractor_density >= 0.0) || !std::isfinite(spec.distractor_density)) {
        throw InvalidInput("corpus spec: distractor_density must be a finite value >= 0");
    }
}

CorpusSpec parse_spec(std::string_view text) {
    CorpusSpec spec;
    try {
        const auto j = nlohmann::json::parse(text);
        spec.n_train_docs = j.value("n_train_docs", spec.n_train_docs);
        spec.n_test_docs = j.value("n_test_docs", spec.n_test_docs);
        spec.catalog_size = j.value("catalog_size", spec.catalog_size);
        spec.avg_kps_per_doc = j.value("avg_kps_per_doc", spec.avg_kps_per_doc);
        spec.seed = j.value("seed", spec.seed);
        spec.distractor_density = j.value("distractor_density", spec.distractor_density);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("corpus spec: ") + e.what());
    }
    validate(spec);
    return spec;
}

std::vector<dataset::Document> Corpus::all_documents() const {
    auto out = train_documents;
    out.insert(out.end(), test_documents.begin(), test_documents.end());
    return out;
}

std::vector<dataset::Annotation> Corpus::all_annotations() const {
    auto out = train_annotations;
    out.insert(out.end(), test_annotations.begin(), test_annotations.end());
    return out;
}

std::size_t term_capacity() {
    const auto n = term_pool().size();
    return n * (n - 1) / 3;
}

Corpus generate_corpus(const CorpusSpec& spec) {
    validate(spec);
    if (spec.catalog_size > term_capacity()) {
        throw TemplateExhaustion("catalog_size " + std::to_string(spec.catalog_size) + " exceeds term capacity " +
                                 std::to_string(term_capacity()));
    }
    Corpus corpus;
    corpus.spec = spec;
    const auto terms = make_terms(spec.catalog_size, spec.seed);
    for (std::size_t k = 0; k < spec.catalog_size; ++k) {
        corpus.catalog.push_back(
            {padded("kp", k + 1, spec.catalog_size), text::encode_utf8(terms[k] + std::u32string(kQuestionTemplate))});
    }

    const std::size_t total = spec.n_train_docs + spec.n_test_docs;
    for (std::size_t i = 0; i < total; ++i) {
        const bool train = i < spec.n_train_docs;
        const auto id = train ? padded("train_", i + 1, total) : padded("test_", i - spec.n_train_docs + 1, total);
        auto generated = generate_document(spec, id, i + 1, corpus.catalog, terms);
        auto& docs = train ? corpus.train_documents : corpus.test_documents;
        auto& anns = train ? corpus.train_annotations : corpus.test_annotations;
        docs.push_back(std::move(generated.document));
        anns.insert(anns.end(), generated.annotations.begin(), generated.annotations.end());
    }
    return corpus;
}

std::string manifest_json(const Corpus& corpus) {
    nlohmann::ordered_json spec{{"n_train_docs", corpus.spec.n_train_docs},
                                {"n_test_docs", corpus.spec.n_test_docs},
                                {"catalog_size", corpus.spec.catalog_size},
                                {"avg_kps_per_doc", corpus.spec.avg_kps_per_doc},
                                {"seed", corpus.spec.seed},
                                {"distractor_density", corpus.spec.distractor_density}};
    auto ids = [](const std::vector<dataset::Document>& docs) {
        nlohmann::ordered_json out = nlohmann::ordered_json::array();
        for (const auto& d : docs) out.push_back(d.document_id);
        return out;
    };
    nlohmann::ordered_json out{{"spec", std::move(spec)},
                               {"n_documents", corpus.train_documents.size() + corpus.test_documents.size()},
                               {"catalog_size", corpus.catalog.size()},
                               {"n_annotations_train", corpus.train_annotations.size()},
                               {"n_annotations_test", corpus.test_annotations.size()},
                               {"n_annotations", corpus.train_annotations.size() + corpus.test_annotations.size()},
                               {"train_documents", ids(corpus.train_documents)},
                               {"test_documents", ids(corpus.test_documents)}};
    return out.dump(2, ' ', false) + "\n";
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    for (const auto& d : corpus.train_documents) {
        io::write_file(dir / "docs" / "train" / (d.document_id + ".md"), d.text);
    }
    for (const auto& d : corpus.test_documents) {
        io::write_file(dir / "docs" / "test" / (d.document_id + ".md"), d.text);
    }
    io::write_file(dir / "catalog.json", io::catalog_to_json(corpus.catalog));
    io::write_file(dir / "annotations_train.json", io::annotations_to_json(corpus.train_annotations));
    io::write_file(dir / "annotations_test.json", io::annotations_to_json(corpus.test_annotations));
    io::write_file(dir / "manifest.json", manifest_json(corpus));
}

}  // namespace kx::corpus
