#include "kx/cli.h"

#include "kx/chunker.h"
#include "kx/corpus_gen.h"
#include "kx/dataset.h"
#include "kx/doc_model.h"
#include "kx/error.h"
#include "kx/evaluator.h"
#include "kx/external_reader.h"
#include "kx/extractor.h"
#include "kx/io.h"
#include "kx/protocol.h"
#include "kx/reader.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace kx::cli {

namespace {

using nlohmann::ordered_json;

struct RunConfig {
    std::string input;
    std::string docs;
    std::string catalog;
    std::string annotations;
    std::string gold;
    std::string pred;
    std::string spec;
    std::string out;
    std::string split = "train";
    std::string format = "markdown";
    std::string regime = "segment";
    std::string reader;
    std::uint64_t seed = 0;
    std::size_t limit = chunker::kDefaultLimit;
    double p_absent = 0.10;
    double p_present_miss = 0.50;
    double tau = 0.0;
    std::size_t workers = 1;
    bool no_tree_contexts = false;
};

void emit(std::ostream& out, const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        out << contents;
    } else {
        io::write_file(path, contents);
    }
}

ordered_json node_json(const doc::Node& node) {
    ordered_json j{{"kind", node.is_leaf() ? "leaf" : "heading"}};
    if (!node.is_leaf()) {
        j["level"] = node.level;
    }
    j["text"] = node.text;
    j["offset"] = node.offset;
    if (!node.is_leaf()) {
        ordered_json children = ordered_json::array();
        for (const auto& c : node.children) {
            children.push_back(node_json(c));
        }
        j["children"] = std::move(children);
    }
    return j;
}

int cmd_parse(const RunConfig& cfg, std::ostream& out) {
    const auto text = io::read_file(cfg.input);
    const auto tree = doc::parse_document(text, doc::parse_format(cfg.format),
                                          std::filesystem::path(cfg.input).stem().string());
    const ordered_json j{{"source_id", tree.source_id},
                         {"synthetic_root", tree.synthetic_root},
                         {"root", node_json(tree.root)}};
    emit(out, cfg.out, j.dump(2, ' ', false) + "\n");
    return 0;
}

int cmd_chunk(const RunConfig& cfg, std::ostream& out) {
    const auto text = io::read_file(cfg.input);
    std::string lines;
    for (const auto& s : chunker::chunk(text, cfg.limit)) {
        lines += ordered_json{{"index", s.index}, {"start_offset", s.start_offset}, {"text", s.text}}.dump(-1, ' ', false);
        lines += '\n';
    }
    emit(out, cfg.out, lines);
    return 0;
}

int cmd_build_dataset(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto documents = io::read_documents(cfg.docs);
    const auto catalog = io::read_catalog(cfg.catalog);
    const auto annotations = io::read_annotations(cfg.annotations);
    const auto format = doc::parse_format(cfg.format);

    dataset::BuildResult result;
    if (cfg.regime == "tree") {
        result = dataset::build_tree_dataset(documents, catalog, annotations, format);
    } else if (cfg.regime == "segment") {
        const dataset::SamplingPolicy policy{cfg.p_absent, cfg.p_present_miss, cfg.seed};
        const dataset::BuildOptions options{format, cfg.limit, !cfg.no_tree_contexts};
        result = dataset::build_segment_dataset(documents, catalog, annotations, policy, options);
    } else {
        throw InvalidInput("unknown regime: " + cfg.regime);
    }
    for (const auto& w : result.warnings) {
        err << "warning: " << w << '\n';
    }
    if (cfg.out.empty() || cfg.out == "-") {
        out << dataset::to_squad_json(result.examples) << '\n';
    } else {
        dataset::write_squad_json(result.examples, cfg.split, cfg.out);
    }
    return 0;
}

// Hands out at most `size` readers, reusing them across documents.
class ReaderPool {
public:
    ReaderPool(std::string spec, std::size_t size, const dataset::Catalog& catalog)
        : spec_(std::move(spec)), readers_(std::max<std::size_t>(1, size)), catalog_(catalog) {
        if (spec_.starts_with("oracle:")) {
            for (auto& a : io::read_annotations(spec_.substr(7))) {
                gold_[a.document_id].push_back(std::move(a));
            }
            question_of_.reserve(catalog_.size());
            for (const auto& kp : catalog_) {
                question_of_.emplace(kp.kp_id, kp.question);
            }
        } else if (spec_ != "lexical" && !spec_.starts_with("external:") && !spec_.starts_with("socket:")) {
            throw InvalidInput("unknown reader: " + spec_ + " (expected lexical|oracle:FILE|external:CMD|socket:PATH)");
        }
    }

    extract::ReaderFactory factory_for(const std::string& document_id) {
        next_ = 0;
        if (spec_ == "lexical") {
            auto shared = std::make_shared<reader::LexicalReader>();
            return [shared] { return shared; };
        }
        if (spec_.starts_with("oracle:")) {
            std::unordered_map<std::string, std::string> gold;
            if (auto it = gold_.find(document_id); it != gold_.end()) {
                for (const auto& a : it->second) {
                    if (auto q = question_of_.find(a.kp_id); q != question_of_.end()) {
                        gold.emplace(q->second, a.answer_text);
                    }
                }
            }
            auto shared = std::make_shared<reader::OracleReader>(std::move(gold));
            return [shared] { return shared; };
        }
        return [this] {
            const std::size_t slot = next_.fetch_add(1) % readers_.size();
            std::lock_guard lock(mutex_);
            if (!readers_[slot]) {
                if (spec_.starts_with("external:")) {
                    readers_[slot] = reader::ExternalReader::spawn(spec_.substr(9));
                } else {
                    readers_[slot] = reader::ExternalReader::connect_unix(spec_.substr(7));
                }
            }
            return readers_[slot];
        };
    }

private:
    std::string spec_;
    std::vector<std::shared_ptr<reader::Reader>> readers_;
    const dataset::Catalog& catalog_;
    std::unordered_map<std::string, std::vector<dataset::Annotation>> gold_;
    std::unordered_map<std::string, std::string> question_of_;
    std::atomic<std::size_t> next_{0};
    std::mutex mutex_;
};

std::string reader_spec(const RunConfig& cfg) {
    if (!cfg.reader.empty()) {
        return cfg.reader;
    }
    if (const char* env = std::getenv(kReaderEnv); env != nullptr && *env != '\0') {
        return env;
    }
    return "lexical";
}

int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto documents = io::read_documents(cfg.docs);
    const auto catalog = io::read_catalog(cfg.catalog);
    ReaderPool pool(reader_spec(cfg), cfg.workers, catalog);
    const extract::Options options{cfg.limit, cfg.tau, std::max<std::size_t>(1, cfg.workers)};

    std::vector<extract::ExtractionResult> results;
    for (const auto& d : documents) {
        try {
            results.push_back(extract::extract(d.document_id, d.text, catalog, pool.factory_for(d.document_id), options));
        } catch (const extract::ExtractionAborted& e) {
            ordered_json completed = ordered_json::array();
            for (const auto& [kp_id, _] : e.partial().answers) {
                completed.push_back(kp_id);
            }
            err << ordered_json{{"error", e.name()},
                                {"message", e.what()},
                                {"document_id", d.document_id},
                                {"completed_kps", std::move(completed)},
                                {"partial", nlohmann::ordered_json::parse(extract::results_to_json({e.partial()}))}}
                       .dump(-1, ' ', false)
                << '\n';
            return 1;
        }
    }
    emit(out, cfg.out, extract::results_to_json(results));
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto results = extract::parse_results_json(io::read_file(cfg.pred));
    const auto gold = io::read_annotations(cfg.gold);
    const auto catalog = io::read_catalog(cfg.catalog);
    const auto report = eval::evaluate(results, gold, catalog);
    if (cfg.out.empty() || cfg.out == "-") {
        out << eval::report_to_json(report);
        err << eval::report_table(report);
    } else {
        io::write_file(cfg.out, eval::report_to_json(report));
        out << eval::report_table(report);
    }
    return 0;
}

int cmd_gen_corpus(const RunConfig& cfg, std::ostream& out) {
    auto spec = cfg.spec.empty() ? corpus::CorpusSpec{} : corpus::parse_spec(io::read_file(cfg.spec));
    if (cfg.out.empty()) {
        throw InvalidInput("gen-corpus needs --out DIR");
    }
    const auto generated = corpus::generate_corpus(spec);
    corpus::write_corpus(generated, cfg.out);
    out << corpus::manifest_json(generated);
    return 0;
}

int cmd_serve(const RunConfig& cfg, std::istream& in, std::ostream& out) {
    if (cfg.reader != "lexical" && !cfg.reader.empty()) {
        throw InvalidInput("serve supports only the lexical reader");
    }
    reader::LexicalReader lexical;
    protocol::serve(lexical, in, out);
    return 0;
}

// "--config FILE" becomes flags inserted right after the subcommand, so
// explicit flags given later on the command line take precedence.
std::vector<std::string> expand_config(std::span<const std::string> args) {
    std::vector<std::string> out(args.begin(), args.end());
    for (std::size_t i = 1; i < out.size(); ++i) {
        std::string path;
        std::size_t consumed = 0;
        if (out[i] == "--config" && i + 1 < out.size()) {
            path = out[i + 1];
            consumed = 2;
        } else if (out[i].starts_with("--config=")) {
            path = out[i].substr(9);
            consumed = 1;
        } else {
            continue;
        }
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i),
                  out.begin() + static_cast<std::ptrdiff_t>(i + consumed));
        nlohmann::json cfg;
        try {
            cfg = nlohmann::json::parse(io::read_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput("config " + path + ": " + e.what());
        }
        if (!cfg.is_object()) {
            throw InvalidInput("config " + path + ": expected a JSON object");
        }
        std::vector<std::string> flags;
        for (const auto& [key, value] : cfg.items()) {
            const std::string flag = "--" + key;
            if (value.is_boolean()) {
                if (value.get<bool>()) {
                    flags.push_back(flag);
                }
            } else if (value.is_string()) {
                flags.push_back(flag + "=" + value.get<std::string>());
            } else {
                flags.push_back(flag + "=" + value.dump());
            }
        }
        const std::ptrdiff_t at = out.size() > 1 ? 2 : 1;
        out.insert(out.begin() + at, flags.begin(), flags.end());
        break;
    }
    return out;
}

void error_json(std::ostream& err, const std::string& name, const std::string& message) {
    err << ordered_json{{"error", name}, {"message", message}}.dump(-1, ' ', false) << '\n';
}

}  // namespace

int run(std::span<const std::string> raw_args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Knowledge-point extraction toolkit", "kx"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    auto sub = [&](const char* name, const char* description) {
        auto* s = app.add_subcommand(name, description);
        s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        return s;
    };
    auto add_format = [&](CLI::App* s) {
        s->add_option("--format", cfg.format, "Heading convention")
            ->check(CLI::IsMember({"markdown", "markdown-headings", "plain"}));
    };

    auto* parse = sub("parse", "Parse a document into its heading tree (JSON)");
    parse->add_option("input", cfg.input, "Document file")->required();
    add_format(parse);
    parse->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* chunk = sub("chunk", "Split a document into segments (JSON lines)");
    chunk->add_option("input", cfg.input, "Text file")->required();
    chunk->add_option("--limit", cfg.limit, "Segment length limit in characters")->check(CLI::PositiveNumber);
    chunk->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* build = sub("build-dataset", "Build a SQuAD v2 training set");
    build->add_option("--docs", cfg.docs, "Document file or directory")->required();
    build->add_option("--catalog", cfg.catalog, "Catalog JSON")->required();
    build->add_option("--annotations", cfg.annotations, "Annotation JSON")->required();
    build->add_option("--regime", cfg.regime, "tree or segment")->check(CLI::IsMember({"tree", "segment"}));
    build->add_option("--seed", cfg.seed, "Sampling seed");
    build->add_option("--limit", cfg.limit, "Segment length limit")->check(CLI::PositiveNumber);
    build->add_option("--p-absent", cfg.p_absent, "Negative rate when the document lacks the knowledge point")
        ->check(CLI::Range(0.0, 1.0));
    build->add_option("--p-present-miss", cfg.p_present_miss,
                      "Negative rate for segments missing an annotated answer")
        ->check(CLI::Range(0.0, 1.0));
    build->add_flag("--no-tree-contexts", cfg.no_tree_contexts, "Drop tree-located examples (segment regime)");
    add_format(build);
    build->add_option("--split", cfg.split, "Split name, used when --out is a directory");
    build->add_option("--out", cfg.out, "Output file or directory (default stdout)");

    auto* extract_cmd = sub("extract", "Extract knowledge points from documents");
    extract_cmd->add_option("--docs", cfg.docs, "Document file or directory")->required();
    extract_cmd->add_option("--catalog", cfg.catalog, "Catalog JSON")->required();
    extract_cmd->add_option("--reader", cfg.reader,
                            std::string("lexical | oracle:FILE | external:CMD | socket:PATH (default $") +
                                kReaderEnv + " or lexical)");
    extract_cmd->add_option("--limit", cfg.limit, "Segment length limit")->check(CLI::PositiveNumber);
    extract_cmd->add_option("--tau", cfg.tau, "Null margin: keep spans with score - null_score > tau");
    extract_cmd->add_option("--workers", cfg.workers, "Parallel reader workers")->check(CLI::PositiveNumber);
    extract_cmd->add_option("--out", cfg.out, "Output file (default stdout)");

    auto* evaluate = sub("evaluate", "Score extraction results against gold annotations");
    evaluate->add_option("--pred", cfg.pred, "Extraction results JSON")->required();
    evaluate->add_option("--gold", cfg.gold, "Gold annotation JSON")->required();
    evaluate->add_option("--catalog", cfg.catalog, "Catalog JSON")->required();
    evaluate->add_option("--out", cfg.out, "Report file (default stdout)");

    auto* gen = sub("gen-corpus", "Generate a synthetic corpus");
    gen->add_option("--spec", cfg.spec, "Corpus spec JSON (defaults when omitted)");
    gen->add_option("--out", cfg.out, "Output directory")->required();

    auto* serve = sub("serve", "Serve the lexical reader over the JSON-lines protocol on stdio");
    serve->add_option("--reader", cfg.reader, "Reader to serve (lexical)");

    std::vector<std::string> args;
    try {
        args = expand_config(raw_args);
    } catch (const Error& e) {
        error_json(err, e.name(), e.what());
        return 2;
    }
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        if (!reversed.empty()) {
            reversed.pop_back();
        }
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (parse->parsed()) return cmd_parse(cfg, out);
        if (chunk->parsed()) return cmd_chunk(cfg, out);
        if (build->parsed()) return cmd_build_dataset(cfg, out, err);
        if (extract_cmd->parsed()) return cmd_extract(cfg, out, err);
        if (evaluate->parsed()) return cmd_evaluate(cfg, out, err);
        if (gen->parsed()) return cmd_gen_corpus(cfg, out);
        if (serve->parsed()) return cmd_serve(cfg, std::cin, out);
    } catch (const Error& e) {
        error_json(err, e.name(), e.what());
        return 1;
    } catch (const std::exception& e) {
        error_json(err, "InternalError", e.what());
        return 1;
    }
    return 2;
}

}  // namespace kx::cli
