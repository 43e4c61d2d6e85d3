#include "kx/dataset.h"
#include "kx/error.h"
#include "kx/io.h"

#include <json.hpp>

namespace kx::dataset {

using nlohmann::ordered_json;

std::string to_squad_json(const std::vector<QAExample>& examples) {
    ordered_json data = ordered_json::array();
    const std::string* current_doc = nullptr;
    const std::string* current_context = nullptr;
    for (const auto& ex : examples) {
        validate_example(ex);
        if (current_doc == nullptr || *current_doc != ex.document_id) {
            data.push_back(ordered_json{{"title", ex.document_id}, {"paragraphs", ordered_json::array()}});
            current_doc = &ex.document_id;
            current_context = nullptr;
        }
        auto& paragraphs = data.back()["paragraphs"];
        if (current_context == nullptr || *current_context != ex.context) {
            paragraphs.push_back(ordered_json{{"context", ex.context}, {"qas", ordered_json::array()}});
            current_context = &ex.context;
        }
        ordered_json answers = ordered_json::array();
        if (!ex.is_impossible) {
            answers.push_back(ordered_json{{"text", ex.answer_text}, {"answer_start", *ex.answer_start}});
        }
        paragraphs.back()["qas"].push_back(ordered_json{{"id", ex.example_id},
                                                        {"question", ex.question},
                                                        {"is_impossible", ex.is_impossible},
                                                        {"answers", std::move(answers)}});
    }
    const ordered_json root{{"version", "v2.0"}, {"data", std::move(data)}};
    return root.dump(-1, ' ', false);
}

std::vector<QAExample> parse_squad_json(std::string_view json_text) {
    ordered_json root;
    try {
        root = ordered_json::parse(json_text);
    } catch (const ordered_json::exception& e) {
        throw InvalidInput(std::string("squad json: ") + e.what());
    }
    std::vector<QAExample> out;
    try {
        for (const auto& entry : root.at("data")) {
            const auto title = entry.at("title").get<std::string>();
            for (const auto& para : entry.at("paragraphs")) {
                const auto context = para.at("context").get<std::string>();
                for (const auto& qa : para.at("qas")) {
                    QAExample ex;
                    ex.example_id = qa.at("id").get<std::string>();
                    ex.document_id = title;
                    ex.question = qa.at("question").get<std::string>();
                    ex.context = context;
                    ex.is_impossible = qa.at("is_impossible").get<bool>();
                    const auto& answers = qa.at("answers");
                    if (!answers.empty()) {
                        ex.answer_text = answers.at(0).at("text").get<std::string>();
                        ex.answer_start = answers.at(0).at("answer_start").get<std::size_t>();
                    }
                    validate_example(ex);
                    out.push_back(std::move(ex));
                }
            }
        }
    } catch (const ordered_json::exception& e) {
        throw InvalidInput(std::string("squad json: ") + e.what());
    }
    return out;
}

std::filesystem::path write_squad_json(const std::vector<QAExample>& examples, std::string_view split_name,
                                       const std::filesystem::path& path) {
    auto target = path;
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) {
        target = path / (std::string(split_name) + ".json");
    }
    io::write_file(target, to_squad_json(examples));
    return target;
}

std::vector<QAExample> read_squad_json(const std::filesystem::path& path) {
    return parse_squad_json(io::read_file(path));
}

}  // namespace kx::dataset
