#include "mgt/corpus.hpp"

#include <fstream>
#include <ostream>

#include "jsonl.hpp"
#include "mgt/error.hpp"

namespace mgt::corpus {

using nlohmann::json;

LabelScheme parse_label_scheme(std::string_view name) {
    if (name == "binary") return LabelScheme::binary;
    if (name == "multiway6" || name == "multiway") return LabelScheme::multiway6;
    if (name == "boundary") return LabelScheme::boundary;
    throw ConfigError("unknown label scheme '" + std::string(name) + "'");
}

std::string_view to_string(LabelScheme scheme) {
    switch (scheme) {
        case LabelScheme::binary: return "binary";
        case LabelScheme::multiway6: return "multiway6";
        case LabelScheme::boundary: return "boundary";
    }
    return "binary";
}

int class_count(LabelScheme scheme) {
    switch (scheme) {
        case LabelScheme::binary: return 2;
        case LabelScheme::multiway6: return 6;
        case LabelScheme::boundary: return 0;
    }
    return 0;
}

std::optional<std::string> check_label(LabelScheme scheme, std::int64_t label, std::string_view text) {
    if (scheme == LabelScheme::boundary) {
        if (label < 0) return "label out of range: boundary index " + std::to_string(label) + " is negative";
        const auto words = word_count(text);
        if (static_cast<std::uint64_t>(label) > words) {
            return "label out of range: boundary index " + std::to_string(label) + " exceeds word count " +
                   std::to_string(words);
        }
        return std::nullopt;
    }
    if (label < 0 || label >= class_count(scheme)) {
        return "label out of range: " + std::to_string(label) + " not valid for scheme " +
               std::string(to_string(scheme));
    }
    return std::nullopt;
}

Corpus::Corpus(LabelScheme scheme, std::vector<Document> documents)
    : scheme_(scheme), documents_(std::move(documents)) {
    index_.reserve(documents_.size());
    for (std::size_t i = 0; i < documents_.size(); ++i) {
        const auto& doc = documents_[i];
        if (doc.id.empty()) throw ParseError("document " + std::to_string(i) + " has an empty id");
        if (!index_.emplace(doc.id, i).second) throw ParseError("duplicate id '" + doc.id + "'");
        if (doc.label) {
            if (auto err = check_label(scheme_, *doc.label, doc.text)) {
                throw ParseError(*err + " (id '" + doc.id + "')");
            }
        }
    }
}

std::optional<std::size_t> Corpus::position(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> Corpus::ids() const {
    std::vector<std::string> out;
    out.reserve(documents_.size());
    for (const auto& d : documents_) out.push_back(d.id);
    return out;
}

std::vector<std::int64_t> Corpus::labels() const {
    std::vector<std::int64_t> out;
    out.reserve(documents_.size());
    for (const auto& d : documents_) {
        if (!d.label) throw ParseError("document '" + d.id + "' has no gold label");
        out.push_back(*d.label);
    }
    return out;
}

Corpus read_jsonl(std::istream& in, LabelScheme scheme) {
    std::vector<Document> docs;
    std::unordered_map<std::string, std::size_t> seen;
    detail::for_each_json_line(in, [&](const json& obj, std::size_t lineno) {
        Document doc;
        doc.id = detail::read_id(obj, lineno);
        if (doc.id.empty()) throw ParseError("empty \"id\"", lineno);
        const auto text = obj.find("text");
        if (text == obj.end() || !text->is_string()) throw ParseError("missing string \"text\"", lineno);
        doc.text = text->get<std::string>();

        if (const auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
            if (!it->is_number_integer()) throw ParseError("\"label\" must be an integer", lineno);
            doc.label = it->get<std::int64_t>();
            if (auto err = check_label(scheme, *doc.label, doc.text)) throw ParseError(*err, lineno);
        }
        if (const auto it = obj.find("source"); it != obj.end() && it->is_string()) doc.source = it->get<std::string>();
        if (const auto it = obj.find("model"); it != obj.end() && it->is_string()) doc.generator = it->get<std::string>();

        if (!seen.emplace(doc.id, lineno).second) throw ParseError("duplicate id '" + doc.id + "'", lineno);
        docs.push_back(std::move(doc));
    });
    return Corpus(scheme, std::move(docs));
}

Corpus load_jsonl(const std::filesystem::path& path, LabelScheme scheme) {
    auto in = detail::open_input(path);
    return read_jsonl(in, scheme);
}

void write_jsonl(const Corpus& corpus, std::ostream& out) {
    for (const auto& doc : corpus) {
        json obj;
        obj["id"] = doc.id;
        obj["text"] = doc.text;
        if (doc.label) obj["label"] = *doc.label;
        if (doc.source) obj["source"] = *doc.source;
        if (doc.generator) obj["model"] = *doc.generator;
        out << obj.dump() << '\n';
    }
}

void write_jsonl(const Corpus& corpus, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    write_jsonl(corpus, out);
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

Corpus clean(const Corpus& corpus, CleanMode mode) {
    std::vector<Document> docs = corpus.documents();
    for (auto& d : docs) d.text = clean_text(d.text, mode);
    return Corpus(corpus.scheme(), std::move(docs));
}

}  // namespace mgt::corpus
