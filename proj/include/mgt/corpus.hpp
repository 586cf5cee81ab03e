#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mgt/text.hpp"

namespace mgt::corpus {

/// binary: {0,1}; multiway6: {0..5} (0 human, 1 chatGPT, 2 cohere, 3 davinci,
/// 4 bloomz, 5 dolly); boundary: word index in [0, word_count(text)].
enum class LabelScheme { binary, multiway6, boundary };

LabelScheme parse_label_scheme(std::string_view name);
std::string_view to_string(LabelScheme scheme);

/// Number of classes for a classification scheme; 0 for boundary.
int class_count(LabelScheme scheme);

struct Document {
    std::string id;
    std::string text;
    std::optional<std::int64_t> label;
    std::optional<std::string> source;
    std::optional<std::string> generator;
};

/// Immutable, ordered collection of documents conforming to one label scheme.
class Corpus {
public:
    Corpus() = default;

    /// Throws ParseError on duplicate or empty ids and on labels outside the scheme.
    Corpus(LabelScheme scheme, std::vector<Document> documents);

    LabelScheme scheme() const noexcept { return scheme_; }
    std::size_t size() const noexcept { return documents_.size(); }
    bool empty() const noexcept { return documents_.empty(); }

    const Document& operator[](std::size_t i) const { return documents_[i]; }
    const std::vector<Document>& documents() const noexcept { return documents_; }
    auto begin() const noexcept { return documents_.begin(); }
    auto end() const noexcept { return documents_.end(); }

    std::optional<std::size_t> position(std::string_view id) const;
    std::vector<std::string> ids() const;

    /// Gold labels in document order; throws if any document is unlabeled.
    std::vector<std::int64_t> labels() const;

private:
    LabelScheme scheme_ = LabelScheme::binary;
    std::vector<Document> documents_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Validates one label against the scheme; returns an error message or nullopt.
std::optional<std::string> check_label(LabelScheme scheme, std::int64_t label, std::string_view text);

/// One JSON object per line with "id" (string or integer), "text" and optional
/// "label", "source" and "model" (mapped to generator). Blank lines are skipped.
Corpus read_jsonl(std::istream& in, LabelScheme scheme);
Corpus load_jsonl(const std::filesystem::path& path, LabelScheme scheme);

void write_jsonl(const Corpus& corpus, std::ostream& out);
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// Same corpus with every text passed through clean_text.
Corpus clean(const Corpus& corpus, CleanMode mode);

}  // namespace mgt::corpus
