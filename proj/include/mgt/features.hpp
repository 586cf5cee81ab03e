#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mgt/corpus.hpp"

namespace mgt::features {

/// Ordered term list with a term -> column bijection and per-term document frequency.
class Vocabulary {
public:
    Vocabulary() = default;
    Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq);

    std::size_t size() const noexcept { return terms_.size(); }
    const std::vector<std::string>& terms() const noexcept { return terms_; }
    const std::vector<std::size_t>& doc_freq() const noexcept { return doc_freq_; }

    /// Column of `term`, or -1 when out of vocabulary.
    std::ptrdiff_t column(std::string_view term) const;

private:
    std::vector<std::string> terms_;
    std::vector<std::size_t> doc_freq_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Documents x features. Row i belongs to ids[i].
struct FeatureMatrix {
    std::vector<std::string> ids;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd values;

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values.cols()); }
};

struct TfidfConfig {
    std::size_t min_df = 2;
    std::size_t max_features = 50000;
    bool l2_normalize = true;
};

/// tf = raw count, idf(t) = ln((1 + N) / (1 + df(t))) + 1.
struct TfidfModel {
    Vocabulary vocab;
    std::size_t n_docs_fit = 0;
    TfidfConfig config;
    std::vector<double> idf;
};

/// Document-level PPMI against the corpus term distribution frozen at fit.
struct PpmiModel {
    Vocabulary vocab;
    std::vector<double> term_prob;
    std::size_t total_count = 0;
};

/// Externally computed document embeddings keyed by id.
struct EmbeddingSet {
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> vectors;
};

using Featurizer = std::variant<TfidfModel, PpmiModel, EmbeddingSet>;

/// Vocabulary is every token with doc_freq >= min_df, truncated to max_features
/// by descending doc_freq (ties lexicographic); columns are in lexicographic order.
TfidfModel fit_tfidf(const corpus::Corpus& corpus, const TfidfConfig& config = {});
Eigen::VectorXd transform_tfidf(const TfidfModel& model, std::string_view text);

PpmiModel fit_ppmi(const corpus::Corpus& corpus);
/// Component t is max(0, ln(p(t|doc) / term_prob(t))) with p(t|doc) taken over
/// in-vocabulary tokens only.
Eigen::VectorXd transform_ppmi(const PpmiModel& model, std::string_view text);

/// JSONL lines {"id": ..., "vector": [...]}; a leading {"_meta": ...} line is skipped.
EmbeddingSet read_embeddings(std::istream& in);
EmbeddingSet load_embeddings(const std::filesystem::path& path);
/// Union of several embedding files; ids must not repeat across files.
EmbeddingSet load_embeddings(const std::vector<std::filesystem::path>& paths);

std::size_t feature_dim(const Featurizer& featurizer);

/// Row i is the transform of corpus document i. `jobs` > 1 splits rows across threads.
FeatureMatrix featurize(const corpus::Corpus& corpus, const Featurizer& featurizer, unsigned jobs = 1);

nlohmann::json to_json(const TfidfModel& model);
nlohmann::json to_json(const PpmiModel& model);
TfidfModel tfidf_from_json(const nlohmann::json& j);
PpmiModel ppmi_from_json(const nlohmann::json& j);

}  // namespace mgt::features
