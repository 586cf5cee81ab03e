#include "mgt/features.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>

#include "jsonl.hpp"
#include "mgt/error.hpp"
#include "parallel.hpp"

namespace mgt::features {

using nlohmann::json;

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)) {
    if (terms_.size() != doc_freq_.size()) throw Error("vocabulary: term/doc_freq length mismatch");
    index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (doc_freq_[i] == 0) throw Error("vocabulary: term '" + terms_[i] + "' has zero document frequency");
        if (!index_.emplace(terms_[i], i).second) throw Error("vocabulary: duplicate term '" + terms_[i] + "'");
    }
}

std::ptrdiff_t Vocabulary::column(std::string_view term) const {
    const auto it = index_.find(std::string(term));
    return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

namespace {

// Per-column counts of the in-vocabulary tokens of one text.
std::vector<std::pair<std::size_t, std::size_t>> count_columns(const Vocabulary& vocab, std::string_view text) {
    std::map<std::size_t, std::size_t> counts;
    for (const auto& tok : corpus::tokenize_words(text)) {
        const auto col = vocab.column(tok);
        if (col >= 0) ++counts[static_cast<std::size_t>(col)];
    }
    return {counts.begin(), counts.end()};
}

}  // namespace

TfidfModel fit_tfidf(const corpus::Corpus& corpus, const TfidfConfig& config) {
    if (corpus.empty()) throw Error("fit_tfidf: empty corpus");
    if (config.max_features == 0) throw ConfigError("fit_tfidf: max_features must be >= 1");

    std::unordered_map<std::string, std::size_t> df;
    for (const auto& doc : corpus) {
        auto tokens = corpus::tokenize_words(doc.text);
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (auto& t : tokens) ++df[std::move(t)];
    }

    std::vector<std::pair<std::string, std::size_t>> kept;
    for (auto& [term, count] : df) {
        if (count >= config.min_df) kept.emplace_back(term, count);
    }
    if (kept.empty()) throw Error("fit_tfidf: empty vocabulary after min_df filtering");

    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (kept.size() > config.max_features) kept.resize(config.max_features);
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<std::string> terms;
    std::vector<std::size_t> freqs;
    terms.reserve(kept.size());
    freqs.reserve(kept.size());
    for (auto& [term, count] : kept) {
        terms.push_back(std::move(term));
        freqs.push_back(count);
    }

    TfidfModel model;
    model.vocab = Vocabulary(std::move(terms), std::move(freqs));
    model.n_docs_fit = corpus.size();
    model.config = config;
    model.idf.reserve(model.vocab.size());
    const double n = static_cast<double>(model.n_docs_fit);
    for (auto f : model.vocab.doc_freq()) {
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(f))) + 1.0);
    }
    return model;
}

Eigen::VectorXd transform_tfidf(const TfidfModel& model, std::string_view text) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.vocab.size()));
    for (const auto& [col, count] : count_columns(model.vocab, text)) {
        v[static_cast<Eigen::Index>(col)] = static_cast<double>(count) * model.idf[col];
    }
    if (model.config.l2_normalize) {
        const double norm = v.norm();
        if (norm > 0.0) v /= norm;
    }
    return v;
}

PpmiModel fit_ppmi(const corpus::Corpus& corpus) {
    if (corpus.empty()) throw Error("fit_ppmi: empty corpus");

    std::map<std::string, std::pair<std::size_t, std::size_t>> stats;  // term -> (count, doc_freq)
    std::size_t total = 0;
    for (const auto& doc : corpus) {
        auto tokens = corpus::tokenize_words(doc.text);
        total += tokens.size();
        for (const auto& t : tokens) ++stats[t].first;
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        for (const auto& t : tokens) ++stats[t].second;
    }
    if (total == 0) throw Error("fit_ppmi: corpus has no tokens");

    std::vector<std::string> terms;
    std::vector<std::size_t> freqs;
    PpmiModel model;
    model.total_count = total;
    for (const auto& [term, s] : stats) {
        terms.push_back(term);
        freqs.push_back(s.second);
        model.term_prob.push_back(static_cast<double>(s.first) / static_cast<double>(total));
    }
    model.vocab = Vocabulary(std::move(terms), std::move(freqs));
    return model;
}

Eigen::VectorXd transform_ppmi(const PpmiModel& model, std::string_view text) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.vocab.size()));
    const auto counts = count_columns(model.vocab, text);
    std::size_t length = 0;
    for (const auto& [col, count] : counts) length += count;
    if (length == 0) return v;
    for (const auto& [col, count] : counts) {
        const double p_doc = static_cast<double>(count) / static_cast<double>(length);
        v[static_cast<Eigen::Index>(col)] = std::max(0.0, std::log(p_doc / model.term_prob[col]));
    }
    return v;
}

EmbeddingSet read_embeddings(std::istream& in) {
    EmbeddingSet set;
    bool first = true;
    detail::for_each_json_line(in, [&](const json& obj, std::size_t lineno) {
        const bool header = first && obj.contains("_meta");
        first = false;
        if (header) return;
        auto id = detail::read_id(obj, lineno);
        const auto it = obj.find("vector");
        if (it == obj.end() || !it->is_array()) throw ParseError("missing array \"vector\"", lineno);
        std::vector<double> vec;
        vec.reserve(it->size());
        for (const auto& x : *it) {
            if (!x.is_number()) throw ParseError("non-numeric vector component", lineno);
            const double d = x.get<double>();
            if (!std::isfinite(d)) throw ParseError("non-finite vector component", lineno);
            vec.push_back(d);
        }
        if (vec.empty()) throw ParseError("empty vector", lineno);
        if (set.vectors.empty()) {
            set.dim = vec.size();
        } else if (vec.size() != set.dim) {
            throw ParseError("dimension mismatch: expected " + std::to_string(set.dim) + ", got " +
                                 std::to_string(vec.size()),
                             lineno);
        }
        if (!set.vectors.emplace(id, std::move(vec)).second) throw ParseError("duplicate id '" + id + "'", lineno);
    });
    return set;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return read_embeddings(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

EmbeddingSet load_embeddings(const std::vector<std::filesystem::path>& paths) {
    EmbeddingSet merged;
    for (const auto& p : paths) {
        auto part = load_embeddings(p);
        if (part.vectors.empty()) continue;
        if (!merged.vectors.empty() && part.dim != merged.dim) {
            throw ParseError("dimension mismatch between embedding files (" + p.string() + ")");
        }
        merged.dim = part.dim;
        for (auto& [id, vec] : part.vectors) {
            if (!merged.vectors.emplace(id, std::move(vec)).second) {
                throw ParseError("duplicate id '" + id + "' across embedding files");
            }
        }
    }
    return merged;
}

std::size_t feature_dim(const Featurizer& featurizer) {
    return std::visit(
        [](const auto& f) -> std::size_t {
            using T = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<T, EmbeddingSet>) {
                return f.dim;
            } else {
                return f.vocab.size();
            }
        },
        featurizer);
}

FeatureMatrix featurize(const corpus::Corpus& corpus, const Featurizer& featurizer, unsigned jobs) {
    FeatureMatrix m;
    m.ids = corpus.ids();
    const auto cols = feature_dim(featurizer);
    m.values.resize(static_cast<Eigen::Index>(corpus.size()), static_cast<Eigen::Index>(cols));

    if (const auto* emb = std::get_if<EmbeddingSet>(&featurizer)) {
        for (const auto& doc : corpus) {
            if (!emb->vectors.contains(doc.id)) throw Error("no embedding for document id '" + doc.id + "'");
        }
        m.feature_names.reserve(cols);
        for (std::size_t j = 0; j < cols; ++j) m.feature_names.push_back("dim" + std::to_string(j));
    } else {
        m.feature_names = std::visit(
            [](const auto& f) -> std::vector<std::string> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, EmbeddingSet>) {
                    return {};
                } else {
                    return f.vocab.terms();
                }
            },
            featurizer);
    }

    detail::parallel_for(corpus.size(), jobs, [&](std::size_t i) {
        const auto& doc = corpus[i];
        const auto row = static_cast<Eigen::Index>(i);
        if (const auto* tfidf = std::get_if<TfidfModel>(&featurizer)) {
            m.values.row(row) = transform_tfidf(*tfidf, doc.text).transpose();
        } else if (const auto* ppmi = std::get_if<PpmiModel>(&featurizer)) {
            m.values.row(row) = transform_ppmi(*ppmi, doc.text).transpose();
        } else {
            const auto& vec = std::get<EmbeddingSet>(featurizer).vectors.at(doc.id);
            m.values.row(row) = Eigen::Map<const Eigen::VectorXd>(vec.data(), static_cast<Eigen::Index>(vec.size()));
        }
    });
    return m;
}

json to_json(const TfidfModel& model) {
    return json{{"type", "tfidf"},
                {"n_docs_fit", model.n_docs_fit},
                {"config",
                 {{"min_df", model.config.min_df},
                  {"max_features", model.config.max_features},
                  {"l2_normalize", model.config.l2_normalize}}},
                {"terms", model.vocab.terms()},
                {"doc_freq", model.vocab.doc_freq()},
                {"idf", model.idf}};
}

json to_json(const PpmiModel& model) {
    return json{{"type", "ppmi"},
                {"total_count", model.total_count},
                {"terms", model.vocab.terms()},
                {"doc_freq", model.vocab.doc_freq()},
                {"term_prob", model.term_prob}};
}

TfidfModel tfidf_from_json(const json& j) {
    try {
        TfidfModel model;
        model.n_docs_fit = j.at("n_docs_fit").get<std::size_t>();
        const auto& cfg = j.at("config");
        model.config.min_df = cfg.at("min_df").get<std::size_t>();
        model.config.max_features = cfg.at("max_features").get<std::size_t>();
        model.config.l2_normalize = cfg.at("l2_normalize").get<bool>();
        model.vocab = Vocabulary(j.at("terms").get<std::vector<std::string>>(),
                                 j.at("doc_freq").get<std::vector<std::size_t>>());
        model.idf = j.at("idf").get<std::vector<double>>();
        if (model.idf.size() != model.vocab.size() || model.n_docs_fit == 0) {
            throw ParseError("inconsistent TF-IDF model");
        }
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid TF-IDF model: ") + e.what());
    }
}

PpmiModel ppmi_from_json(const json& j) {
    try {
        PpmiModel model;
        model.total_count = j.at("total_count").get<std::size_t>();
        model.vocab = Vocabulary(j.at("terms").get<std::vector<std::string>>(),
                                 j.at("doc_freq").get<std::vector<std::size_t>>());
        model.term_prob = j.at("term_prob").get<std::vector<double>>();
        if (model.term_prob.size() != model.vocab.size()) throw ParseError("inconsistent PPMI model");
        return model;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid PPMI model: ") + e.what());
    }
}

}  // namespace mgt::features
