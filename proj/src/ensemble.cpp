#include "mgt/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "jsonl.hpp"
#include "mgt/error.hpp"

namespace mgt::ensemble {

using nlohmann::json;

CombineRule parse_rule(std::string_view name) {
    if (name == "vote") return CombineRule::vote;
    if (name == "weighted_average") return CombineRule::weighted_average;
    throw ConfigError("unknown ensemble rule '" + std::string(name) + "' (expected vote or weighted_average)");
}

std::string_view to_string(CombineRule rule) { return rule == CombineRule::vote ? "vote" : "weighted_average"; }

void EnsembleSpec::validate() const {
    if (components.empty()) throw ConfigError("ensemble: no components");
    if (weights.size() != components.size()) {
        throw ConfigError("ensemble: " + std::to_string(weights.size()) + " weights for " +
                          std::to_string(components.size()) + " components");
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw ConfigError("ensemble: weights must be finite and > 0");
    }
}

namespace {

void check_weights(std::size_t n, std::span<const double> weights) {
    if (n == 0) throw Error("ensemble: no components");
    if (weights.size() != n) {
        throw Error("ensemble: " + std::to_string(weights.size()) + " weights for " + std::to_string(n) +
                    " components");
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) throw Error("ensemble: weights must be finite and > 0");
    }
}

void check_coverage(std::span<const PredictionSet> sets) {
    if (sets.empty()) throw Error("ensemble: no components");
    const auto& ref = sets.front();
    for (const auto& s : sets.subspan(1)) {
        if (s.size() != ref.size()) {
            throw Error("ensemble: component '" + s.name() + "' covers " + std::to_string(s.size()) +
                        " documents, '" + ref.name() + "' covers " + std::to_string(ref.size()));
        }
        for (const auto& id : ref.ids()) {
            if (!s.position(id)) throw Error("ensemble: component '" + s.name() + "' has no prediction for id '" + id + "'");
        }
    }
}

}  // namespace

std::vector<double> accuracy_weights(std::span<const PredictionSet> dev_preds, const corpus::Corpus& gold) {
    if (gold.empty()) throw Error("accuracy_weights: empty gold corpus");
    if (dev_preds.empty()) throw Error("accuracy_weights: no components");
    std::vector<double> weights;
    weights.reserve(dev_preds.size());
    for (const auto& set : dev_preds) {
        std::size_t correct = 0;
        for (const auto& doc : gold) {
            if (!doc.label) throw Error("accuracy_weights: gold document '" + doc.id + "' has no label");
            const auto pos = set.position(doc.id);
            if (!pos) throw Error("accuracy_weights: component '" + set.name() + "' has no prediction for id '" + doc.id + "'");
            if (set.predicted_class(*pos) == *doc.label) ++correct;
        }
        if (correct == 0) throw Error("accuracy_weights: zero weight component '" + set.name() + "' (dev accuracy 0)");
        weights.push_back(static_cast<double>(correct) / static_cast<double>(gold.size()));
    }
    return weights;
}

std::vector<double> inverse_mae_weights(std::span<const double> dev_maes) {
    if (dev_maes.empty()) throw Error("inverse_mae_weights: no components");
    std::vector<double> weights;
    weights.reserve(dev_maes.size());
    double total = 0.0;
    for (double mae : dev_maes) {
        if (!(mae > 0.0) || !std::isfinite(mae)) {
            throw Error("inverse_mae_weights: dev MAE must be finite and > 0 (got " + std::to_string(mae) + ")");
        }
        weights.push_back(1.0 / mae);
        total += weights.back();
    }
    for (double& w : weights) w /= total;
    return weights;
}

std::int64_t weighted_vote(std::span<const std::int64_t> votes, std::span<const double> weights) {
    check_weights(votes.size(), weights);
    std::map<std::int64_t, double> score;
    for (std::size_t i = 0; i < votes.size(); ++i) score[votes[i]] += weights[i];
    auto best = score.begin();
    for (auto it = score.begin(); it != score.end(); ++it) {
        if (it->second > best->second) best = it;
    }
    return best->first;
}

double weighted_average(std::span<const double> preds, std::span<const double> weights) {
    check_weights(preds.size(), weights);
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (std::abs(wsum - 1.0) > 1e-9) throw Error("weighted_average: weights must sum to 1 (got " + std::to_string(wsum) + ")");
    double acc = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) acc += weights[i] * preds[i];
    return acc;
}

std::int64_t combine_probs(std::span<const std::vector<double>> rows, std::span<const double> weights) {
    check_weights(rows.size(), weights);
    const std::size_t k = rows.front().size();
    std::vector<double> mix(k, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != k) {
            throw Error("combine_probs: class-count mismatch (" + std::to_string(rows[i].size()) + " vs " +
                        std::to_string(k) + ")");
        }
        for (std::size_t c = 0; c < k; ++c) mix[c] += weights[i] * rows[i][c];
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < k; ++c) {
        if (mix[c] > mix[best]) best = c;
    }
    return static_cast<std::int64_t>(best);
}

PredictionSet vote(std::span<const PredictionSet> sets, std::span<const double> weights, std::string name) {
    check_coverage(sets);
    check_weights(sets.size(), weights);
    const auto& ids = sets.front().ids();
    std::vector<std::int64_t> out;
    out.reserve(ids.size());
    std::vector<std::int64_t> votes(sets.size());
    for (const auto& id : ids) {
        for (std::size_t i = 0; i < sets.size(); ++i) votes[i] = sets[i].predicted_class(*sets[i].position(id));
        out.push_back(weighted_vote(votes, weights));
    }
    return PredictionSet::classes(std::move(name), ids, std::move(out));
}

PredictionSet average(std::span<const PredictionSet> sets, std::span<const double> weights, std::string name) {
    check_coverage(sets);
    for (const auto& s : sets) {
        if (s.kind() != PredictionKind::scalar) throw Error("ensemble: component '" + s.name() + "' is not scalar");
    }
    const auto& ids = sets.front().ids();
    std::vector<double> out;
    out.reserve(ids.size());
    std::vector<double> preds(sets.size());
    for (const auto& id : ids) {
        for (std::size_t i = 0; i < sets.size(); ++i) preds[i] = sets[i].scalars()[*sets[i].position(id)];
        out.push_back(weighted_average(preds, weights));
    }
    return PredictionSet::scalars(std::move(name), ids, std::move(out));
}

PredictionSet combine_probs(std::span<const PredictionSet> sets, std::span<const double> weights, std::string name) {
    check_coverage(sets);
    for (const auto& s : sets) {
        if (s.kind() != PredictionKind::probs) throw Error("ensemble: component '" + s.name() + "' has no probabilities");
        if (s.class_count() != sets.front().class_count()) {
            throw Error("combine_probs: class-count mismatch between '" + s.name() + "' and '" + sets.front().name() + "'");
        }
    }
    const auto& ids = sets.front().ids();
    std::vector<std::int64_t> out;
    out.reserve(ids.size());
    std::vector<std::vector<double>> rows(sets.size());
    for (const auto& id : ids) {
        for (std::size_t i = 0; i < sets.size(); ++i) rows[i] = sets[i].probs()[*sets[i].position(id)];
        out.push_back(combine_probs(rows, weights));
    }
    return PredictionSet::classes(std::move(name), ids, std::move(out));
}

PredictionSet combine(std::span<const PredictionSet> sets, const EnsembleSpec& spec, std::string name) {
    spec.validate();
    if (sets.size() != spec.components.size()) throw Error("ensemble: spec/component count mismatch");
    if (spec.rule == CombineRule::vote) return vote(sets, spec.weights, std::move(name));
    const bool all_scalar = std::all_of(sets.begin(), sets.end(), [](const auto& s) { return s.kind() == PredictionKind::scalar; });
    if (all_scalar) return average(sets, spec.weights, std::move(name));
    // Probability averaging is scale-invariant, so unnormalized weights are fine here.
    return combine_probs(sets, spec.weights, std::move(name));
}

EnsembleFile load_ensemble_file(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("ensemble spec '" + path.string() + "': " + e.what());
    }
    const auto base = path.parent_path();
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };
    try {
        EnsembleFile file;
        file.rule = parse_rule(j.value("rule", std::string("vote")));
        for (const auto& c : j.at("components")) {
            ComponentRef ref;
            ref.name = c.at("name").get<std::string>();
            ref.path = resolve(c.at("path").get<std::string>());
            ref.kind = parse_prediction_kind(c.value("kind", std::string("scalar")));
            if (c.contains("dev_metric") && !c.at("dev_metric").is_null()) ref.dev_metric = c.at("dev_metric").get<double>();
            if (c.contains("dev_path")) ref.dev_path = resolve(c.at("dev_path").get<std::string>());
            file.components.push_back(std::move(ref));
        }
        if (file.components.empty()) throw ConfigError("ensemble spec '" + path.string() + "' lists no components");
        return file;
    } catch (const json::exception& e) {
        throw ConfigError("ensemble spec '" + path.string() + "': " + e.what());
    }
}

}  // namespace mgt::ensemble
