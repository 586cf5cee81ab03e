#include "mgt/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/error.hpp"
#include "mgt/eval.hpp"

namespace mgt::boundary {

void BoundaryPipeline::validate() const {
    if (components.empty()) throw ConfigError("boundary pipeline: at least one component is required");
    ensemble.validate();
    if (ensemble.components.size() != components.size()) {
        throw ConfigError("boundary pipeline: ensemble weights do not match the component count");
    }
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (ensemble.components[i] != components[i].name) {
            throw ConfigError("boundary pipeline: ensemble component " + std::to_string(i) + " is '" +
                              ensemble.components[i] + "', expected '" + components[i].name + "'");
        }
        if (!components[i].featurizer) throw ConfigError("boundary pipeline: component '" + components[i].name + "' has no featurizer");
    }
    if (ensemble.rule != ensemble::CombineRule::weighted_average) {
        throw ConfigError("boundary pipeline: ensemble rule must be weighted_average");
    }
    double total = 0.0;
    for (double w : ensemble.weights) total += w;
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("boundary pipeline: ensemble weights must sum to 1");
}

double predict_raw(const Component& component, const corpus::Document& doc) {
    const corpus::Corpus single(corpus::LabelScheme::boundary, {corpus::Document{doc.id, doc.text, {}, {}, {}}});
    return predict_raw(component, single).front();
}

std::vector<double> predict_raw(const Component& component, const corpus::Corpus& corpus, unsigned jobs) {
    if (!component.featurizer) throw ConfigError("component '" + component.name + "' has no featurizer");
    const auto features = features::featurize(corpus, *component.featurizer, jobs);
    const Eigen::VectorXd raw = regress::predict(component.regressor, features.values);
    return {raw.data(), raw.data() + raw.size()};
}

std::int64_t snap_to_paragraph(double raw, std::span<const std::size_t> starts) {
    if (starts.empty()) throw Error("snap_to_paragraph: no paragraph starts");
    const auto above = std::lower_bound(starts.begin(), starts.end(), raw,
                                        [](std::size_t s, double v) { return static_cast<double>(s) < v; });
    if (above == starts.begin()) return static_cast<std::int64_t>(*above);
    if (above == starts.end()) return static_cast<std::int64_t>(starts.back());
    const auto below = std::prev(above);
    const double down = raw - static_cast<double>(*below);
    const double up = static_cast<double>(*above) - raw;
    return static_cast<std::int64_t>(up < down ? *above : *below);
}

std::int64_t round_index(double raw) {
    constexpr double kLimit = 4.0e18;
    if (!std::isfinite(raw) || std::abs(raw) > kLimit) throw NumericError("boundary index out of representable range");
    return static_cast<std::int64_t>(std::round(raw));
}

std::int64_t clip_round(double raw, std::size_t word_count) {
    if (std::isnan(raw)) throw NumericError("clip_round: NaN prediction");
    const double upper = static_cast<double>(word_count);
    if (raw >= upper) return static_cast<std::int64_t>(word_count);
    if (raw <= 0.0) return 0;
    return std::clamp<std::int64_t>(round_index(raw), 0, static_cast<std::int64_t>(word_count));
}

std::int64_t postprocess(double raw, std::string_view text, const PostProcess& options) {
    double value = raw;
    if (options.snap) {
        const auto starts = corpus::paragraph_starts(text);
        value = static_cast<double>(snap_to_paragraph(raw, starts));
    }
    return options.clip ? clip_round(value, corpus::word_count(text)) : round_index(value);
}

namespace {

const corpus::Document& document_for(const corpus::Corpus& corpus, const std::string& id) {
    const auto pos = corpus.position(id);
    if (!pos) throw Error("no document with id '" + id + "' in the target corpus");
    return corpus[*pos];
}

void require_coverage(const PredictionSet& preds, const corpus::Corpus& corpus) {
    if (preds.size() != corpus.size()) {
        throw Error("prediction set '" + preds.name() + "' covers " + std::to_string(preds.size()) +
                    " documents, corpus has " + std::to_string(corpus.size()));
    }
}

}  // namespace

PredictionSet postprocess(const PredictionSet& raw, const corpus::Corpus& corpus, const PostProcess& options) {
    if (raw.kind() != PredictionKind::scalar) throw Error("postprocess: '" + raw.name() + "' is not a scalar set");
    require_coverage(raw, corpus);
    std::vector<double> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto& doc = document_for(corpus, raw.ids()[i]);
        out.push_back(static_cast<double>(postprocess(raw.scalars()[i], doc.text, options)));
    }
    auto set = PredictionSet::scalars(raw.name(), raw.ids(), std::move(out));
    set.dev_metric = raw.dev_metric;
    return set;
}

PredictionSet finalize(const PredictionSet& combined, const corpus::Corpus& corpus, bool clip) {
    if (combined.kind() != PredictionKind::scalar) throw Error("finalize: '" + combined.name() + "' is not a scalar set");
    require_coverage(combined, corpus);
    std::vector<double> out;
    out.reserve(combined.size());
    for (std::size_t i = 0; i < combined.size(); ++i) {
        const double v = combined.scalars()[i];
        const auto& doc = document_for(corpus, combined.ids()[i]);
        out.push_back(static_cast<double>(clip ? clip_round(v, corpus::word_count(doc.text)) : round_index(v)));
    }
    return PredictionSet::scalars(combined.name(), combined.ids(), std::move(out));
}

PipelineOutput run_pipeline_detailed(const BoundaryPipeline& pipeline, const corpus::Corpus& corpus, unsigned jobs) {
    pipeline.validate();
    PipelineOutput out;
    const auto ids = corpus.ids();
    for (const auto& component : pipeline.components) {
        auto raw = PredictionSet::scalars(component.name, ids, predict_raw(component, corpus, jobs));
        out.components.push_back(postprocess(raw, corpus, pipeline.postprocess));
    }
    out.combined = ensemble::average(out.components, pipeline.ensemble.weights, "ensemble");
    out.final = finalize(out.combined, corpus, pipeline.postprocess.clip);
    return out;
}

PredictionSet run_pipeline(const BoundaryPipeline& pipeline, const corpus::Corpus& corpus, unsigned jobs) {
    return run_pipeline_detailed(pipeline, corpus, jobs).final;
}

double evaluate_boundary(const PredictionSet& preds, const corpus::Corpus& gold) {
    if (gold.empty()) throw Error("evaluate_boundary: empty corpus");
    return eval::mean_absolute_error(preds, gold);
}

}  // namespace mgt::boundary
