#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mgt/corpus.hpp"
#include "mgt/ensemble.hpp"
#include "mgt/features.hpp"
#include "mgt/prediction.hpp"
#include "mgt/regress.hpp"

namespace mgt::boundary {

/// One featurizer + regressor pair. Featurizers are shared between components
/// that use the same representation.
struct Component {
    std::string name;
    std::shared_ptr<const features::Featurizer> featurizer;
    regress::RegressorModel regressor;
};

struct PostProcess {
    bool snap = true;
    bool clip = true;
};

struct BoundaryPipeline {
    std::vector<Component> components;
    ensemble::EnsembleSpec ensemble;
    PostProcess postprocess;

    /// Throws ConfigError unless there is at least one component, the ensemble
    /// lists every component once with normalized weights, and the rule is
    /// weighted_average.
    void validate() const;
};

/// Unconstrained real-valued boundary index.
double predict_raw(const Component& component, const corpus::Document& doc);
std::vector<double> predict_raw(const Component& component, const corpus::Corpus& corpus, unsigned jobs = 1);

/// Element of `starts` nearest to `raw`; equidistant candidates resolve to the smaller start.
std::int64_t snap_to_paragraph(double raw, std::span<const std::size_t> starts);

/// Rounds half away from zero, then clamps to [0, word_count].
std::int64_t clip_round(double raw, std::size_t word_count);

/// Rounds half away from zero without clamping.
std::int64_t round_index(double raw);

/// Snap (optional) followed by clip_round, or plain rounding when clip is off.
std::int64_t postprocess(double raw, std::string_view text, const PostProcess& options);

/// Applies postprocess to every document of a raw scalar set.
PredictionSet postprocess(const PredictionSet& raw, const corpus::Corpus& corpus, const PostProcess& options);

/// Rounds (and clamps when clip is on) an ensembled scalar set to final indices.
PredictionSet finalize(const PredictionSet& combined, const corpus::Corpus& corpus, bool clip);

struct PipelineOutput {
    std::vector<PredictionSet> components;  // post-processed integer indices
    PredictionSet combined;                 // weighted average before the final rounding
    PredictionSet final;
};

PipelineOutput run_pipeline_detailed(const BoundaryPipeline& pipeline, const corpus::Corpus& corpus,
                                     unsigned jobs = 1);
PredictionSet run_pipeline(const BoundaryPipeline& pipeline, const corpus::Corpus& corpus, unsigned jobs = 1);

/// Mean absolute error against gold boundary labels.
double evaluate_boundary(const PredictionSet& preds, const corpus::Corpus& gold);

}  // namespace mgt::boundary
