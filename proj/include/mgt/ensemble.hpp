#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mgt/corpus.hpp"
#include "mgt/prediction.hpp"

namespace mgt::ensemble {

/// vote: weighted plurality over class ids (probability rows vote with their argmax).
/// weighted_average: convex combination of scalars, or of probability rows followed by argmax.
enum class CombineRule { vote, weighted_average };

CombineRule parse_rule(std::string_view name);
std::string_view to_string(CombineRule rule);

struct EnsembleSpec {
    std::vector<std::string> components;
    std::vector<double> weights;
    CombineRule rule = CombineRule::vote;

    /// Throws ConfigError unless |weights| == |components| >= 1 and all weights > 0.
    void validate() const;
};

/// Dev accuracy of every component, unnormalized. A component with zero accuracy
/// is rejected.
std::vector<double> accuracy_weights(std::span<const PredictionSet> dev_preds, const corpus::Corpus& gold);

/// (1/mae_i) / sum_j (1/mae_j). Every MAE must be finite and > 0.
std::vector<double> inverse_mae_weights(std::span<const double> dev_maes);

/// argmax_c sum_i weights_i [votes_i == c], ties to the smallest class id.
std::int64_t weighted_vote(std::span<const std::int64_t> votes, std::span<const double> weights);

/// sum_i weights_i * preds_i; weights must sum to 1 within 1e-9.
double weighted_average(std::span<const double> preds, std::span<const double> weights);

/// argmax of sum_i weights_i * rows_i, ties to the smallest class id.
std::int64_t combine_probs(std::span<const std::vector<double>> rows, std::span<const double> weights);

// Set-level combiners. Every set must cover exactly the same ids; output follows
// the id order of the first set.

PredictionSet vote(std::span<const PredictionSet> sets, std::span<const double> weights,
                   std::string name = "ensemble");
PredictionSet average(std::span<const PredictionSet> sets, std::span<const double> weights,
                      std::string name = "ensemble");
PredictionSet combine_probs(std::span<const PredictionSet> sets, std::span<const double> weights,
                            std::string name = "ensemble");

/// Dispatches on spec.rule and the kind of the sets.
PredictionSet combine(std::span<const PredictionSet> sets, const EnsembleSpec& spec, std::string name = "ensemble");

/// One entry of an ensemble spec file.
struct ComponentRef {
    std::string name;
    std::filesystem::path path;
    PredictionKind kind = PredictionKind::scalar;
    std::optional<double> dev_metric;
    std::optional<std::filesystem::path> dev_path;
};

/// {"components": [{"name", "path", "kind", "dev_metric"?, "dev_path"?}], "rule"}.
/// Relative paths are resolved against the spec file's directory.
struct EnsembleFile {
    std::vector<ComponentRef> components;
    CombineRule rule = CombineRule::vote;
};

EnsembleFile load_ensemble_file(const std::filesystem::path& path);

}  // namespace mgt::ensemble
