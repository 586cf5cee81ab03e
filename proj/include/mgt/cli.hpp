#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgt/corpus.hpp"
#include "mgt/ensemble.hpp"

namespace mgt::cli {

enum class Task { binary, multiway, boundary };

struct ComponentConfig {
    std::string name;
    bool external = false;
    nlohmann::json featurizer;  // {"type": "tfidf" | "ppmi" | "embeddings", ...}
    nlohmann::json model;       // {"type": "ols" | "elasticnet" | "softmax", ...}
    std::vector<std::filesystem::path> embedding_paths;
    PredictionKind external_kind = PredictionKind::probs;
    std::vector<std::pair<std::string, std::filesystem::path>> external_predictions;  // split -> file
};

/// A run manifest. Relative paths are resolved against the config file's directory.
struct RunConfig {
    Task task = Task::boundary;
    corpus::CleanMode cleaning = corpus::CleanMode::none;
    std::vector<std::pair<std::string, std::filesystem::path>> data;  // split -> corpus file
    std::filesystem::path output_dir;
    std::int64_t seed = 0;
    unsigned jobs = 1;
    std::vector<ComponentConfig> components;
    bool snap = true;
    bool clip = true;
    ensemble::CombineRule rule = ensemble::CombineRule::weighted_average;
    std::string weight_split = "dev";
    nlohmann::json snapshot;  // the manifest as given, with command-line overrides applied

    corpus::LabelScheme scheme() const;
    std::filesystem::path data_path(const std::string& split) const;
};

/// Parses and validates a config document. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Entry point of the `mgt` tool. Returns 0 on success, 2 on usage, config or
/// input-format errors and 1 on any other failure.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mgt::cli
