#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mgt/corpus.hpp"
#include "mgt/prediction.hpp"

namespace mgt::eval {

double accuracy(std::span<const std::int64_t> preds, std::span<const std::int64_t> gold);
/// Fraction of gold documents whose predicted class matches. Every gold id must be predicted.
double accuracy(const PredictionSet& preds, const corpus::Corpus& gold);

double mean_absolute_error(std::span<const double> preds, std::span<const double> gold);
double mean_absolute_error(const PredictionSet& preds, const corpus::Corpus& gold);

/// Rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
    int classes = 0;
    std::vector<std::vector<std::size_t>> counts;

    std::size_t total() const;
    std::size_t trace() const;
    double accuracy() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

ConfusionMatrix confusion(std::span<const std::int64_t> preds, std::span<const std::int64_t> gold, int classes);
ConfusionMatrix confusion(const PredictionSet& preds, const corpus::Corpus& gold, int classes);

/// "gold\pred,0,1,..." header, then one row per gold class.
std::string confusion_csv(const ConfusionMatrix& cm);

struct ComponentMetric {
    std::string name;
    double metric = 0.0;

    bool operator==(const ComponentMetric&) const = default;
};

struct EnsembleMetric {
    std::vector<std::string> components;
    std::vector<double> weights;
    double metric = 0.0;

    bool operator==(const EnsembleMetric&) const = default;
};

struct RunReport {
    std::string task;
    std::string split;
    std::string metric;  // "accuracy" or "mae"
    std::vector<ComponentMetric> components;
    std::optional<EnsembleMetric> ensemble;
    std::optional<ConfusionMatrix> confusion;
    nlohmann::json config = nlohmann::json::object();
    nlohmann::json timestamps = nlohmann::json::object();

    bool operator==(const RunReport&) const = default;
};

nlohmann::json to_json(const RunReport& report, const std::string& confusion_csv_path = {});
RunReport report_from_json(const nlohmann::json& j);

/// Writes the JSON report and, when a confusion matrix is present, a CSV named
/// <stem>_confusion.csv beside it. The report stores the CSV path relative to its
/// own directory. Returns the CSV path (empty when none was written).
std::filesystem::path emit_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

}  // namespace mgt::eval
