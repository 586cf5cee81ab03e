#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mgt {

enum class PredictionKind { class_id, probs, scalar };

PredictionKind parse_prediction_kind(std::string_view name);
std::string_view to_string(PredictionKind kind);

/// Per-document predictions of one predictor, keyed by document id and kept in
/// input order. Exactly one of the value arrays is populated, matching kind().
class PredictionSet {
public:
    PredictionSet() = default;

    static PredictionSet classes(std::string name, std::vector<std::string> ids,
                                 std::vector<std::int64_t> classes);
    /// Every row must be non-negative and sum to 1 within 1e-6.
    static PredictionSet probabilities(std::string name, std::vector<std::string> ids,
                                       std::vector<std::vector<double>> probs);
    static PredictionSet scalars(std::string name, std::vector<std::string> ids,
                                 std::vector<double> values);

    const std::string& name() const noexcept { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }
    PredictionKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }

    std::span<const std::int64_t> classes() const noexcept { return classes_; }
    const std::vector<std::vector<double>>& probs() const noexcept { return probs_; }
    std::span<const double> scalars() const noexcept { return scalars_; }

    /// Class id for class predictions, argmax (smallest id on ties) for probs.
    std::int64_t predicted_class(std::size_t i) const;
    std::size_t class_count() const;

    std::optional<std::size_t> position(std::string_view id) const;

    std::optional<double> dev_metric;

private:
    void build_index();

    std::string name_;
    PredictionKind kind_ = PredictionKind::scalar;
    std::vector<std::string> ids_;
    std::vector<std::int64_t> classes_;
    std::vector<std::vector<double>> probs_;
    std::vector<double> scalars_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Class and scalar sets are written as {"id", "label"} (integral scalars as
/// integers); probability sets as {"id", "probs"}.
void write_predictions(const PredictionSet& preds, std::ostream& out);
void write_predictions(const PredictionSet& preds, const std::filesystem::path& path);

/// Reads a prediction file of the given kind. A leading {"_meta": ...} line is skipped.
PredictionSet read_predictions(std::istream& in, PredictionKind kind, std::string name = {});
PredictionSet load_predictions(const std::filesystem::path& path, PredictionKind kind,
                               std::string name = {});

}  // namespace mgt
