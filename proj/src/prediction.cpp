#include "mgt/prediction.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "jsonl.hpp"
#include "mgt/error.hpp"

namespace mgt {

using nlohmann::json;

PredictionKind parse_prediction_kind(std::string_view name) {
    if (name == "class") return PredictionKind::class_id;
    if (name == "probs") return PredictionKind::probs;
    if (name == "scalar") return PredictionKind::scalar;
    throw ConfigError("unknown prediction kind '" + std::string(name) + "' (expected class, probs or scalar)");
}

std::string_view to_string(PredictionKind kind) {
    switch (kind) {
        case PredictionKind::class_id: return "class";
        case PredictionKind::probs: return "probs";
        case PredictionKind::scalar: return "scalar";
    }
    return "scalar";
}

void PredictionSet::build_index() {
    index_.clear();
    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (!index_.emplace(ids_[i], i).second) {
            throw ParseError("prediction set '" + name_ + "' has duplicate id '" + ids_[i] + "'");
        }
    }
}

PredictionSet PredictionSet::classes(std::string name, std::vector<std::string> ids,
                                     std::vector<std::int64_t> classes) {
    if (ids.size() != classes.size()) throw Error("prediction set '" + name + "': id/value count mismatch");
    PredictionSet s;
    s.name_ = std::move(name);
    s.kind_ = PredictionKind::class_id;
    s.ids_ = std::move(ids);
    s.classes_ = std::move(classes);
    for (auto c : s.classes_) {
        if (c < 0) throw ParseError("prediction set '" + s.name_ + "': negative class id");
    }
    s.build_index();
    return s;
}

PredictionSet PredictionSet::probabilities(std::string name, std::vector<std::string> ids,
                                           std::vector<std::vector<double>> probs) {
    if (ids.size() != probs.size()) throw Error("prediction set '" + name + "': id/value count mismatch");
    PredictionSet s;
    s.name_ = std::move(name);
    s.kind_ = PredictionKind::probs;
    s.ids_ = std::move(ids);
    s.probs_ = std::move(probs);
    for (std::size_t i = 0; i < s.probs_.size(); ++i) {
        const auto& row = s.probs_[i];
        if (row.size() < 2 || row.size() != s.probs_.front().size()) {
            throw ParseError("prediction set '" + s.name_ + "': inconsistent class count at id '" + s.ids_[i] + "'");
        }
        double sum = 0.0;
        for (double p : row) {
            if (!std::isfinite(p) || p < 0.0) {
                throw ParseError("prediction set '" + s.name_ + "': invalid probability at id '" + s.ids_[i] + "'");
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw ParseError("prediction set '" + s.name_ + "': probabilities at id '" + s.ids_[i] +
                             "' do not sum to 1");
        }
    }
    s.build_index();
    return s;
}

PredictionSet PredictionSet::scalars(std::string name, std::vector<std::string> ids, std::vector<double> values) {
    if (ids.size() != values.size()) throw Error("prediction set '" + name + "': id/value count mismatch");
    PredictionSet s;
    s.name_ = std::move(name);
    s.kind_ = PredictionKind::scalar;
    s.ids_ = std::move(ids);
    s.scalars_ = std::move(values);
    for (double v : s.scalars_) {
        if (!std::isfinite(v)) throw NumericError("prediction set '" + s.name_ + "': non-finite value");
    }
    s.build_index();
    return s;
}

std::int64_t PredictionSet::predicted_class(std::size_t i) const {
    switch (kind_) {
        case PredictionKind::class_id:
            return classes_[i];
        case PredictionKind::probs: {
            const auto& row = probs_[i];
            std::size_t best = 0;
            for (std::size_t k = 1; k < row.size(); ++k) {
                if (row[k] > row[best]) best = k;
            }
            return static_cast<std::int64_t>(best);
        }
        case PredictionKind::scalar:
            break;
    }
    throw Error("prediction set '" + name_ + "' holds scalars, not classes");
}

std::size_t PredictionSet::class_count() const {
    if (kind_ == PredictionKind::probs) return probs_.empty() ? 0 : probs_.front().size();
    std::int64_t max_class = -1;
    for (auto c : classes_) max_class = std::max(max_class, c);
    return static_cast<std::size_t>(max_class + 1);
}

std::optional<std::size_t> PredictionSet::position(std::string_view id) const {
    const auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

namespace {

json scalar_json(double v) {
    constexpr double kMaxExact = 9007199254740992.0;  // 2^53
    if (std::trunc(v) == v && std::abs(v) < kMaxExact) return static_cast<std::int64_t>(v);
    return v;
}

}  // namespace

void write_predictions(const PredictionSet& preds, std::ostream& out) {
    for (std::size_t i = 0; i < preds.size(); ++i) {
        json obj;
        obj["id"] = preds.ids()[i];
        switch (preds.kind()) {
            case PredictionKind::class_id: obj["label"] = preds.classes()[i]; break;
            case PredictionKind::scalar: obj["label"] = scalar_json(preds.scalars()[i]); break;
            case PredictionKind::probs: obj["probs"] = preds.probs()[i]; break;
        }
        out << obj.dump() << '\n';
    }
}

void write_predictions(const PredictionSet& preds, const std::filesystem::path& path) {
    auto out = detail::open_output(path);
    write_predictions(preds, out);
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

PredictionSet read_predictions(std::istream& in, PredictionKind kind, std::string name) {
    std::vector<std::string> ids;
    std::vector<std::int64_t> classes;
    std::vector<double> scalars;
    std::vector<std::vector<double>> probs;
    bool first = true;
    detail::for_each_json_line(in, [&](const json& obj, std::size_t lineno) {
        const bool header = first && obj.contains("_meta");
        first = false;
        if (header) return;
        ids.push_back(detail::read_id(obj, lineno));
        if (kind == PredictionKind::probs) {
            const auto it = obj.find("probs");
            if (it == obj.end() || !it->is_array()) throw ParseError("missing array \"probs\"", lineno);
            std::vector<double> row;
            for (const auto& v : *it) {
                if (!v.is_number()) throw ParseError("non-numeric probability", lineno);
                row.push_back(v.get<double>());
            }
            probs.push_back(std::move(row));
            return;
        }
        const auto it = obj.find("label");
        if (it == obj.end() || !it->is_number()) throw ParseError("missing numeric \"label\"", lineno);
        if (kind == PredictionKind::class_id) {
            if (!it->is_number_integer()) throw ParseError("class label must be an integer", lineno);
            classes.push_back(it->get<std::int64_t>());
        } else {
            scalars.push_back(it->get<double>());
        }
    });
    switch (kind) {
        case PredictionKind::class_id: return PredictionSet::classes(std::move(name), std::move(ids), std::move(classes));
        case PredictionKind::probs: return PredictionSet::probabilities(std::move(name), std::move(ids), std::move(probs));
        case PredictionKind::scalar: break;
    }
    return PredictionSet::scalars(std::move(name), std::move(ids), std::move(scalars));
}

PredictionSet load_predictions(const std::filesystem::path& path, PredictionKind kind, std::string name) {
    auto in = detail::open_input(path);
    if (name.empty()) name = path.stem().string();
    return read_predictions(in, kind, std::move(name));
}

}  // namespace mgt
