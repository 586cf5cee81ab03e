#include "mgt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "jsonl.hpp"
#include "mgt/error.hpp"

namespace mgt::eval {

using nlohmann::json;

double accuracy(std::span<const std::int64_t> preds, std::span<const std::int64_t> gold) {
    if (gold.empty()) throw Error("accuracy: no documents");
    if (preds.size() != gold.size()) throw Error("accuracy: prediction/gold length mismatch");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) correct += preds[i] == gold[i] ? 1 : 0;
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

namespace {

std::vector<std::int64_t> aligned_classes(const PredictionSet& preds, const corpus::Corpus& gold) {
    std::vector<std::int64_t> out;
    out.reserve(gold.size());
    for (const auto& doc : gold) {
        const auto pos = preds.position(doc.id);
        if (!pos) throw Error("no prediction for gold id '" + doc.id + "' in '" + preds.name() + "'");
        out.push_back(preds.predicted_class(*pos));
    }
    return out;
}

}  // namespace

double accuracy(const PredictionSet& preds, const corpus::Corpus& gold) {
    if (gold.empty()) throw Error("accuracy: empty gold corpus");
    return accuracy(aligned_classes(preds, gold), gold.labels());
}

double mean_absolute_error(std::span<const double> preds, std::span<const double> gold) {
    if (gold.empty()) throw Error("mean_absolute_error: no documents");
    if (preds.size() != gold.size()) throw Error("mean_absolute_error: prediction/gold length mismatch");
    // Summed in sorted order so the result does not depend on document order.
    std::vector<double> err(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) err[i] = std::abs(preds[i] - gold[i]);
    std::sort(err.begin(), err.end());
    double total = 0.0;
    for (double e : err) total += e;
    return total / static_cast<double>(gold.size());
}

double mean_absolute_error(const PredictionSet& preds, const corpus::Corpus& gold) {
    if (gold.empty()) throw Error("mean_absolute_error: empty gold corpus");
    if (preds.kind() != PredictionKind::scalar && preds.kind() != PredictionKind::class_id) {
        throw Error("mean_absolute_error: '" + preds.name() + "' holds probabilities");
    }
    std::vector<double> p;
    std::vector<double> g;
    p.reserve(gold.size());
    g.reserve(gold.size());
    for (const auto& doc : gold) {
        const auto pos = preds.position(doc.id);
        if (!pos) throw Error("no prediction for gold id '" + doc.id + "' in '" + preds.name() + "'");
        if (!doc.label) throw Error("gold document '" + doc.id + "' has no label");
        p.push_back(preds.kind() == PredictionKind::scalar ? preds.scalars()[*pos]
                                                           : static_cast<double>(preds.classes()[*pos]));
        g.push_back(static_cast<double>(*doc.label));
    }
    return mean_absolute_error(p, g);
}

std::size_t ConfusionMatrix::total() const {
    std::size_t t = 0;
    for (const auto& row : counts) {
        for (auto c : row) t += c;
    }
    return t;
}

std::size_t ConfusionMatrix::trace() const {
    std::size_t t = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) t += counts[k][k];
    return t;
}

double ConfusionMatrix::accuracy() const {
    const auto t = total();
    if (t == 0) throw Error("confusion matrix is empty");
    return static_cast<double>(trace()) / static_cast<double>(t);
}

ConfusionMatrix confusion(std::span<const std::int64_t> preds, std::span<const std::int64_t> gold, int classes) {
    if (classes < 1) throw Error("confusion: need at least one class");
    if (preds.size() != gold.size()) throw Error("confusion: prediction/gold length mismatch");
    ConfusionMatrix cm;
    cm.classes = classes;
    cm.counts.assign(static_cast<std::size_t>(classes), std::vector<std::size_t>(static_cast<std::size_t>(classes), 0));
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const auto g = gold[i];
        const auto p = preds[i];
        if (g < 0 || g >= classes || p < 0 || p >= classes) {
            throw Error("confusion: label out of range at position " + std::to_string(i) + " (gold " +
                        std::to_string(g) + ", predicted " + std::to_string(p) + ")");
        }
        ++cm.counts[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
    }
    return cm;
}

ConfusionMatrix confusion(const PredictionSet& preds, const corpus::Corpus& gold, int classes) {
    return confusion(aligned_classes(preds, gold), gold.labels(), classes);
}

std::string confusion_csv(const ConfusionMatrix& cm) {
    std::ostringstream out;
    out << "gold\\pred";
    for (int k = 0; k < cm.classes; ++k) out << ',' << k;
    out << '\n';
    for (int g = 0; g < cm.classes; ++g) {
        out << g;
        for (auto c : cm.counts[static_cast<std::size_t>(g)]) out << ',' << c;
        out << '\n';
    }
    return out.str();
}

json to_json(const RunReport& report, const std::string& confusion_csv_path) {
    json components = json::array();
    for (const auto& c : report.components) components.push_back({{"name", c.name}, {"metric", c.metric}});
    json ensemble = json::object();
    if (report.ensemble) {
        ensemble = {{"components", report.ensemble->components},
                    {"weights", report.ensemble->weights},
                    {"metric", report.ensemble->metric}};
    }
    json j{{"task", report.task},
           {"split", report.split},
           {"metric", report.metric},
           {"components", components},
           {"ensemble", ensemble},
           {"config", report.config},
           {"timestamps", report.timestamps}};
    if (report.confusion) {
        j["confusion"] = {{"classes", report.confusion->classes},
                          {"counts", report.confusion->counts},
                          {"total", report.confusion->total()}};
        j["confusion_csv_path"] = confusion_csv_path;
    }
    return j;
}

RunReport report_from_json(const json& j) {
    try {
        RunReport r;
        r.task = j.at("task").get<std::string>();
        r.split = j.at("split").get<std::string>();
        r.metric = j.at("metric").get<std::string>();
        for (const auto& c : j.at("components")) {
            r.components.push_back({c.at("name").get<std::string>(), c.at("metric").get<double>()});
        }
        const auto& e = j.at("ensemble");
        if (!e.empty()) {
            r.ensemble = EnsembleMetric{e.at("components").get<std::vector<std::string>>(),
                                        e.at("weights").get<std::vector<double>>(), e.at("metric").get<double>()};
        }
        if (j.contains("confusion")) {
            ConfusionMatrix cm;
            cm.classes = j.at("confusion").at("classes").get<int>();
            cm.counts = j.at("confusion").at("counts").get<std::vector<std::vector<std::size_t>>>();
            r.confusion = std::move(cm);
        }
        r.config = j.value("config", json::object());
        r.timestamps = j.value("timestamps", json::object());
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid run report: ") + e.what());
    }
}

std::filesystem::path emit_report(const RunReport& report, const std::filesystem::path& path) {
    std::filesystem::path csv_path;
    std::string csv_rel;
    if (report.confusion) {
        csv_rel = path.stem().string() + "_confusion.csv";
        csv_path = path.parent_path() / csv_rel;
        auto csv = detail::open_output(csv_path);
        csv << confusion_csv(*report.confusion);
        if (!csv) throw Error("failed writing '" + csv_path.string() + "'");
    }
    auto out = detail::open_output(path);
    out << to_json(report, csv_rel).dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
    return csv_path;
}

RunReport read_report(const std::filesystem::path& path) {
    auto in = detail::open_input(path);
    try {
        return report_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ParseError("report '" + path.string() + "': " + e.what());
    }
}

}  // namespace mgt::eval
