#include "mgt/cli.hpp"

#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "mgt/boundary.hpp"
#include "mgt/error.hpp"
#include "mgt/eval.hpp"
#include "mgt/features.hpp"
#include "mgt/prediction.hpp"
#include "mgt/regress.hpp"

namespace mgt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Task parse_task(std::string_view name) {
    if (name == "binary") return Task::binary;
    if (name == "multiway") return Task::multiway;
    if (name == "boundary") return Task::boundary;
    throw ConfigError("unknown task '" + std::string(name) + "' (expected binary, multiway or boundary)");
}

std::string_view to_string(Task task) {
    switch (task) {
        case Task::binary: return "binary";
        case Task::multiway: return "multiway";
        case Task::boundary: return "boundary";
    }
    return "boundary";
}

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& path, std::string_view what) {
    if (!fs::is_regular_file(path)) throw ConfigError(std::string(what) + " '" + path.string() + "' does not exist");
}

json read_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_json_file(const fs::path& path, const json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open output file '" + path.string() + "'");
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

PredictionKind component_kind(const RunConfig& cfg, const ComponentConfig& c) {
    if (c.external) return c.external_kind;
    return cfg.task == Task::boundary ? PredictionKind::scalar : PredictionKind::probs;
}

}  // namespace

corpus::LabelScheme RunConfig::scheme() const {
    switch (task) {
        case Task::binary: return corpus::LabelScheme::binary;
        case Task::multiway: return corpus::LabelScheme::multiway6;
        case Task::boundary: return corpus::LabelScheme::boundary;
    }
    return corpus::LabelScheme::boundary;
}

fs::path RunConfig::data_path(const std::string& split) const {
    for (const auto& [name, path] : data) {
        if (name == split) return path;
    }
    throw ConfigError("config has no data file for split '" + split + "'");
}

RunConfig parse_config(const json& j, const fs::path& base_dir) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        RunConfig cfg;
        cfg.snapshot = j;
        cfg.task = parse_task(j.at("task").get<std::string>());
        const bool boundary = cfg.task == Task::boundary;
        cfg.cleaning = corpus::parse_clean_mode(get_or<std::string>(j, "cleaning", boundary ? "none" : "full"));

        const auto& data = j.at("data");
        if (!data.is_object() || !data.contains("train")) throw ConfigError("config \"data\" needs at least a \"train\" file");
        for (const auto& [split, path] : data.items()) {
            cfg.data.emplace_back(split, resolve(base_dir, path.get<std::string>()));
            require_file(cfg.data.back().second, "data file");
        }
        cfg.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "out"));
        cfg.seed = get_or<std::int64_t>(j, "seed", 0);
        cfg.jobs = get_or<unsigned>(j, "jobs", 1);

        const auto& comps = j.at("components");
        if (!comps.is_array() || comps.empty()) throw ConfigError("config needs at least one component");
        std::set<std::string> names;
        for (const auto& cj : comps) {
            ComponentConfig c;
            c.name = cj.at("name").get<std::string>();
            if (c.name.empty() || c.name.find('/') != std::string::npos || c.name == "ensemble" || c.name == "." ||
                c.name == "..") {
                throw ConfigError("invalid component name '" + c.name + "'");
            }
            if (!names.insert(c.name).second) throw ConfigError("duplicate component name '" + c.name + "'");

            if (get_or<std::string>(cj, "type", "native") == "external") {
                c.external = true;
                c.external_kind = parse_prediction_kind(get_or<std::string>(cj, "kind", boundary ? "scalar" : "probs"));
                if (boundary != (c.external_kind == PredictionKind::scalar)) {
                    throw ConfigError("component '" + c.name + "': kind does not fit task " + std::string(to_string(cfg.task)));
                }
                for (const auto& [split, path] : cj.at("predictions").items()) {
                    c.external_predictions.emplace_back(split, resolve(base_dir, path.get<std::string>()));
                    require_file(c.external_predictions.back().second, "prediction file");
                }
            } else {
                c.featurizer = cj.at("featurizer");
                c.model = cj.at("model");
                const auto ftype = c.featurizer.at("type").get<std::string>();
                if (ftype == "embeddings") {
                    for (const auto& p : c.featurizer.at("paths")) {
                        c.embedding_paths.push_back(resolve(base_dir, p.get<std::string>()));
                        require_file(c.embedding_paths.back(), "embedding file");
                    }
                } else if (ftype != "tfidf" && ftype != "ppmi") {
                    throw ConfigError("component '" + c.name + "': unknown featurizer '" + ftype + "'");
                }
                const auto mtype = c.model.at("type").get<std::string>();
                if (boundary && mtype != "ols" && mtype != "elasticnet") {
                    throw ConfigError("component '" + c.name + "': boundary models must be ols or elasticnet");
                }
                if (!boundary && mtype != "softmax") {
                    throw ConfigError("component '" + c.name + "': classification models must be softmax");
                }
            }
            cfg.components.push_back(std::move(c));
        }

        if (j.contains("postprocess")) {
            cfg.snap = get_or<bool>(j.at("postprocess"), "snap", true);
            cfg.clip = get_or<bool>(j.at("postprocess"), "clip", true);
        }
        cfg.rule = boundary ? ensemble::CombineRule::weighted_average : ensemble::CombineRule::vote;
        if (j.contains("ensemble")) {
            const auto& e = j.at("ensemble");
            if (e.contains("rule")) cfg.rule = ensemble::parse_rule(e.at("rule").get<std::string>());
            cfg.weight_split = get_or<std::string>(e, "weight_split", "dev");
        }
        if (boundary && cfg.rule != ensemble::CombineRule::weighted_average) {
            throw ConfigError("boundary ensembles use the weighted_average rule");
        }
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid config: ") + e.what());
    }
}

RunConfig load_config(const fs::path& path) {
    require_file(path, "config file");
    return parse_config(read_json_file(path), path.parent_path());
}

namespace {

// Output layout below RunConfig::output_dir.
fs::path model_dir(const RunConfig& cfg, const std::string& name) { return cfg.output_dir / "models" / name; }
fs::path prediction_path(const RunConfig& cfg, const std::string& split, const std::string& name) {
    return cfg.output_dir / "predictions" / split / (name + ".jsonl");
}
fs::path weights_path(const RunConfig& cfg) { return cfg.output_dir / "ensemble" / "weights.json"; }
fs::path report_path(const RunConfig& cfg, const std::string& split) { return cfg.output_dir / "reports" / (split + ".json"); }

corpus::Corpus load_split(const RunConfig& cfg, const std::string& split) {
    return corpus::clean(corpus::load_jsonl(cfg.data_path(split), cfg.scheme()), cfg.cleaning);
}

features::Featurizer fit_featurizer(const ComponentConfig& c, const corpus::Corpus& train) {
    const auto type = c.featurizer.at("type").get<std::string>();
    if (type == "tfidf") {
        features::TfidfConfig tc;
        tc.min_df = get_or<std::size_t>(c.featurizer, "min_df", tc.min_df);
        tc.max_features = get_or<std::size_t>(c.featurizer, "max_features", tc.max_features);
        tc.l2_normalize = get_or<bool>(c.featurizer, "l2_normalize", tc.l2_normalize);
        return features::fit_tfidf(train, tc);
    }
    if (type == "ppmi") return features::fit_ppmi(train);
    return features::load_embeddings(c.embedding_paths);
}

json featurizer_artifact(const features::Featurizer& f) {
    if (const auto* t = std::get_if<features::TfidfModel>(&f)) return features::to_json(*t);
    if (const auto* p = std::get_if<features::PpmiModel>(&f)) return features::to_json(*p);
    return json{{"type", "embeddings"}, {"dim", std::get<features::EmbeddingSet>(f).dim}};
}

features::Featurizer load_featurizer(const RunConfig& cfg, const ComponentConfig& c) {
    const auto artifact = read_json_file(model_dir(cfg, c.name) / "featurizer.json");
    const auto type = artifact.at("type").get<std::string>();
    if (type == "tfidf") return features::tfidf_from_json(artifact);
    if (type == "ppmi") return features::ppmi_from_json(artifact);
    auto emb = features::load_embeddings(c.embedding_paths);
    if (emb.dim != artifact.at("dim").get<std::size_t>()) {
        throw Error("component '" + c.name + "': embedding dimension changed since fit");
    }
    return emb;
}

regress::RegressorModel fit_regressor(const json& spec, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const auto type = spec.at("type").get<std::string>();
    if (type == "ols") {
        regress::OlsConfig oc;
        oc.ridge_eps = get_or<double>(spec, "ridge_eps", 1e-6);
        oc.standardize = get_or<bool>(spec, "standardize", oc.standardize);
        oc.fit_intercept = get_or<bool>(spec, "fit_intercept", oc.fit_intercept);
        return regress::fit_ols(X, y, oc);
    }
    regress::ElasticNetConfig ec;
    ec.lambda1 = get_or<double>(spec, "lambda1", ec.lambda1);
    ec.lambda2 = get_or<double>(spec, "lambda2", ec.lambda2);
    ec.max_iter = get_or<int>(spec, "max_iter", ec.max_iter);
    ec.tol = get_or<double>(spec, "tol", ec.tol);
    ec.standardize = get_or<bool>(spec, "standardize", ec.standardize);
    ec.fit_intercept = get_or<bool>(spec, "fit_intercept", ec.fit_intercept);
    return regress::fit_elasticnet(X, y, ec);
}

regress::SoftmaxConfig softmax_config(const json& spec) {
    regress::SoftmaxConfig sc;
    sc.lr = get_or<double>(spec, "lr", sc.lr);
    sc.epochs = get_or<int>(spec, "epochs", sc.epochs);
    sc.l2 = get_or<double>(spec, "l2", 1e-4);
    return sc;
}

json config_snapshot(const RunConfig& cfg) {
    json snap = cfg.snapshot;
    snap.erase("output_dir");
    snap.erase("jobs");
    snap["seed"] = cfg.seed;
    return snap;
}

std::vector<std::string> component_names(const RunConfig& cfg) {
    std::vector<std::string> names;
    for (const auto& c : cfg.components) names.push_back(c.name);
    return names;
}

// Reorders a prediction set to corpus order, requiring exact coverage.
PredictionSet align_to(const PredictionSet& preds, const corpus::Corpus& corpus) {
    if (preds.size() != corpus.size()) {
        throw Error("'" + preds.name() + "' has " + std::to_string(preds.size()) + " predictions for " +
                    std::to_string(corpus.size()) + " documents");
    }
    std::vector<std::size_t> rows;
    rows.reserve(corpus.size());
    for (const auto& doc : corpus) {
        const auto pos = preds.position(doc.id);
        if (!pos) throw Error("'" + preds.name() + "' has no prediction for id '" + doc.id + "'");
        rows.push_back(*pos);
    }
    auto ids = corpus.ids();
    PredictionSet out;
    switch (preds.kind()) {
        case PredictionKind::class_id: {
            std::vector<std::int64_t> v;
            for (auto r : rows) v.push_back(preds.classes()[r]);
            out = PredictionSet::classes(preds.name(), std::move(ids), std::move(v));
            break;
        }
        case PredictionKind::probs: {
            std::vector<std::vector<double>> v;
            for (auto r : rows) v.push_back(preds.probs()[r]);
            out = PredictionSet::probabilities(preds.name(), std::move(ids), std::move(v));
            break;
        }
        case PredictionKind::scalar: {
            std::vector<double> v;
            for (auto r : rows) v.push_back(preds.scalars()[r]);
            out = PredictionSet::scalars(preds.name(), std::move(ids), std::move(v));
            break;
        }
    }
    out.dev_metric = preds.dev_metric;
    return out;
}

PredictionSet load_component_predictions(const RunConfig& cfg, const ComponentConfig& c, const std::string& split) {
    const auto path = prediction_path(cfg, split, c.name);
    if (!fs::is_regular_file(path)) {
        throw ConfigError("no predictions for component '" + c.name + "' on split '" + split + "' (run `mgt predict --split " +
                          split + "` first)");
    }
    return load_predictions(path, component_kind(cfg, c), c.name);
}

double component_metric(const RunConfig& cfg, const PredictionSet& preds, const corpus::Corpus& gold) {
    return cfg.task == Task::boundary ? boundary::evaluate_boundary(preds, gold) : eval::accuracy(preds, gold);
}

// ---- commands -------------------------------------------------------------

int cmd_preprocess(const fs::path& in_path, const fs::path& out_path, corpus::CleanMode mode, std::ostream& log) {
    std::ifstream in(in_path);
    if (!in) throw ConfigError("cannot open input file '" + in_path.string() + "'");
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    const fs::path tmp = out_path.string() + ".tmp";
    std::size_t written = 0;
    try {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open output file '" + out_path.string() + "'");
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.find_first_not_of(" \t") == std::string::npos) continue;
            json obj;
            try {
                obj = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ParseError(std::string("malformed JSON: ") + e.what(), lineno);
            }
            if (!obj.is_object() || !obj.contains("text") || !obj.at("text").is_string()) {
                throw ParseError("expected an object with a string \"text\"", lineno);
            }
            obj["text"] = corpus::clean_text(obj.at("text").get<std::string>(), mode);
            out << obj.dump() << '\n';
            ++written;
        }
        if (!out) throw Error("failed writing '" + out_path.string() + "'");
    } catch (...) {
        fs::remove(tmp);
        throw;
    }
    fs::rename(tmp, out_path);
    log << "preprocess: " << written << " documents cleaned (" << corpus::to_string(mode) << ") -> " << out_path.string()
        << '\n';
    return 0;
}

int cmd_fit(const RunConfig& cfg, std::ostream& log) {
    const auto train = load_split(cfg, "train");
    if (train.empty()) throw ConfigError("training split is empty");
    const auto labels = train.labels();

    json manifest{{"task", to_string(cfg.task)}, {"seed", cfg.seed}, {"cleaning", corpus::to_string(cfg.cleaning)},
                  {"train_documents", train.size()}, {"config", config_snapshot(cfg)}};
    json comps = json::array();

    // Components with identical featurizer specs share one fitted featurizer.
    std::map<std::string, std::shared_ptr<const features::Featurizer>> fitted;
    std::map<std::string, std::shared_ptr<const features::FeatureMatrix>> matrices;

    for (const auto& c : cfg.components) {
        if (c.external) {
            comps.push_back({{"name", c.name}, {"type", "external"}});
            continue;
        }
        const auto key = c.featurizer.dump();
        if (!fitted.contains(key)) {
            auto f = std::make_shared<const features::Featurizer>(fit_featurizer(c, train));
            matrices[key] = std::make_shared<const features::FeatureMatrix>(features::featurize(train, *f, cfg.jobs));
            fitted[key] = std::move(f);
        }
        const auto& X = matrices.at(key)->values;
        const auto dir = model_dir(cfg, c.name);
        write_json_file(dir / "featurizer.json", featurizer_artifact(*fitted.at(key)));

        json entry{{"name", c.name},
                   {"featurizer", c.featurizer.at("type")},
                   {"model", c.model.at("type")},
                   {"features", X.cols()}};
        if (cfg.task == Task::boundary) {
            Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
            for (std::size_t i = 0; i < labels.size(); ++i) y[static_cast<Eigen::Index>(i)] = static_cast<double>(labels[i]);
            const auto model = fit_regressor(c.model, X, y);
            write_json_file(dir / "model.json", regress::to_json(model));
            entry["iterations"] = model.fit_meta.iterations;
            entry["objective"] = model.fit_meta.objective;
            entry["converged"] = model.fit_meta.converged;
        } else {
            const auto model =
                regress::fit_softmax(X, labels, softmax_config(c.model), corpus::class_count(cfg.scheme()));
            write_json_file(dir / "model.json", regress::to_json(model));
        }
        comps.push_back(std::move(entry));
        log << "fit: " << c.name << " (" << X.cols() << " features)\n";
    }
    manifest["components"] = std::move(comps);
    write_json_file(cfg.output_dir / "manifest.json", manifest);
    log << "fit: wrote " << cfg.components.size() << " components to " << cfg.output_dir.string() << '\n';
    return 0;
}

int cmd_predict(const RunConfig& cfg, const std::string& split, std::ostream& log) {
    const auto docs = load_split(cfg, split);
    const auto ids = docs.ids();
    for (const auto& c : cfg.components) {
        PredictionSet preds;
        if (c.external) {
            const auto it = std::find_if(c.external_predictions.begin(), c.external_predictions.end(),
                                         [&](const auto& e) { return e.first == split; });
            if (it == c.external_predictions.end()) {
                throw ConfigError("component '" + c.name + "' has no prediction file for split '" + split + "'");
            }
            preds = align_to(load_predictions(it->second, c.external_kind, c.name), docs);
        } else {
            const auto dir = model_dir(cfg, c.name);
            if (!fs::is_regular_file(dir / "model.json")) {
                throw ConfigError("component '" + c.name + "' is not fitted (run `mgt fit` first)");
            }
            const auto featurizer = std::make_shared<const features::Featurizer>(load_featurizer(cfg, c));
            const auto model_json = read_json_file(dir / "model.json");
            if (cfg.task == Task::boundary) {
                const boundary::Component component{c.name, featurizer, regress::regressor_from_json(model_json)};
                auto raw = PredictionSet::scalars(c.name, ids, boundary::predict_raw(component, docs, cfg.jobs));
                preds = boundary::postprocess(raw, docs, {cfg.snap, cfg.clip});
            } else {
                const auto model = regress::classifier_from_json(model_json);
                const auto X = features::featurize(docs, *featurizer, cfg.jobs);
                const Eigen::MatrixXd P = regress::predict_proba(model, X.values);
                std::vector<std::vector<double>> rows(docs.size());
                for (Eigen::Index i = 0; i < P.rows(); ++i) {
                    auto& row = rows[static_cast<std::size_t>(i)];
                    for (Eigen::Index k = 0; k < P.cols(); ++k) row.push_back(P(i, k));
                }
                preds = PredictionSet::probabilities(c.name, ids, std::move(rows));
            }
        }
        write_predictions(preds, prediction_path(cfg, split, c.name));
        log << "predict: " << c.name << " on " << split << " (" << preds.size() << " documents)\n";
    }
    return 0;
}

int cmd_ensemble_config(const RunConfig& cfg, const std::string& target, std::ostream& log) {
    const auto gold = load_split(cfg, cfg.weight_split);
    const auto target_docs = load_split(cfg, target);

    std::vector<double> metrics;
    std::vector<PredictionSet> dev_sets;
    std::vector<PredictionSet> target_sets;
    for (const auto& c : cfg.components) {
        dev_sets.push_back(load_component_predictions(cfg, c, cfg.weight_split));
        metrics.push_back(component_metric(cfg, dev_sets.back(), gold));
        target_sets.push_back(align_to(load_component_predictions(cfg, c, target), target_docs));
    }

    const bool boundary_task = cfg.task == Task::boundary;
    const auto weights =
        boundary_task ? ensemble::inverse_mae_weights(metrics) : ensemble::accuracy_weights(dev_sets, gold);
    const ensemble::EnsembleSpec spec{component_names(cfg), weights, cfg.rule};

    PredictionSet combined = ensemble::combine(target_sets, spec, "ensemble");
    if (boundary_task) combined = boundary::finalize(combined, target_docs, cfg.clip);
    write_predictions(combined, prediction_path(cfg, target, "ensemble"));

    json comps = json::array();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        comps.push_back({{"name", spec.components[i]}, {"dev_metric", metrics[i]}, {"weight", weights[i]}});
    }
    write_json_file(weights_path(cfg), json{{"rule", ensemble::to_string(cfg.rule)},
                                            {"weight_split", cfg.weight_split},
                                            {"metric", boundary_task ? "mae" : "accuracy"},
                                            {"components", comps}});
    log << "ensemble: " << weights.size() << " components, weights from " << cfg.weight_split << " -> " << target << '\n';
    return 0;
}

int cmd_ensemble_spec(const fs::path& spec_path, const std::optional<fs::path>& gold_path, const std::string& task_name,
                      const std::optional<fs::path>& corpus_path, const fs::path& out_path,
                      const std::optional<fs::path>& weights_out, std::ostream& log) {
    const auto file = ensemble::load_ensemble_file(spec_path);
    const Task task = parse_task(task_name);
    const bool boundary_task = task == Task::boundary;
    RunConfig shim;
    shim.task = task;

    std::vector<PredictionSet> sets;
    std::vector<double> metrics;
    bool all_given = true;
    for (const auto& ref : file.components) {
        if ((ref.kind == PredictionKind::scalar) != boundary_task) {
            throw ConfigError("component '" + ref.name + "': kind " + std::string(to_string(ref.kind)) + " does not fit task " +
                              task_name);
        }
        sets.push_back(load_predictions(ref.path, ref.kind, ref.name));
        all_given = all_given && ref.dev_metric.has_value();
    }

    if (all_given) {
        for (const auto& ref : file.components) metrics.push_back(*ref.dev_metric);
    } else {
        if (!gold_path) throw ConfigError("ensemble: components without dev_metric need --gold and a dev_path");
        const auto gold = corpus::load_jsonl(*gold_path, shim.scheme());
        for (const auto& ref : file.components) {
            if (ref.dev_metric) {
                metrics.push_back(*ref.dev_metric);
                continue;
            }
            if (!ref.dev_path) throw ConfigError("component '" + ref.name + "' has neither dev_metric nor dev_path");
            metrics.push_back(component_metric(shim, load_predictions(*ref.dev_path, ref.kind, ref.name), gold));
        }
    }

    std::vector<double> weights;
    if (boundary_task) {
        weights = ensemble::inverse_mae_weights(metrics);
    } else {
        for (std::size_t i = 0; i < metrics.size(); ++i) {
            if (!(metrics[i] > 0.0)) throw Error("zero weight component '" + file.components[i].name + "' (dev accuracy 0)");
        }
        weights = metrics;
    }
    std::vector<std::string> names;
    for (const auto& ref : file.components) names.push_back(ref.name);
    const ensemble::EnsembleSpec spec{names, weights, file.rule};

    PredictionSet combined = ensemble::combine(sets, spec, "ensemble");
    if (boundary_task) {
        if (corpus_path) {
            combined = boundary::finalize(combined, corpus::load_jsonl(*corpus_path, corpus::LabelScheme::boundary), true);
        } else {
            std::vector<double> rounded;
            for (double v : combined.scalars()) rounded.push_back(static_cast<double>(boundary::round_index(v)));
            combined = PredictionSet::scalars("ensemble", combined.ids(), std::move(rounded));
        }
    }
    write_predictions(combined, out_path);

    json comps = json::array();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        comps.push_back({{"name", names[i]}, {"dev_metric", metrics[i]}, {"weight", weights[i]}});
    }
    const json summary{{"rule", ensemble::to_string(file.rule)}, {"metric", boundary_task ? "mae" : "accuracy"}, {"components", comps}};
    if (weights_out) write_json_file(*weights_out, summary);
    log << summary.dump() << '\n';
    return 0;
}

int cmd_evaluate_config(const RunConfig& cfg, const std::string& split, std::ostream& out) {
    const auto gold = load_split(cfg, split);
    const bool boundary_task = cfg.task == Task::boundary;

    eval::RunReport report;
    report.task = std::string(to_string(cfg.task));
    report.split = split;
    report.metric = boundary_task ? "mae" : "accuracy";
    report.config = config_snapshot(cfg);

    std::optional<PredictionSet> confusion_source;
    for (const auto& c : cfg.components) {
        const auto preds = load_component_predictions(cfg, c, split);
        report.components.push_back({c.name, component_metric(cfg, preds, gold)});
        if (!confusion_source) confusion_source = preds;
    }

    const auto ens_path = prediction_path(cfg, split, "ensemble");
    if (cfg.components.size() > 1 && fs::is_regular_file(ens_path) && fs::is_regular_file(weights_path(cfg))) {
        const auto ens = load_predictions(ens_path, boundary_task ? PredictionKind::scalar : PredictionKind::class_id, "ensemble");
        const auto wj = read_json_file(weights_path(cfg));
        eval::EnsembleMetric em;
        for (const auto& c : wj.at("components")) {
            em.components.push_back(c.at("name").get<std::string>());
            em.weights.push_back(c.at("weight").get<double>());
        }
        em.metric = component_metric(cfg, ens, gold);
        report.ensemble = std::move(em);
        confusion_source = ens;
    }
    if (!boundary_task && confusion_source) {
        report.confusion = eval::confusion(*confusion_source, gold, corpus::class_count(cfg.scheme()));
    }

    eval::emit_report(report, report_path(cfg, split));
    for (const auto& c : report.components) out << c.name << '\t' << report.metric << '\t' << c.metric << '\n';
    if (report.ensemble) out << "ensemble\t" << report.metric << '\t' << report.ensemble->metric << '\n';
    return 0;
}

int cmd_evaluate_files(const fs::path& pred_path, const fs::path& gold_path, const std::string& task_name,
                       const std::string& kind_name, const std::optional<fs::path>& out_path, std::ostream& out) {
    RunConfig shim;
    shim.task = parse_task(task_name);
    const bool boundary_task = shim.task == Task::boundary;
    const auto kind = kind_name.empty() ? (boundary_task ? PredictionKind::scalar : PredictionKind::class_id)
                                        : parse_prediction_kind(kind_name);
    const auto gold = corpus::load_jsonl(gold_path, shim.scheme());
    const auto preds = load_predictions(pred_path, kind);

    eval::RunReport report;
    report.task = task_name;
    report.split = gold_path.stem().string();
    report.metric = boundary_task ? "mae" : "accuracy";
    report.components.push_back({preds.name(), component_metric(shim, preds, gold)});
    if (!boundary_task) report.confusion = eval::confusion(preds, gold, corpus::class_count(shim.scheme()));
    if (out_path) eval::emit_report(report, *out_path);
    out << preds.name() << '\t' << report.metric << '\t' << report.components.front().metric << '\n';
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Machine-generated text detection: featurize, regress, ensemble and evaluate", "mgt"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::int64_t> seed;
    std::optional<unsigned> jobs;
    std::string out_dir;
    app.add_option("--config", config_path, "Run config (JSON)");
    app.add_option("--seed", seed, "Override the config seed");
    app.add_option("--jobs", jobs, "Worker threads for per-document work")->check(CLI::Range(1u, 1024u));
    app.add_option("--out-dir", out_dir, "Override the config output_dir");

    auto* pre = app.add_subcommand("preprocess", "Clean the text field of a JSONL corpus");
    std::string pre_in, pre_out, pre_mode = "full";
    pre->add_option("--in", pre_in, "Input JSONL")->required();
    pre->add_option("--out", pre_out, "Output JSONL")->required();
    pre->add_option("--mode", pre_mode, "full | links_only | none")->check(CLI::IsMember({"full", "links_only", "none"}));

    auto* fit = app.add_subcommand("fit", "Fit every configured component on the train split");

    auto* predict = app.add_subcommand("predict", "Write per-component predictions for a split");
    std::string predict_split = "test";
    predict->add_option("--split", predict_split, "Split name from the config data section");

    auto* ens = app.add_subcommand("ensemble", "Weight components on the dev split and combine a target split");
    std::string ens_target = "test", ens_spec, ens_task = "boundary", ens_out;
    std::optional<std::string> ens_gold, ens_corpus, ens_weights_out;
    ens->add_option("--target", ens_target, "Split to combine (config mode)");
    ens->add_option("--spec", ens_spec, "Ensemble spec file (standalone mode)");
    ens->add_option("--gold", ens_gold, "Dev gold corpus for computing weights (standalone mode)");
    ens->add_option("--task", ens_task, "binary | multiway | boundary (standalone mode)");
    ens->add_option("--corpus", ens_corpus, "Target corpus used to clip boundary indices (standalone mode)");
    ens->add_option("--out", ens_out, "Combined predictions JSONL (standalone mode)");
    ens->add_option("--weights-out", ens_weights_out, "Write weights JSON (standalone mode)");

    auto* evaluate = app.add_subcommand("evaluate", "Score predictions and write a report");
    std::string eval_split = "test", eval_pred, eval_gold, eval_task = "boundary", eval_kind;
    std::optional<std::string> eval_out;
    evaluate->add_option("--split", eval_split, "Split to evaluate (config mode)");
    evaluate->add_option("--pred", eval_pred, "Prediction JSONL (standalone mode)");
    evaluate->add_option("--gold", eval_gold, "Gold corpus JSONL (standalone mode)");
    evaluate->add_option("--task", eval_task, "binary | multiway | boundary (standalone mode)");
    evaluate->add_option("--kind", eval_kind, "class | probs | scalar (standalone mode)");
    evaluate->add_option("--out", eval_out, "Report JSON path (standalone mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "mgt: " << e.what() << '\n';
        return 2;
    }

    const auto config = [&]() {
        if (config_path.empty()) throw ConfigError("--config is required for this command");
        auto cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (jobs) cfg.jobs = *jobs;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        return cfg;
    };

    try {
        if (pre->parsed()) return cmd_preprocess(pre_in, pre_out, corpus::parse_clean_mode(pre_mode), err);
        if (fit->parsed()) return cmd_fit(config(), err);
        if (predict->parsed()) return cmd_predict(config(), predict_split, err);
        if (ens->parsed()) {
            if (!ens_spec.empty()) {
                if (ens_out.empty()) throw ConfigError("--out is required with --spec");
                const auto opt_path = [](const std::optional<std::string>& s) {
                    return s ? std::optional<fs::path>(*s) : std::nullopt;
                };
                return cmd_ensemble_spec(ens_spec, opt_path(ens_gold), ens_task, opt_path(ens_corpus), ens_out,
                                         opt_path(ens_weights_out), err);
            }
            return cmd_ensemble_config(config(), ens_target, err);
        }
        if (evaluate->parsed()) {
            if (!eval_pred.empty()) {
                if (eval_gold.empty()) throw ConfigError("--gold is required with --pred");
                return cmd_evaluate_files(eval_pred, eval_gold, eval_task, eval_kind,
                                          eval_out ? std::optional<fs::path>(*eval_out) : std::nullopt, out);
            }
            return cmd_evaluate_config(config(), eval_split, out);
        }
    } catch (const ConfigError& e) {
        err << "mgt: config error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "mgt: input error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "mgt: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace mgt::cli
