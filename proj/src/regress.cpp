#include "mgt/regress.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgt/error.hpp"

namespace mgt::regress {

using nlohmann::json;

namespace {

constexpr double kSingularRcond = 1e-12;

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void require_finite(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::string_view who) {
    if (!X.allFinite()) throw NumericError(std::string(who) + ": non-finite feature values");
    if (!y.allFinite()) throw NumericError(std::string(who) + ": non-finite targets");
}

void require_shape(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::string_view who) {
    if (X.rows() == 0) throw Error(std::string(who) + ": no training rows");
    if (X.rows() != y.size()) {
        throw Error(std::string(who) + ": " + std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) +
                    " targets");
    }
}

}  // namespace

RegressorKind parse_regressor_kind(std::string_view name) {
    if (name == "ols" || name == "linear") return RegressorKind::ols;
    if (name == "elasticnet") return RegressorKind::elasticnet;
    throw ConfigError("unknown regressor '" + std::string(name) + "' (expected ols or elasticnet)");
}

std::string_view to_string(RegressorKind kind) { return kind == RegressorKind::ols ? "ols" : "elasticnet"; }

Standardization Standardization::fit(const Eigen::MatrixXd& X) {
    Standardization s;
    s.enabled = true;
    const double n = static_cast<double>(X.rows());
    s.mean = X.colwise().sum().transpose() / n;
    s.scale.resize(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double var = (X.col(j).array() - s.mean[j]).square().sum() / n;
        const double sd = std::sqrt(var);
        s.scale[j] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Standardization Standardization::identity(Eigen::Index cols) {
    Standardization s;
    s.mean = Eigen::VectorXd::Zero(cols);
    s.scale = Eigen::VectorXd::Ones(cols);
    return s;
}

Eigen::MatrixXd Standardization::apply(const Eigen::MatrixXd& X) const {
    if (!enabled) return X;
    return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::VectorXd RegressorModel::raw_coefficients() const {
    return weights.array() / standardization.scale.array();
}

double RegressorModel::raw_intercept() const { return intercept - raw_coefficients().dot(standardization.mean); }

RegressorModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const OlsConfig& config) {
    require_shape(X, y, "fit_ols");
    require_finite(X, y, "fit_ols");
    if (!(config.ridge_eps >= 0.0)) throw ConfigError("fit_ols: ridge_eps must be >= 0");

    RegressorModel model;
    model.kind = RegressorKind::ols;
    model.config = json{{"ridge_eps", config.ridge_eps},
                        {"standardize", config.standardize},
                        {"fit_intercept", config.fit_intercept}};
    model.standardization = config.standardize ? Standardization::fit(X) : Standardization::identity(X.cols());
    const Eigen::MatrixXd Xs = model.standardization.apply(X);

    const Eigen::Index n = Xs.rows();
    const Eigen::Index p = Xs.cols();
    const Eigen::Index unknowns = p + (config.fit_intercept ? 1 : 0);
    const char* advice = "fit_ols: singular normal equations; use ridge_eps > 0";

    if (unknowns > n && config.ridge_eps > 0.0) {
        // Dual ridge: w = Xc^T (Xc Xc^T + eps I)^-1 yc on centered data.
        Eigen::VectorXd x_mean = Eigen::VectorXd::Zero(p);
        double y_mean = 0.0;
        if (config.fit_intercept) {
            x_mean = Xs.colwise().mean().transpose();
            y_mean = y.mean();
        }
        const Eigen::MatrixXd Xc = Xs.rowwise() - x_mean.transpose();
        const Eigen::VectorXd yc = y.array() - y_mean;
        Eigen::MatrixXd K = Xc * Xc.transpose();
        K.diagonal().array() += config.ridge_eps;
        const Eigen::LDLT<Eigen::MatrixXd> solver(K);
        if (solver.info() != Eigen::Success) throw NumericError(advice);
        model.weights = Xc.transpose() * solver.solve(yc);
        model.intercept = config.fit_intercept ? y_mean - x_mean.dot(model.weights) : 0.0;
    } else {
        if (unknowns > n) throw NumericError(advice);
        Eigen::MatrixXd A(n, unknowns);
        A.leftCols(p) = Xs;
        if (config.fit_intercept) A.col(p).setOnes();
        Eigen::MatrixXd G = A.transpose() * A;
        G.diagonal().head(p).array() += config.ridge_eps;
        const Eigen::VectorXd rhs = A.transpose() * y;
        const Eigen::LDLT<Eigen::MatrixXd> solver(G);
        // rcond() alone misses exactly zero pivots, so check the pivot spread too.
        const Eigen::VectorXd pivots = solver.vectorD().cwiseAbs();
        if (solver.info() != Eigen::Success || solver.rcond() < kSingularRcond ||
            pivots.minCoeff() <= kSingularRcond * pivots.maxCoeff()) {
            throw NumericError(advice);
        }
        const Eigen::VectorXd sol = solver.solve(rhs);
        model.weights = sol.head(p);
        model.intercept = config.fit_intercept ? sol[p] : 0.0;
    }

    if (!model.weights.allFinite() || !std::isfinite(model.intercept)) throw NumericError(advice);
    const Eigen::VectorXd resid = (y - Xs * model.weights).array() - model.intercept;
    model.fit_meta.iterations = 1;
    model.fit_meta.objective = 0.5 * resid.squaredNorm();
    model.fit_meta.objective_trace = {model.fit_meta.objective};
    return model;
}

double soft_threshold(double rho, double lambda) {
    if (rho > lambda) return rho - lambda;
    if (rho < -lambda) return rho + lambda;
    return 0.0;
}

double elasticnet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w, double b,
                            double lambda1, double lambda2) {
    const Eigen::VectorXd r = (y - X * w).array() - b;
    return 0.5 * r.squaredNorm() + lambda1 * w.lpNorm<1>() + 0.5 * lambda2 * w.squaredNorm();
}

RegressorModel fit_elasticnet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ElasticNetConfig& config) {
    require_shape(X, y, "fit_elasticnet");
    require_finite(X, y, "fit_elasticnet");
    if (!(config.lambda1 >= 0.0) || !(config.lambda2 >= 0.0)) {
        throw ConfigError("fit_elasticnet: lambda1 and lambda2 must be >= 0");
    }
    if (config.max_iter < 1) throw ConfigError("fit_elasticnet: max_iter must be >= 1");
    if (!(config.tol > 0.0)) throw ConfigError("fit_elasticnet: tol must be > 0");

    RegressorModel model;
    model.kind = RegressorKind::elasticnet;
    model.config = json{{"lambda1", config.lambda1},         {"lambda2", config.lambda2},
                        {"max_iter", config.max_iter},       {"tol", config.tol},
                        {"standardize", config.standardize}, {"fit_intercept", config.fit_intercept}};
    model.standardization = config.standardize ? Standardization::fit(X) : Standardization::identity(X.cols());
    const Eigen::MatrixXd Xs = model.standardization.apply(X);

    const Eigen::Index p = Xs.cols();
    const Eigen::VectorXd col_sq = Xs.colwise().squaredNorm().transpose();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    double b = 0.0;
    Eigen::VectorXd r = y;

    auto& meta = model.fit_meta;
    meta.objective_trace.reserve(static_cast<std::size_t>(config.max_iter) + 1);
    meta.objective_trace.push_back(elasticnet_objective(Xs, y, w, b, config.lambda1, config.lambda2));
    meta.converged = false;

    for (int sweep = 1; sweep <= config.max_iter; ++sweep) {
        double max_change = 0.0;
        if (config.fit_intercept) {
            const double shift = r.mean();
            b += shift;
            r.array() -= shift;
            max_change = std::abs(shift);
        }
        for (Eigen::Index j = 0; j < p; ++j) {
            const double denom = col_sq[j] + config.lambda2;
            if (denom <= 0.0) continue;
            const double old = w[j];
            const double rho = Xs.col(j).dot(r) + col_sq[j] * old;
            const double updated = soft_threshold(rho, config.lambda1) / denom;
            if (updated != old) {
                r.noalias() -= (updated - old) * Xs.col(j);
                w[j] = updated;
                max_change = std::max(max_change, std::abs(updated - old));
            }
        }
        // Refresh the residual so rounding drift does not accumulate.
        r = (y - Xs * w).array() - b;
        meta.objective_trace.push_back(0.5 * r.squaredNorm() + config.lambda1 * w.lpNorm<1>() +
                                       0.5 * config.lambda2 * w.squaredNorm());
        meta.iterations = sweep;
        if (max_change < config.tol) {
            meta.converged = true;
            break;
        }
    }

    model.weights = std::move(w);
    model.intercept = b;
    meta.objective = meta.objective_trace.back();
    if (!model.weights.allFinite() || !std::isfinite(model.intercept)) {
        throw NumericError("fit_elasticnet: solver produced non-finite coefficients");
    }
    return model;
}

Eigen::VectorXd predict(const RegressorModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.weights.size()) {
        throw Error("predict: feature dimension " + std::to_string(X.cols()) + " does not match model dimension " +
                    std::to_string(model.weights.size()));
    }
    Eigen::VectorXd out = (model.standardization.apply(X) * model.weights).array() + model.intercept;
    if (!out.allFinite()) throw NumericError("predict: non-finite prediction");
    return out;
}

json to_json(const RegressorModel& model) {
    return json{{"kind", to_string(model.kind)},
                {"weights", to_std(model.weights)},
                {"intercept", model.intercept},
                {"standardization",
                 {{"enabled", model.standardization.enabled},
                  {"mean", to_std(model.standardization.mean)},
                  {"scale", to_std(model.standardization.scale)}}},
                {"fit_meta",
                 {{"iterations", model.fit_meta.iterations},
                  {"objective", model.fit_meta.objective},
                  {"converged", model.fit_meta.converged}}},
                {"config", model.config}};
}

RegressorModel regressor_from_json(const json& j) {
    try {
        RegressorModel m;
        m.kind = parse_regressor_kind(j.at("kind").get<std::string>());
        m.weights = to_eigen(j.at("weights").get<std::vector<double>>());
        m.intercept = j.at("intercept").get<double>();
        const auto& s = j.at("standardization");
        m.standardization.enabled = s.at("enabled").get<bool>();
        m.standardization.mean = to_eigen(s.at("mean").get<std::vector<double>>());
        m.standardization.scale = to_eigen(s.at("scale").get<std::vector<double>>());
        const auto& meta = j.at("fit_meta");
        m.fit_meta.iterations = meta.at("iterations").get<int>();
        m.fit_meta.objective = meta.at("objective").get<double>();
        m.fit_meta.converged = meta.at("converged").get<bool>();
        m.config = j.at("config");
        if (m.standardization.mean.size() != m.weights.size() || m.standardization.scale.size() != m.weights.size()) {
            throw ParseError("regressor: standardization size does not match weights");
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid regressor model: ") + e.what());
    }
}

namespace {

Eigen::MatrixXd softmax_rows(Eigen::MatrixXd logits) {
    for (Eigen::Index i = 0; i < logits.rows(); ++i) {
        auto row = logits.row(i);
        row.array() -= row.maxCoeff();
        row = row.array().exp().matrix();
        row /= row.sum();
    }
    return logits;
}

void check_classes(const ClassifierModel& model, const Eigen::MatrixXd& X, std::span<const std::int64_t> y) {
    if (X.rows() != static_cast<Eigen::Index>(y.size())) throw Error("softmax: row/label count mismatch");
    for (auto c : y) {
        if (c < 0 || c >= model.classes()) throw Error("softmax: label " + std::to_string(c) + " out of range");
    }
}

}  // namespace

Eigen::MatrixXd predict_proba(const ClassifierModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.weights.cols()) {
        throw Error("predict_proba: feature dimension " + std::to_string(X.cols()) +
                    " does not match model dimension " + std::to_string(model.weights.cols()));
    }
    Eigen::MatrixXd logits = X * model.weights.transpose();
    logits.rowwise() += model.bias.transpose();
    return softmax_rows(std::move(logits));
}

double softmax_loss(const ClassifierModel& model, const Eigen::MatrixXd& X, std::span<const std::int64_t> y,
                    double l2) {
    check_classes(model, X, y);
    const Eigen::MatrixXd P = predict_proba(model, X);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) loss -= std::log(P(i, y[static_cast<std::size_t>(i)]));
    return loss / static_cast<double>(X.rows()) + 0.5 * l2 * model.weights.squaredNorm();
}

SoftmaxGradient softmax_gradient(const ClassifierModel& model, const Eigen::MatrixXd& X,
                                 std::span<const std::int64_t> y, double l2) {
    check_classes(model, X, y);
    Eigen::MatrixXd G = predict_proba(model, X);
    for (Eigen::Index i = 0; i < X.rows(); ++i) G(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    G /= static_cast<double>(X.rows());
    SoftmaxGradient grad;
    grad.weights = G.transpose() * X + l2 * model.weights;
    grad.bias = G.colwise().sum().transpose();
    return grad;
}

ClassifierModel fit_softmax(const Eigen::MatrixXd& X, std::span<const std::int64_t> y, const SoftmaxConfig& config,
                            int classes) {
    if (X.rows() == 0 || X.rows() != static_cast<Eigen::Index>(y.size())) {
        throw Error("fit_softmax: need matching, non-empty rows and labels");
    }
    if (!X.allFinite()) throw NumericError("fit_softmax: non-finite feature values");
    if (!(config.lr > 0.0) || config.epochs < 0 || !(config.l2 >= 0.0)) {
        throw ConfigError("fit_softmax: need lr > 0, epochs >= 0, l2 >= 0");
    }
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    if (*lo < 0) throw Error("fit_softmax: negative class label");
    if (*lo == *hi) throw Error("fit_softmax: training data contains a single class");
    const auto k = std::max<std::int64_t>(classes, *hi + 1);

    // Canonical row order: by label, then lexicographically by feature values.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const auto ya = y[static_cast<std::size_t>(a)];
        const auto yb = y[static_cast<std::size_t>(b)];
        if (ya != yb) return ya < yb;
        for (Eigen::Index j = 0; j < X.cols(); ++j) {
            if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
        }
        return false;
    });
    Eigen::MatrixXd Xc(X.rows(), X.cols());
    std::vector<std::int64_t> yc(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        Xc.row(static_cast<Eigen::Index>(i)) = X.row(order[i]);
        yc[i] = y[static_cast<std::size_t>(order[i])];
    }

    ClassifierModel model;
    model.weights = Eigen::MatrixXd::Zero(k, X.cols());
    model.bias = Eigen::VectorXd::Zero(k);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto grad = softmax_gradient(model, Xc, yc, config.l2);
        model.weights -= config.lr * grad.weights;
        model.bias -= config.lr * grad.bias;
    }
    if (!model.weights.allFinite() || !model.bias.allFinite()) {
        throw NumericError("fit_softmax: diverged; lower the learning rate");
    }
    return model;
}

json to_json(const ClassifierModel& model) {
    json rows = json::array();
    for (Eigen::Index k = 0; k < model.weights.rows(); ++k) rows.push_back(to_std(model.weights.row(k).transpose()));
    return json{{"kind", "softmax"}, {"weights", rows}, {"bias", to_std(model.bias)}};
}

ClassifierModel classifier_from_json(const json& j) {
    try {
        ClassifierModel m;
        const auto rows = j.at("weights").get<std::vector<std::vector<double>>>();
        m.bias = to_eigen(j.at("bias").get<std::vector<double>>());
        if (rows.size() < 2 || rows.size() != static_cast<std::size_t>(m.bias.size())) {
            throw ParseError("classifier: need >= 2 classes with matching biases");
        }
        m.weights.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].size() != rows.front().size()) throw ParseError("classifier: ragged weight matrix");
            m.weights.row(static_cast<Eigen::Index>(k)) = to_eigen(rows[k]).transpose();
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid classifier model: ") + e.what());
    }
}

}  // namespace mgt::regress
