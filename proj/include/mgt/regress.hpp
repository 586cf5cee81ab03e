#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace mgt::regress {

enum class RegressorKind { ols, elasticnet };

RegressorKind parse_regressor_kind(std::string_view name);
std::string_view to_string(RegressorKind kind);

/// Per-column affine map frozen at fit: x' = (x - mean) / scale.
/// Zero-variance columns keep scale 1.
struct Standardization {
    bool enabled = false;
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    static Standardization fit(const Eigen::MatrixXd& X);
    static Standardization identity(Eigen::Index cols);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& X) const;
};

struct OlsConfig {
    double ridge_eps = 0.0;
    bool standardize = true;
    bool fit_intercept = true;
};

/// Minimizes 1/2 ||y - Xw - b||^2 + lambda1 ||w||_1 + lambda2/2 ||w||_2^2.
struct ElasticNetConfig {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    int max_iter = 1000;
    double tol = 1e-6;
    bool standardize = true;
    bool fit_intercept = true;
};

struct FitMeta {
    int iterations = 0;
    double objective = 0.0;
    bool converged = true;
    /// Objective before the first sweep followed by its value after every sweep.
    /// Not persisted.
    std::vector<double> objective_trace;
};

/// Linear boundary regressor. `weights` live in the standardized feature space;
/// predict() applies the stored standardization first.
struct RegressorModel {
    RegressorKind kind = RegressorKind::ols;
    Eigen::VectorXd weights;
    double intercept = 0.0;
    Standardization standardization;
    FitMeta fit_meta;
    nlohmann::json config;

    /// Coefficients and intercept on the original (unstandardized) features.
    Eigen::VectorXd raw_coefficients() const;
    double raw_intercept() const;
};

/// Least squares via the normal equations of the intercept-augmented system,
/// with ridge_eps on the diagonal (intercept excluded). When the design has more
/// columns than rows and ridge_eps > 0 the equivalent n x n dual system is solved.
/// Throws NumericError on a singular system.
RegressorModel fit_ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const OlsConfig& config = {});

/// Cyclic coordinate descent with soft-thresholding; the intercept is reset to
/// the mean residual at the start of every sweep. Stops once the largest
/// coefficient change in a sweep drops below tol, or after max_iter sweeps.
RegressorModel fit_elasticnet(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const ElasticNetConfig& config = {});

Eigen::VectorXd predict(const RegressorModel& model, const Eigen::MatrixXd& X);

double soft_threshold(double rho, double lambda);

double elasticnet_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                            double b, double lambda1, double lambda2);

nlohmann::json to_json(const RegressorModel& model);
RegressorModel regressor_from_json(const nlohmann::json& j);

// Softmax classifier used to produce native class predictions for ensembles.

struct SoftmaxConfig {
    double lr = 0.5;
    int epochs = 200;
    double l2 = 0.0;
};

/// weights is classes x features.
struct ClassifierModel {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;

    Eigen::Index classes() const noexcept { return weights.rows(); }
};

struct SoftmaxGradient {
    Eigen::MatrixXd weights;
    Eigen::VectorXd bias;
};

/// Mean cross-entropy plus l2/2 ||W||^2 (biases unpenalized).
double softmax_loss(const ClassifierModel& model, const Eigen::MatrixXd& X, std::span<const std::int64_t> y,
                    double l2);
SoftmaxGradient softmax_gradient(const ClassifierModel& model, const Eigen::MatrixXd& X,
                                 std::span<const std::int64_t> y, double l2);

/// Full-batch gradient descent from zero weights. Rows are visited in a
/// canonical order, so permuting the training rows gives a bit-identical model.
/// `classes` = 0 infers max(y) + 1.
ClassifierModel fit_softmax(const Eigen::MatrixXd& X, std::span<const std::int64_t> y,
                            const SoftmaxConfig& config = {}, int classes = 0);

/// Rows sum to 1; computed with max-shifted exponentials.
Eigen::MatrixXd predict_proba(const ClassifierModel& model, const Eigen::MatrixXd& X);

nlohmann::json to_json(const ClassifierModel& model);
ClassifierModel classifier_from_json(const nlohmann::json& j);

}  // namespace mgt::regress
