#include "uplift/models.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "json.hpp"

#include "uplift/fsio.hpp"
#include "uplift/rng.hpp"

namespace uplift {

namespace {

constexpr double kProbFloor = 1e-15;

double stable_sigmoid(double z) {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        p = e / (1.0 + e);
    }
    return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

// log(1 + exp(z)) without overflow.
double softplus(double z) {
    if (z > 35.0) return z;
    if (z < -35.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

void check_binary_labels(const Eigen::VectorXi& y) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] != 0 && y[i] != 1) {
            throw_error(ErrorCode::NonBinaryInput,
                        "label at row " + std::to_string(i) + " is " + std::to_string(y[i]));
        }
    }
}

// Mean log-loss plus the ridge penalty (intercept excluded).
double loss_at(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
               double l2) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    const Eigen::VectorXd z = X * w.head(d) + Eigen::VectorXd::Constant(n, w[d]);
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        total += y[i] > 0.5 ? softplus(-z[i]) : softplus(z[i]);
    }
    return total / static_cast<double>(n) + 0.5 * l2 * w.head(d).squaredNorm();
}

}  // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw_error(ErrorCode::InvalidConfig, "learning_rate must be > 0");
    if (max_iters < 0) throw_error(ErrorCode::InvalidConfig, "max_iters must be >= 0");
    if (!(tol > 0.0)) throw_error(ErrorCode::InvalidConfig, "tol must be > 0");
    if (l2 < 0.0) throw_error(ErrorCode::InvalidConfig, "l2 must be >= 0");
    if (!(oversample_ratio > 0.0) || oversample_ratio >= 1.0) {
        // A duplication-based scheme can never push the minority share to 1.
        throw_error(ErrorCode::InvalidConfig, "oversample_ratio must lie in (0, 1)");
    }
    if (jitter_scale < 0.0) throw_error(ErrorCode::InvalidConfig, "jitter_scale must be >= 0");
}

std::pair<Eigen::MatrixXd, Eigen::VectorXi> oversample_minority(const Eigen::MatrixXd& X,
                                                                const Eigen::VectorXi& y,
                                                                double ratio, std::uint64_t seed,
                                                                double jitter_scale) {
    if (X.rows() != y.size()) {
        throw_error(ErrorCode::LengthMismatch,
                    "feature matrix has " + std::to_string(X.rows()) + " rows, labels " +
                        std::to_string(y.size()));
    }
    check_binary_labels(y);
    const Eigen::Index n = y.size();
    const Eigen::Index positives = y.sum();
    const Eigen::Index negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        throw_error(ErrorCode::DegenerateLabels, "both classes are required for oversampling");
    }
    if (!(ratio > 0.0) || ratio >= 1.0) {
        throw_error(ErrorCode::InvalidConfig, "target minority share must lie in (0, 1)");
    }

    const int minority_label = positives <= negatives ? 1 : 0;
    const auto minority = static_cast<double>(std::min(positives, negatives));
    const auto majority = static_cast<double>(std::max(positives, negatives));
    const auto extra =
        static_cast<Eigen::Index>(std::llround(ratio * majority / (1.0 - ratio) - minority));
    if (extra <= 0) {
        return {X, y};
    }

    std::vector<Eigen::Index> minority_rows;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (y[i] == minority_label) minority_rows.push_back(i);
    }

    // Per-feature std over the full input sets the jitter scale.
    const Eigen::RowVectorXd mean = X.colwise().mean();
    const Eigen::RowVectorXd sd =
        ((X.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(n))
            .sqrt()
            .matrix();

    Eigen::MatrixXd out(n + extra, X.cols());
    Eigen::VectorXi labels(n + extra);
    out.topRows(n) = X;
    labels.head(n) = y;

    Rng rng(seed);
    for (Eigen::Index k = 0; k < extra; ++k) {
        const Eigen::Index src = minority_rows[rng.below(minority_rows.size())];
        Eigen::RowVectorXd row = X.row(src);
        if (jitter_scale > 0.0) {
            for (Eigen::Index j = 0; j < X.cols(); ++j) {
                row[j] += jitter_scale * sd[j] * rng.normal();
            }
        }
        out.row(n + k) = row;
        labels[n + k] = minority_label;
    }
    return {std::move(out), std::move(labels)};
}

Classifier train_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                          const TrainConfig& cfg) {
    cfg.validate();
    if (X.rows() < 2) {
        throw_error(ErrorCode::InvalidConfig, "training requires at least two rows");
    }
    if (X.rows() != y.size()) {
        throw_error(ErrorCode::LengthMismatch,
                    "feature matrix has " + std::to_string(X.rows()) + " rows, labels " +
                        std::to_string(y.size()));
    }
    check_binary_labels(y);

    const Eigen::Index d = X.cols();

    // Standardize, fit in z-score space, then fold the transform back into the
    // returned weights so prediction sees raw features.
    const Eigen::RowVectorXd mean = X.colwise().mean();
    Eigen::RowVectorXd sd =
        ((X.rowwise() - mean).array().square().colwise().sum() / static_cast<double>(X.rows()))
            .sqrt()
            .matrix();
    for (Eigen::Index j = 0; j < d; ++j) {
        if (sd[j] <= 0.0) sd[j] = 1.0;
    }
    Eigen::MatrixXd Xs = (X.rowwise() - mean).array().rowwise() / sd.array();

    auto [Xb, yb] = oversample_minority(Xs, y, cfg.oversample_ratio, cfg.seed, cfg.jitter_scale);
    const Eigen::Index n = Xb.rows();
    const Eigen::VectorXd yd = yb.cast<double>();

    Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
    double loss = loss_at(Xb, yd, w, cfg.l2);

    Classifier model;
    model.meta.seed = cfg.seed;
    model.meta.loss_trace.push_back(loss);

    double step = cfg.learning_rate;
    Eigen::VectorXd grad(d + 1);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const Eigen::VectorXd z = Xb * w.head(d) + Eigen::VectorXd::Constant(n, w[d]);
        Eigen::VectorXd p(n);
        for (Eigen::Index i = 0; i < n; ++i) p[i] = stable_sigmoid(z[i]);
        const Eigen::VectorXd residual = p - yd;
        grad.head(d) = Xb.transpose() * residual / static_cast<double>(n) + cfg.l2 * w.head(d);
        grad[d] = residual.mean();

        // Backtrack until the step decreases the loss; keeps the trace monotone.
        double next_loss = loss;
        Eigen::VectorXd next_w = w;
        bool accepted = false;
        for (int halving = 0; halving < 40; ++halving) {
            next_w = w - step * grad;
            next_loss = loss_at(Xb, yd, next_w, cfg.l2);
            if (next_loss <= loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const double improvement = loss - next_loss;
        w = next_w;
        loss = next_loss;
        model.meta.loss_trace.push_back(loss);
        model.meta.iterations = iter + 1;
        if (improvement < cfg.tol) break;
    }

    model.meta.final_loss = loss;
    model.weights.resize(d + 1);
    double intercept = w[d];
    for (Eigen::Index j = 0; j < d; ++j) {
        model.weights[j] = w[j] / sd[j];
        intercept -= w[j] * mean[j] / sd[j];
    }
    model.weights[d] = intercept;
    return model;
}

double predict_proba(const Classifier& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() != model.feature_dim()) {
        throw_error(ErrorCode::DimensionMismatch,
                    "input has " + std::to_string(x.size()) + " features, model expects " +
                        std::to_string(model.feature_dim()));
    }
    const double z = model.weights.head(model.feature_dim()).dot(x) + model.weights[x.size()];
    return stable_sigmoid(z);
}

double uplift_two_model(const Classifier& model_treatment, const Classifier& model_control,
                        const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& x_prime) {
    return predict_proba(model_treatment, x) - predict_proba(model_control, x_prime);
}

double uplift_dummy(const Classifier& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() + 1 != model.feature_dim()) {
        throw_error(ErrorCode::DimensionMismatch,
                    "dummy-variable model expects " + std::to_string(model.feature_dim()) +
                        " features (indicator last), got " + std::to_string(x.size()) +
                        " base features");
    }
    Eigen::VectorXd augmented(x.size() + 1);
    augmented.head(x.size()) = x;
    augmented[x.size()] = 1.0;
    const double p_treat = predict_proba(model, augmented);
    augmented[x.size()] = 0.0;
    const double p_control = predict_proba(model, augmented);
    return p_treat - p_control;
}

Classifier fold_dummy(const Classifier& model, int indicator_value) {
    if (indicator_value != 0 && indicator_value != 1) {
        throw_error(ErrorCode::NonBinaryInput, "indicator value must be 0 or 1");
    }
    const Eigen::Index d = model.feature_dim();
    if (d < 1) {
        throw_error(ErrorCode::DimensionMismatch, "model has no indicator feature to fold");
    }
    Classifier folded;
    folded.meta = model.meta;
    folded.weights.resize(d);
    folded.weights.head(d - 1) = model.weights.head(d - 1);
    folded.weights[d - 1] = model.weights[d] + model.weights[d - 1] * indicator_value;
    return folded;
}

FourQuadrantClassifier train_four_quadrant(const Eigen::MatrixXd& X,
                                           const std::vector<Quadrant>& labels,
                                           const TrainConfig& cfg) {
    if (static_cast<Eigen::Index>(labels.size()) != X.rows()) {
        throw_error(ErrorCode::LengthMismatch, "quadrant labels must match feature rows");
    }
    FourQuadrantClassifier model;
    for (int k = 0; k < 4; ++k) {
        Eigen::VectorXi yk(X.rows());
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            yk[i] = labels[static_cast<std::size_t>(i)] == static_cast<Quadrant>(k) ? 1 : 0;
        }
        TrainConfig per_class = cfg;
        per_class.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
        model.per_class[static_cast<std::size_t>(k)] = train_logistic(X, yk, per_class);
    }
    return model;
}

Eigen::Vector4d predict_quadrant_proba(const FourQuadrantClassifier& model,
                                       const Eigen::Ref<const Eigen::VectorXd>& x) {
    Eigen::Vector4d probs;
    for (int k = 0; k < 4; ++k) {
        probs[k] = predict_proba(model.per_class[static_cast<std::size_t>(k)], x);
    }
    return probs / probs.sum();
}

double uplift_four_quadrant(const FourQuadrantClassifier& model,
                            const Eigen::Ref<const Eigen::VectorXd>& x) {
    return predict_quadrant_proba(model, x)[static_cast<int>(Quadrant::Persuadable)];
}

std::string classifier_to_json(const Classifier& model) {
    nlohmann::json j;
    j["kind"] = "logistic";
    j["feature_dim"] = model.feature_dim();
    j["weights"] = std::vector<double>(model.weights.data(),
                                       model.weights.data() + model.weights.size());
    return j.dump();
}

Classifier classifier_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
        throw_error(ErrorCode::MalformedRow, "model file is not a JSON object");
    }
    if (j.value("kind", "") != "logistic") {
        throw_error(ErrorCode::InvalidConfig, "unsupported model kind");
    }
    if (!j.contains("weights") || !j["weights"].is_array() || !j.contains("feature_dim")) {
        throw_error(ErrorCode::MissingColumn, "model JSON requires weights and feature_dim");
    }
    const auto values = j["weights"].get<std::vector<double>>();
    const auto dim = j["feature_dim"].get<Eigen::Index>();
    if (static_cast<Eigen::Index>(values.size()) != dim + 1) {
        throw_error(ErrorCode::DimensionMismatch, "weights length must be feature_dim + 1");
    }
    Classifier model;
    model.weights = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                      static_cast<Eigen::Index>(values.size()));
    return model;
}

void save_classifier(const Classifier& model, const std::string& path) {
    write_text_file_atomic(path, classifier_to_json(model) + "\n");
}

Classifier load_classifier(const std::string& path) {
    return classifier_from_json(read_text_file(path));
}

}  // namespace uplift
