#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uplift/campaign.hpp"
#include "uplift/errors.hpp"

namespace uplift {

// Full-batch training settings. Training stops after max_iters steps or once
// the loss improvement drops below tol, whichever comes first.
struct TrainConfig {
    double learning_rate = 0.5;
    int max_iters = 400;
    double tol = 1e-8;
    double l2 = 1e-4;
    double oversample_ratio = 0.5;  // target minority share in (0, 1]
    double jitter_scale = 0.01;     // oversample jitter, as a fraction of per-feature std
    std::uint64_t seed = 0;

    void validate() const;
};

// Binary response model: sigmoid(w . x + b), with the intercept stored as the
// last weight. Inputs are standardized internally during training and the
// standardization is folded back into the weights, so prediction operates on
// raw features.
struct Classifier {
    Eigen::VectorXd weights;  // size d + 1, intercept last

    struct Meta {
        std::uint64_t seed = 0;
        int iterations = 0;
        double final_loss = 0.0;
        std::vector<double> loss_trace;  // loss after each accepted step, starting at iteration 0
    } meta;

    Eigen::Index feature_dim() const { return weights.size() - 1; }
};

// Rebalances class counts by duplicating minority rows (with small feature
// jitter) until the minority share reaches `ratio` within one sample. Returns
// the input unchanged when the minority share already meets the ratio.
// Throws DegenerateLabels when only one class is present, LengthMismatch when
// X and y disagree, NonBinaryInput on labels outside {0,1}.
std::pair<Eigen::MatrixXd, Eigen::VectorXi> oversample_minority(const Eigen::MatrixXd& X,
                                                                const Eigen::VectorXi& y,
                                                                double ratio, std::uint64_t seed,
                                                                double jitter_scale = 0.01);

// Fits an L2-regularized logistic regression by monotone full-batch gradient
// descent (backtracking halves the step whenever it would increase the loss,
// so the recorded loss trace is non-increasing). Deterministic given cfg.seed.
Classifier train_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                          const TrainConfig& cfg);

// sigmoid(w . x + b), clamped to the open interval (0, 1).
// Throws DimensionMismatch when x does not match the model's feature dim.
double predict_proba(const Classifier& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// Incremental response probability under the two-model strategy:
// p_T(x) - p_C(x_prime).
double uplift_two_model(const Classifier& model_treatment, const Classifier& model_control,
                        const Eigen::Ref<const Eigen::VectorXd>& x,
                        const Eigen::Ref<const Eigen::VectorXd>& x_prime);

// Incremental response probability under the dummy-variable strategy. The
// model must have been trained with the treatment indicator appended as the
// last feature; the score is p(x, 1) - p(x, 0).
double uplift_dummy(const Classifier& model, const Eigen::Ref<const Eigen::VectorXd>& x);

// Specializes a dummy-variable model to a fixed indicator value by folding
// the indicator weight into the intercept, yielding a plain classifier over
// the base features.
Classifier fold_dummy(const Classifier& model, int indicator_value);

// One-vs-rest response-segment model; class order follows the Quadrant enum.
struct FourQuadrantClassifier {
    std::array<Classifier, 4> per_class;

    Eigen::Index feature_dim() const { return per_class[0].feature_dim(); }
};

FourQuadrantClassifier train_four_quadrant(const Eigen::MatrixXd& X,
                                           const std::vector<Quadrant>& labels,
                                           const TrainConfig& cfg);

// Renormalized per-class probabilities, in Quadrant enum order.
Eigen::Vector4d predict_quadrant_proba(const FourQuadrantClassifier& model,
                                       const Eigen::Ref<const Eigen::VectorXd>& x);

// Score used for ranking under the four-quadrant strategy: the renormalized
// probability of the persuadable class.
double uplift_four_quadrant(const FourQuadrantClassifier& model,
                            const Eigen::Ref<const Eigen::VectorXd>& x);

// Flat JSON model exchange format: {"weights": [...], "feature_dim": d,
// "kind": "logistic"}.
std::string classifier_to_json(const Classifier& model);
Classifier classifier_from_json(const std::string& text);
void save_classifier(const Classifier& model, const std::string& path);
Classifier load_classifier(const std::string& path);

}  // namespace uplift
