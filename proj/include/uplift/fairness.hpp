#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uplift/errors.hpp"

namespace uplift {

// Group coding convention, fixed across the library: membership value 1 is
// the group of interest ("group 1" in difference metrics); membership value 0
// is the reference group ("group 2"). Disparate impact is the ratio
// P(pred=1 | A=0) / P(pred=1 | A=1).

enum class Metric { SP, DI, AO, EO, FNRDiff, PE };

const char* to_string(Metric metric);
bool metric_requires_labels(Metric metric);

enum class Band { WithinIdeal, OutsideIdeal };

const char* to_string(Band band);

// Confusion counts stratified by group membership; index 0 = reference group
// (A=0), index 1 = group of interest (A=1).
struct GroupConfusion {
    struct Counts {
        long tp = 0;
        long fp = 0;
        long tn = 0;
        long fn = 0;

        long total() const { return tp + fp + tn + fn; }
        long positives() const { return tp + fn; }
        long negatives() const { return fp + tn; }
    };
    Counts group[2];

    // Rates throw UndefinedRate when their denominator is empty, naming the
    // offending cell; silent NaN would corrupt band classification downstream.
    double tpr(int membership) const;
    double fpr(int membership) const;
    double fnr(int membership) const;
};

struct MetricResult {
    Metric metric = Metric::SP;
    double value = 0.0;
    Band band = Band::WithinIdeal;
    bool requires_labels = false;
};

// A metric that could not be computed, kept alongside the results so a single
// empty denominator does not void the whole report.
struct MetricDiagnostic {
    Metric metric = Metric::SP;
    ErrorCode code = ErrorCode::UndefinedRate;
    std::string message;
};

enum class ReportMode { Base, Enhanced };

const char* to_string(ReportMode mode);

struct FairnessReport {
    std::string attribute;
    ReportMode mode = ReportMode::Base;
    std::vector<MetricResult> results;
    std::vector<MetricDiagnostic> diagnostics;

    const MetricResult* find(Metric metric) const;
};

using BinaryVector = std::vector<int>;

// Exact confusion counts per group. Throws LengthMismatch on unequal lengths,
// NonBinaryInput on values outside {0, 1}.
GroupConfusion group_confusion(const BinaryVector& preds, const BinaryVector& labels,
                               const BinaryVector& membership);

// P(pred=1 | A=0) - P(pred=1 | A=1). Throws EmptyGroup.
MetricResult statistical_parity(const BinaryVector& preds, const BinaryVector& membership);

// P(pred=1 | A=0) / P(pred=1 | A=1). Throws EmptyGroup, and ZeroDenominator
// when the group-of-interest rate is zero (a diagnostic, never infinity).
MetricResult disparate_impact(const BinaryVector& preds, const BinaryVector& membership);

// 0.5 * [(FPR_1 - FPR_0) + (TPR_1 - TPR_0)].
MetricResult average_odds(const GroupConfusion& confusion);

// TPR_1 - TPR_0.
MetricResult equal_opportunity(const GroupConfusion& confusion);

// FNR_1 - FNR_0; identically equal to -equal_opportunity.
MetricResult fnr_difference(const GroupConfusion& confusion);

// FPR_1 - FPR_0.
MetricResult predictive_equality(const GroupConfusion& confusion);

// Ideal-band test following the 80% rule: DI is within [0.8, 1.2], every
// difference metric within [-0.2, 0.2]; both intervals closed.
Band classify_band(Metric metric, double value);

// Full evaluation. Without labels only the label-free metrics (SP, DI) are
// computed (base mode); with labels all six are (enhanced mode). Per-metric
// failures are collected as diagnostics instead of aborting the report.
FairnessReport evaluate_all(const BinaryVector& preds,
                            const std::optional<BinaryVector>& labels,
                            const BinaryVector& membership,
                            const std::string& attribute = "");

std::string fairness_report_to_json(const FairnessReport& report);

}  // namespace uplift
