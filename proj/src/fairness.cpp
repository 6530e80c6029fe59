#include "uplift/fairness.hpp"

#include <cmath>

#include "json.hpp"

namespace uplift {

namespace {

void check_binary(const BinaryVector& values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] != 0 && values[i] != 1) {
            throw_error(ErrorCode::NonBinaryInput, std::string(what) + " at index " +
                                                       std::to_string(i) + " is " +
                                                       std::to_string(values[i]));
        }
    }
}

void check_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw_error(ErrorCode::LengthMismatch, std::string(what) + ": " + std::to_string(a) +
                                                   " vs " + std::to_string(b));
    }
}

// Positive prediction rate per group; shared by SP and DI.
std::pair<double, double> group_rates(const BinaryVector& preds, const BinaryVector& membership) {
    check_same_length(preds.size(), membership.size(), "preds vs membership");
    check_binary(preds, "prediction");
    check_binary(membership, "membership");
    long count[2] = {0, 0};
    long positive[2] = {0, 0};
    for (std::size_t i = 0; i < preds.size(); ++i) {
        ++count[membership[i]];
        positive[membership[i]] += preds[i];
    }
    for (int g = 0; g < 2; ++g) {
        if (count[g] == 0) {
            throw_error(ErrorCode::EmptyGroup,
                        "membership group " + std::to_string(g) + " is empty");
        }
    }
    return {static_cast<double>(positive[0]) / static_cast<double>(count[0]),
            static_cast<double>(positive[1]) / static_cast<double>(count[1])};
}

MetricResult make_result(Metric metric, double value) {
    return MetricResult{metric, value, classify_band(metric, value), metric_requires_labels(metric)};
}

}  // namespace

const char* to_string(Metric metric) {
    switch (metric) {
        case Metric::SP: return "SP";
        case Metric::DI: return "DI";
        case Metric::AO: return "AO";
        case Metric::EO: return "EO";
        case Metric::FNRDiff: return "FNRDiff";
        case Metric::PE: return "PE";
    }
    return "unknown";
}

bool metric_requires_labels(Metric metric) {
    return metric != Metric::SP && metric != Metric::DI;
}

const char* to_string(Band band) {
    return band == Band::WithinIdeal ? "within_ideal" : "outside_ideal";
}

const char* to_string(ReportMode mode) { return mode == ReportMode::Base ? "base" : "enhanced"; }

double GroupConfusion::tpr(int membership) const {
    const auto& g = group[membership];
    if (g.positives() == 0) {
        throw_error(ErrorCode::UndefinedRate,
                    "TPR undefined: group " + std::to_string(membership) + " has no positives");
    }
    return static_cast<double>(g.tp) / static_cast<double>(g.positives());
}

double GroupConfusion::fpr(int membership) const {
    const auto& g = group[membership];
    if (g.negatives() == 0) {
        throw_error(ErrorCode::UndefinedRate,
                    "FPR undefined: group " + std::to_string(membership) + " has no negatives");
    }
    return static_cast<double>(g.fp) / static_cast<double>(g.negatives());
}

double GroupConfusion::fnr(int membership) const {
    const auto& g = group[membership];
    if (g.positives() == 0) {
        throw_error(ErrorCode::UndefinedRate,
                    "FNR undefined: group " + std::to_string(membership) + " has no positives");
    }
    return static_cast<double>(g.fn) / static_cast<double>(g.positives());
}

const MetricResult* FairnessReport::find(Metric metric) const {
    for (const auto& result : results) {
        if (result.metric == metric) return &result;
    }
    return nullptr;
}

GroupConfusion group_confusion(const BinaryVector& preds, const BinaryVector& labels,
                               const BinaryVector& membership) {
    check_same_length(preds.size(), labels.size(), "preds vs labels");
    check_same_length(preds.size(), membership.size(), "preds vs membership");
    check_binary(preds, "prediction");
    check_binary(labels, "label");
    check_binary(membership, "membership");

    GroupConfusion confusion;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        auto& g = confusion.group[membership[i]];
        if (labels[i] == 1) {
            preds[i] == 1 ? ++g.tp : ++g.fn;
        } else {
            preds[i] == 1 ? ++g.fp : ++g.tn;
        }
    }
    return confusion;
}

MetricResult statistical_parity(const BinaryVector& preds, const BinaryVector& membership) {
    const auto [rate0, rate1] = group_rates(preds, membership);
    return make_result(Metric::SP, rate0 - rate1);
}

MetricResult disparate_impact(const BinaryVector& preds, const BinaryVector& membership) {
    const auto [rate0, rate1] = group_rates(preds, membership);
    if (rate1 == 0.0) {
        throw_error(ErrorCode::ZeroDenominator,
                    "disparate impact undefined: group of interest has no positive predictions");
    }
    return make_result(Metric::DI, rate0 / rate1);
}

MetricResult average_odds(const GroupConfusion& confusion) {
    const double value = 0.5 * ((confusion.fpr(1) - confusion.fpr(0)) +
                                (confusion.tpr(1) - confusion.tpr(0)));
    return make_result(Metric::AO, value);
}

MetricResult equal_opportunity(const GroupConfusion& confusion) {
    return make_result(Metric::EO, confusion.tpr(1) - confusion.tpr(0));
}

MetricResult fnr_difference(const GroupConfusion& confusion) {
    // FNR = 1 - TPR, so FNR_1 - FNR_0 = TPR_0 - TPR_1. Computing it from the
    // TPRs keeps EO + FNRDiff identically zero in floating point as well.
    return make_result(Metric::FNRDiff, confusion.tpr(0) - confusion.tpr(1));
}

MetricResult predictive_equality(const GroupConfusion& confusion) {
    return make_result(Metric::PE, confusion.fpr(1) - confusion.fpr(0));
}

Band classify_band(Metric metric, double value) {
    if (!std::isfinite(value)) {
        throw_error(ErrorCode::NonFiniteScore, "metric value must be finite");
    }
    if (metric == Metric::DI) {
        return value >= 0.8 && value <= 1.2 ? Band::WithinIdeal : Band::OutsideIdeal;
    }
    return value >= -0.2 && value <= 0.2 ? Band::WithinIdeal : Band::OutsideIdeal;
}

FairnessReport evaluate_all(const BinaryVector& preds, const std::optional<BinaryVector>& labels,
                            const BinaryVector& membership, const std::string& attribute) {
    FairnessReport report;
    report.attribute = attribute;
    report.mode = labels.has_value() ? ReportMode::Enhanced : ReportMode::Base;

    const auto attempt = [&report](Metric metric, auto&& compute) {
        try {
            report.results.push_back(compute());
        } catch (const Error& error) {
            report.diagnostics.push_back({metric, error.code(), error.what()});
        }
    };

    attempt(Metric::SP, [&] { return statistical_parity(preds, membership); });
    attempt(Metric::DI, [&] { return disparate_impact(preds, membership); });
    if (!labels.has_value()) {
        return report;
    }

    std::optional<GroupConfusion> confusion;
    try {
        confusion = group_confusion(preds, *labels, membership);
    } catch (const Error& error) {
        for (Metric metric : {Metric::AO, Metric::EO, Metric::FNRDiff, Metric::PE}) {
            report.diagnostics.push_back({metric, error.code(), error.what()});
        }
        return report;
    }

    attempt(Metric::AO, [&] { return average_odds(*confusion); });
    attempt(Metric::EO, [&] { return equal_opportunity(*confusion); });
    attempt(Metric::FNRDiff, [&] { return fnr_difference(*confusion); });
    attempt(Metric::PE, [&] { return predictive_equality(*confusion); });
    return report;
}

std::string fairness_report_to_json(const FairnessReport& report) {
    nlohmann::json j;
    j["attribute"] = report.attribute;
    j["mode"] = to_string(report.mode);
    j["results"] = nlohmann::json::array();
    for (const auto& result : report.results) {
        j["results"].push_back({{"metric", to_string(result.metric)},
                                {"value", result.value},
                                {"band", to_string(result.band)},
                                {"requires_labels", result.requires_labels}});
    }
    j["diagnostics"] = nlohmann::json::array();
    for (const auto& diagnostic : report.diagnostics) {
        j["diagnostics"].push_back({{"metric", to_string(diagnostic.metric)},
                                    {"error", to_string(diagnostic.code)},
                                    {"message", diagnostic.message}});
    }
    return j.dump();
}

}  // namespace uplift
