#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "uplift/campaign.hpp"
#include "uplift/models.hpp"

namespace uplift {

// How per-individual lift is scored at campaign start.
enum class UpliftStrategy { TwoModel, Dummy, FourQuadrant };

UpliftStrategy parse_strategy(const std::string& name);
const char* to_string(UpliftStrategy strategy);

// A strategy together with the models it needs. Dummy holds one model with
// the treatment indicator appended; FourQuadrant holds the segment model.
struct LiftScorer {
    struct TwoModel {
        Classifier treatment;
        Classifier control;
    };
    struct Dummy {
        Classifier model;
    };
    struct FourQuadrant {
        FourQuadrantClassifier model;
    };

    std::variant<TwoModel, Dummy, FourQuadrant> impl;

    double score(const Eigen::Ref<const Eigen::VectorXd>& features) const;
};

// Outcome of the start-of-campaign selection: who gets the intervention, who
// does not, and the ranking both were derived from.
struct CampaignSelection {
    std::vector<Id> intervention;
    std::vector<Id> no_intervention;
    LiftRanking ranking_start;
    std::size_t size = 0;
};

// Surrogate labels emitted at campaign end. surrogate_treat holds the ids
// that should have been treated in hindsight; the cut equals the original
// selection size.
struct SgtLabels {
    std::set<Id> surrogate_treat;
    std::set<Id> surrogate_no_treat;
    std::map<Id, double> surrogate_lift;
    LiftRanking ranking_end;

    int label_of(Id id) const { return surrogate_treat.count(id) > 0 ? 1 : 0; }
};

// Start-of-campaign step: scores everyone on features_start, ranks, applies
// the budget, and stamps the treated flag on each individual.
CampaignSelection step_one(Population& population, const LiftScorer& scorer,
                           const CampaignSpec& spec);

// Two-model convenience overload.
CampaignSelection step_one(Population& population, const Classifier& model_treatment,
                           const Classifier& model_control, const CampaignSpec& spec);

// End-of-campaign re-scoring of one individual with the complementary model:
// treated individuals score kpi_observed - p_C(features_end); untreated ones
// score p_T(features_end) - kpi_observed. Throws MissingKpi or
// MissingEndFeatures when the required observations are absent.
double rescore(const Individual& person, const Classifier& model_treatment,
               const Classifier& model_control);

// End-of-campaign step: re-scores the whole population, re-ranks, and reuses
// the step-one cut to emit binary surrogate labels. Throws SizeMismatch when
// the selection does not cover the population exactly.
SgtLabels step_two(const Population& population, const CampaignSelection& selection,
                   const Classifier& model_treatment, const Classifier& model_control);

// CSV export: id,surrogate_lift,sgt_label,treated_in_campaign.
std::string sgt_labels_to_csv(const Population& population, const SgtLabels& labels);

}  // namespace uplift
