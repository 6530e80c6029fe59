#include "uplift/sgt.hpp"

#include <algorithm>
#include <sstream>

namespace uplift {

UpliftStrategy parse_strategy(const std::string& name) {
    if (name == "two_model") return UpliftStrategy::TwoModel;
    if (name == "dummy") return UpliftStrategy::Dummy;
    if (name == "four_quadrant") return UpliftStrategy::FourQuadrant;
    throw_error(ErrorCode::InvalidConfig, "unknown uplift strategy: " + name);
}

const char* to_string(UpliftStrategy strategy) {
    switch (strategy) {
        case UpliftStrategy::TwoModel: return "two_model";
        case UpliftStrategy::Dummy: return "dummy";
        case UpliftStrategy::FourQuadrant: return "four_quadrant";
    }
    return "unknown";
}

double LiftScorer::score(const Eigen::Ref<const Eigen::VectorXd>& features) const {
    return std::visit(
        [&](const auto& scorer) -> double {
            using T = std::decay_t<decltype(scorer)>;
            if constexpr (std::is_same_v<T, TwoModel>) {
                return uplift_two_model(scorer.treatment, scorer.control, features, features);
            } else if constexpr (std::is_same_v<T, Dummy>) {
                return uplift_dummy(scorer.model, features);
            } else {
                return uplift_four_quadrant(scorer.model, features);
            }
        },
        impl);
}

CampaignSelection step_one(Population& population, const LiftScorer& scorer,
                           const CampaignSpec& spec) {
    spec.validate();
    if (population.empty()) {
        throw_error(ErrorCode::EmptyPopulation, "cannot select from an empty population");
    }
    std::map<Id, double> lift_start;
    for (const auto& person : population) {
        lift_start[person.id] = scorer.score(person.features_start);
    }
    if (lift_start.size() != population.size()) {
        throw_error(ErrorCode::InvalidConfig, "population ids must be unique");
    }

    CampaignSelection selection;
    selection.ranking_start = rank_by_score(lift_start);
    TopKSplit split = select_top_k(selection.ranking_start, spec.budget_fraction, population.size());
    selection.ranking_start.cut = split.cut;
    selection.size = split.cut;
    selection.intervention = std::move(split.intervention);
    selection.no_intervention = std::move(split.complement);

    const std::set<Id> treated(selection.intervention.begin(), selection.intervention.end());
    for (auto& person : population) {
        person.treated = treated.count(person.id) > 0;
    }
    return selection;
}

CampaignSelection step_one(Population& population, const Classifier& model_treatment,
                           const Classifier& model_control, const CampaignSpec& spec) {
    LiftScorer scorer{LiftScorer::TwoModel{model_treatment, model_control}};
    return step_one(population, scorer, spec);
}

double rescore(const Individual& person, const Classifier& model_treatment,
               const Classifier& model_control) {
    if (!person.treated.has_value()) {
        throw_error(ErrorCode::InvalidConfig,
                    "individual " + std::to_string(person.id) + " has no treated flag; run the"
                    " selection step first");
    }
    if (!person.kpi_observed.has_value()) {
        throw_error(ErrorCode::MissingKpi,
                    "individual " + std::to_string(person.id) + " has no observed KPI");
    }
    if (person.features_end.size() == 0) {
        throw_error(ErrorCode::MissingEndFeatures,
                    "individual " + std::to_string(person.id) + " has no end-of-window features");
    }
    if (*person.treated) {
        return *person.kpi_observed - predict_proba(model_control, person.features_end);
    }
    return predict_proba(model_treatment, person.features_end) - *person.kpi_observed;
}

SgtLabels step_two(const Population& population, const CampaignSelection& selection,
                   const Classifier& model_treatment, const Classifier& model_control) {
    if (selection.intervention.size() + selection.no_intervention.size() != population.size()) {
        throw_error(ErrorCode::SizeMismatch,
                    "selection covers " +
                        std::to_string(selection.intervention.size() +
                                       selection.no_intervention.size()) +
                        " ids, population has " + std::to_string(population.size()));
    }

    SgtLabels labels;
    for (const auto& person : population) {
        labels.surrogate_lift[person.id] = rescore(person, model_treatment, model_control);
    }
    if (labels.surrogate_lift.size() != population.size()) {
        throw_error(ErrorCode::InvalidConfig, "population ids must be unique");
    }

    labels.ranking_end = rank_by_score(labels.surrogate_lift);
    labels.ranking_end.cut = selection.size;
    for (std::size_t rank = 0; rank < labels.ranking_end.size(); ++rank) {
        const Id id = labels.ranking_end.ordered_ids[rank];
        if (rank < selection.size) {
            labels.surrogate_treat.insert(id);
        } else {
            labels.surrogate_no_treat.insert(id);
        }
    }
    return labels;
}

std::string sgt_labels_to_csv(const Population& population, const SgtLabels& labels) {
    std::ostringstream out;
    out << "id,surrogate_lift,sgt_label,treated_in_campaign\n";
    out.precision(17);
    for (const auto& person : population) {
        const auto it = labels.surrogate_lift.find(person.id);
        if (it == labels.surrogate_lift.end()) {
            throw_error(ErrorCode::SizeMismatch,
                        "no surrogate lift for id " + std::to_string(person.id));
        }
        out << person.id << ',' << it->second << ',' << labels.label_of(person.id) << ','
            << (person.treated.value_or(false) ? 1 : 0) << '\n';
    }
    return out.str();
}

}  // namespace uplift
