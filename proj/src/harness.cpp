#include "uplift/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "json.hpp"

#include "uplift/rng.hpp"

namespace uplift {

namespace {

// Sub-stream tags for a suite campaign's seed.
enum SuiteStream : std::uint64_t {
    kTrainPopulationStream = 21,
    kTreatmentModelStream = 23,
    kControlModelStream = 24,
};

}  // namespace

const char* to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::NoOffer: return "no_offer";
        case Strategy::FullOffer: return "full_offer";
        case Strategy::Oracle: return "oracle";
        case Strategy::Uplift: return "uplift";
        case Strategy::Sgt: return "sgt";
    }
    return "unknown";
}

double profit_of_actions(const SyntheticCampaign& campaign, const CampaignSpec& spec,
                         const std::map<Id, bool>& actions) {
    if (campaign.latent_outcomes.size() != campaign.individuals.size()) {
        throw_error(ErrorCode::MissingCounterfactuals,
                    "profit evaluation needs latent counterfactual outcomes");
    }
    if (actions.size() != campaign.individuals.size()) {
        throw_error(ErrorCode::SizeMismatch, "actions must cover the population exactly once");
    }
    double profit = 0.0;
    for (std::size_t i = 0; i < campaign.individuals.size(); ++i) {
        const auto it = actions.find(campaign.individuals[i].id);
        if (it == actions.end()) {
            throw_error(ErrorCode::SizeMismatch,
                        "no action for id " + std::to_string(campaign.individuals[i].id));
        }
        const auto& latent = campaign.latent_outcomes[i];
        profit += it->second ? spec.unit_value * latent[0] - spec.intervention_cost
                             : spec.unit_value * latent[1];
    }
    return profit;
}

namespace {

std::map<Id, bool> actions_from_treated_set(const SyntheticCampaign& campaign,
                                            const std::set<Id>& treated) {
    std::map<Id, bool> actions;
    for (const auto& person : campaign.individuals) {
        actions[person.id] = treated.count(person.id) > 0;
    }
    return actions;
}

}  // namespace

StrategyOutcome evaluate_strategy(Strategy strategy, const SyntheticCampaign& campaign,
                                  const CampaignSpec& spec, const StrategyContext& context) {
    StrategyOutcome outcome;
    outcome.strategy = strategy;
    switch (strategy) {
        case Strategy::NoOffer:
            outcome.actions = actions_from_treated_set(campaign, {});
            break;
        case Strategy::FullOffer: {
            std::set<Id> everyone;
            for (const auto& person : campaign.individuals) everyone.insert(person.id);
            outcome.actions = actions_from_treated_set(campaign, everyone);
            break;
        }
        case Strategy::Oracle: {
            OracleResult oracle = oracle_actions(campaign, spec);
            outcome.actions = std::move(oracle.actions);
            outcome.profit = oracle.profit;
            return outcome;
        }
        case Strategy::Uplift: {
            if (context.selection != nullptr) {
                outcome.actions = actions_from_treated_set(
                    campaign, {context.selection->intervention.begin(),
                               context.selection->intervention.end()});
                break;
            }
            if (context.models == nullptr) {
                throw_error(ErrorCode::MissingModels,
                            "uplift strategy needs trained models or a completed selection");
            }
            Population copy = campaign.individuals;
            const CampaignSelection selection =
                step_one(copy, context.models->treatment, context.models->control, spec);
            outcome.actions = actions_from_treated_set(
                campaign, {selection.intervention.begin(), selection.intervention.end()});
            break;
        }
        case Strategy::Sgt: {
            if (context.sgt == nullptr) {
                throw_error(ErrorCode::MissingModels,
                            "sgt strategy needs surrogate labels from the re-scoring step");
            }
            outcome.actions = actions_from_treated_set(campaign, context.sgt->surrogate_treat);
            break;
        }
    }
    outcome.profit = profit_of_actions(campaign, spec, outcome.actions);
    return outcome;
}

double gap_closed(double profit_uplift, double profit_sgt, double profit_oracle) {
    if (!(profit_oracle > profit_uplift)) {
        throw_error(ErrorCode::DegenerateGap,
                    "oracle profit (" + std::to_string(profit_oracle) +
                        ") must strictly exceed uplift profit (" + std::to_string(profit_uplift) +
                        ")");
    }
    return 100.0 * (profit_sgt - profit_uplift) / (profit_oracle - profit_uplift);
}

namespace {

std::vector<std::string> attribute_names(const Population& population) {
    std::set<std::string> names;
    for (const auto& person : population) {
        for (const auto& [name, value] : person.protected_attrs) names.insert(name);
    }
    return {names.begin(), names.end()};
}

}  // namespace

SuiteReport run_suite(const std::vector<CampaignRunConfig>& configs,
                      const std::vector<double>& budgets) {
    if (configs.empty() || budgets.empty()) {
        throw_error(ErrorCode::InvalidConfig, "suite needs at least one campaign and one budget");
    }

    SuiteReport report;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        const auto& config = configs[c];
        SuiteCampaignResult campaign_result;
        campaign_result.campaign = c + 1;
        campaign_result.seed = config.sim.seed;
        campaign_result.positive_rate = config.sim.positive_rate;

        TrainedModels models;
        SyntheticCampaign base_campaign;
        try {
            config.sim.validate();
            config.spec.validate();
            config.train.validate();

            // Train once per campaign on an independently drawn population;
            // both observed arms of every training individual provide labels.
            SimConfig train_sim = config.sim;
            train_sim.seed = mix_seed(config.sim.seed, kTrainPopulationStream);
            const SyntheticCampaign train_campaign = generate_population(train_sim);

            const auto n_train = static_cast<Eigen::Index>(train_campaign.size());
            const auto dim = static_cast<Eigen::Index>(config.sim.n_features);
            Eigen::MatrixXd features(n_train, dim);
            Eigen::VectorXi y_treatment(n_train);
            Eigen::VectorXi y_control(n_train);
            for (Eigen::Index i = 0; i < n_train; ++i) {
                features.row(i) = train_campaign.individuals[static_cast<std::size_t>(i)]
                                      .features_start.transpose();
                y_treatment[i] = train_campaign.observed_outcomes[static_cast<std::size_t>(i)][0];
                y_control[i] = train_campaign.observed_outcomes[static_cast<std::size_t>(i)][1];
            }

            TrainConfig treatment_cfg = config.train;
            treatment_cfg.seed = mix_seed(config.train.seed, kTreatmentModelStream);
            models.treatment = train_logistic(features, y_treatment, treatment_cfg);
            TrainConfig control_cfg = config.train;
            control_cfg.seed = mix_seed(config.train.seed, kControlModelStream);
            models.control = train_logistic(features, y_control, control_cfg);

            base_campaign = apply_drift(generate_population(config.sim),
                                        config.sim.drift_magnitude,
                                        drift_seed_for(config.sim.seed));
        } catch (const Error& error) {
            campaign_result.error = error.what();
            report.campaigns.push_back(std::move(campaign_result));
            continue;
        }

        for (const double budget : budgets) {
            SuiteCell cell;
            cell.budget = budget;
            try {
                CampaignSpec spec = config.spec;
                spec.budget_fraction = budget;

                SyntheticCampaign campaign = base_campaign;
                const CampaignSelection selection =
                    step_one(campaign.individuals, models.treatment, models.control, spec);
                observe_kpi(campaign, selection.intervention);
                const SgtLabels labels =
                    step_two(campaign.individuals, selection, models.treatment, models.control);

                StrategyContext context;
                context.models = &models;
                context.selection = &selection;
                context.sgt = &labels;

                cell.gap.profit_no_offer =
                    evaluate_strategy(Strategy::NoOffer, campaign, spec, context).profit;
                cell.gap.profit_full_offer =
                    evaluate_strategy(Strategy::FullOffer, campaign, spec, context).profit;
                cell.gap.profit_oracle =
                    evaluate_strategy(Strategy::Oracle, campaign, spec, context).profit;
                cell.gap.profit_uplift =
                    evaluate_strategy(Strategy::Uplift, campaign, spec, context).profit;
                cell.gap.profit_sgt =
                    evaluate_strategy(Strategy::Sgt, campaign, spec, context).profit;
                cell.profit_oracle_budgeted = oracle_actions_budgeted(campaign, spec).profit;
                if (cell.gap.profit_oracle > cell.gap.profit_uplift) {
                    cell.gap.imp = gap_closed(cell.gap.profit_uplift, cell.gap.profit_sgt,
                                              cell.gap.profit_oracle);
                }

                // Fairness of the campaign-facing (uplift) decisions, with the
                // surrogate labels standing in for ground truth.
                BinaryVector preds;
                BinaryVector sgt_labels;
                preds.reserve(campaign.size());
                sgt_labels.reserve(campaign.size());
                for (const auto& person : campaign.individuals) {
                    preds.push_back(person.treated.value_or(false) ? 1 : 0);
                    sgt_labels.push_back(labels.label_of(person.id));
                }
                for (const auto& attribute : attribute_names(campaign.individuals)) {
                    BinaryVector membership;
                    membership.reserve(campaign.size());
                    for (const auto& person : campaign.individuals) {
                        const auto it = person.protected_attrs.find(attribute);
                        membership.push_back(it == person.protected_attrs.end() ? 0 : it->second);
                    }
                    cell.fairness.push_back(
                        evaluate_all(preds, std::nullopt, membership, attribute));
                    cell.fairness.push_back(evaluate_all(preds, sgt_labels, membership, attribute));
                }
            } catch (const Error& error) {
                cell.error = error.what();
            }
            campaign_result.cells.push_back(std::move(cell));
        }
        report.campaigns.push_back(std::move(campaign_result));
    }

    for (std::size_t b = 0; b < budgets.size(); ++b) {
        BudgetAggregate aggregate;
        aggregate.budget = budgets[b];
        double total = 0.0;
        for (const auto& campaign : report.campaigns) {
            if (campaign.cells.size() <= b) continue;  // campaign-level failure
            const auto& imp = campaign.cells[b].gap.imp;
            if (!imp.has_value()) continue;
            if (aggregate.n_defined == 0) {
                aggregate.imp_max = aggregate.imp_min = *imp;
            } else {
                aggregate.imp_max = std::max(aggregate.imp_max, *imp);
                aggregate.imp_min = std::min(aggregate.imp_min, *imp);
            }
            total += *imp;
            ++aggregate.n_defined;
        }
        if (aggregate.n_defined > 0) {
            aggregate.imp_mean = total / static_cast<double>(aggregate.n_defined);
        }
        report.aggregates.push_back(aggregate);
    }
    return report;
}

std::vector<CampaignRunConfig> default_suite_configs(std::uint64_t seed, std::size_t count,
                                                     std::size_t n_individuals, double noise_level,
                                                     double drift_magnitude) {
    if (count == 0) {
        throw_error(ErrorCode::InvalidConfig, "suite needs at least one campaign");
    }
    std::vector<CampaignRunConfig> configs;
    configs.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        CampaignRunConfig config;
        config.sim.n_individuals = n_individuals;
        config.sim.seed = mix_seed(seed, 100 + j);
        config.sim.noise_level = noise_level;
        config.sim.drift_magnitude = drift_magnitude;
        const double spread = count > 1 ? static_cast<double>(j) / static_cast<double>(count - 1)
                                        : 0.0;
        config.sim.positive_rate = 0.05 + 0.18 * spread;
        config.sim.quadrant_mix = derive_quadrant_mix(config.sim.positive_rate);
        config.train.seed = mix_seed(seed, 300 + j);
        configs.push_back(config);
    }
    return configs;
}

namespace {

nlohmann::json fairness_json(const FairnessReport& report) {
    return nlohmann::json::parse(fairness_report_to_json(report));
}

}  // namespace

std::string suite_report_to_json(const SuiteReport& report) {
    nlohmann::json j;
    j["schema"] = "uplift-sgt/suite-report/v1";
    j["campaigns"] = nlohmann::json::array();
    for (const auto& campaign : report.campaigns) {
        nlohmann::json jc;
        jc["campaign"] = campaign.campaign;
        jc["seed"] = campaign.seed;
        jc["positive_rate"] = campaign.positive_rate;
        if (campaign.error.has_value()) {
            jc["error"] = *campaign.error;
        }
        jc["cells"] = nlohmann::json::array();
        for (const auto& cell : campaign.cells) {
            nlohmann::json jcell;
            jcell["budget"] = cell.budget;
            if (cell.error.has_value()) {
                jcell["error"] = *cell.error;
                jcell["imp_defined"] = false;
                jc["cells"].push_back(std::move(jcell));
                continue;
            }
            jcell["profits"] = {{"no_offer", cell.gap.profit_no_offer},
                                {"full_offer", cell.gap.profit_full_offer},
                                {"oracle", cell.gap.profit_oracle},
                                {"oracle_budgeted", cell.profit_oracle_budgeted},
                                {"uplift", cell.gap.profit_uplift},
                                {"sgt", cell.gap.profit_sgt}};
            jcell["imp_defined"] = cell.gap.imp.has_value();
            if (cell.gap.imp.has_value()) {
                jcell["imp"] = *cell.gap.imp;
            }
            jcell["fairness"] = nlohmann::json::array();
            for (const auto& fairness : cell.fairness) {
                jcell["fairness"].push_back(fairness_json(fairness));
            }
            jc["cells"].push_back(std::move(jcell));
        }
        j["campaigns"].push_back(std::move(jc));
    }
    j["aggregates"] = nlohmann::json::array();
    for (const auto& aggregate : report.aggregates) {
        nlohmann::json ja;
        ja["budget"] = aggregate.budget;
        ja["n_defined"] = aggregate.n_defined;
        if (aggregate.n_defined > 0) {
            ja["imp_max"] = aggregate.imp_max;
            ja["imp_min"] = aggregate.imp_min;
            ja["imp_mean"] = aggregate.imp_mean;
        }
        j["aggregates"].push_back(std::move(ja));
    }
    return j.dump(2) + "\n";
}

std::string suite_report_to_csv(const SuiteReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "campaign,budget,attribute,mode,metric,value,band,requires_labels\n";
    for (const auto& campaign : report.campaigns) {
        for (const auto& cell : campaign.cells) {
            for (const auto& fairness : cell.fairness) {
                for (const auto& result : fairness.results) {
                    out << campaign.campaign << ',' << cell.budget << ',' << fairness.attribute
                        << ',' << to_string(fairness.mode) << ',' << to_string(result.metric) << ','
                        << result.value << ',' << to_string(result.band) << ','
                        << (result.requires_labels ? 1 : 0) << '\n';
                }
            }
        }
    }
    return out.str();
}

}  // namespace uplift
