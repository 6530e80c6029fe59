#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uplift/campaign.hpp"
#include "uplift/fairness.hpp"
#include "uplift/models.hpp"
#include "uplift/sgt.hpp"
#include "uplift/simulator.hpp"

namespace uplift {

enum class Strategy { NoOffer, FullOffer, Oracle, Uplift, Sgt };

const char* to_string(Strategy strategy);

struct TrainedModels {
    Classifier treatment;
    Classifier control;
};

// Inputs a strategy may need: trained models for Uplift, a completed
// selection to reuse, and surrogate labels for the Sgt strategy.
struct StrategyContext {
    const TrainedModels* models = nullptr;
    const CampaignSelection* selection = nullptr;
    const SgtLabels* sgt = nullptr;
};

struct StrategyOutcome {
    Strategy strategy = Strategy::NoOffer;
    std::map<Id, bool> actions;  // true = treat; covers the population exactly once
    double profit = 0.0;
};

// Total realized profit of an action assignment, measured on the latent
// counterfactual outcomes: treat contributes unit_value * treated_outcome -
// intervention_cost, no-treat contributes unit_value * control_outcome.
double profit_of_actions(const SyntheticCampaign& campaign, const CampaignSpec& spec,
                         const std::map<Id, bool>& actions);

// Evaluates one strategy on a campaign. NoOffer treats nobody; FullOffer
// everybody; Oracle picks the per-individual best action (unbudgeted);
// Uplift treats the model selection; Sgt treats the surrogate-treat set.
// Throws MissingCounterfactuals / MissingModels when prerequisites are absent.
StrategyOutcome evaluate_strategy(Strategy strategy, const SyntheticCampaign& campaign,
                                  const CampaignSpec& spec, const StrategyContext& context);

// Percentage of the oracle-minus-uplift profit gap recovered by the
// surrogate selection: 100 * (sgt - uplift) / (oracle - uplift).
// Throws DegenerateGap unless oracle strictly exceeds uplift.
double gap_closed(double profit_uplift, double profit_sgt, double profit_oracle);

struct GapReport {
    double profit_no_offer = 0.0;
    double profit_full_offer = 0.0;
    double profit_oracle = 0.0;
    double profit_uplift = 0.0;
    double profit_sgt = 0.0;
    std::optional<double> imp;  // percent; absent when oracle == uplift
};

// One campaign spec to run through the suite.
struct CampaignRunConfig {
    SimConfig sim;
    CampaignSpec spec;
    TrainConfig train;
};

// Results for one campaign x budget cell. The budgeted oracle profit is
// reported next to the unconstrained one to bracket both readings of the
// virtual-best strategy. A cell that failed carries the error message
// instead of results; the rest of the suite still runs.
struct SuiteCell {
    double budget = 0.0;
    GapReport gap;
    double profit_oracle_budgeted = 0.0;
    std::vector<FairnessReport> fairness;  // base + enhanced per attribute
    std::optional<std::string> error;
};

struct SuiteCampaignResult {
    std::size_t campaign = 0;  // 1-based position in the config list
    std::uint64_t seed = 0;
    double positive_rate = 0.0;
    std::vector<SuiteCell> cells;
    std::optional<std::string> error;  // campaign-level failure (setup/training)
};

struct BudgetAggregate {
    double budget = 0.0;
    std::size_t n_defined = 0;  // campaigns with a defined gap at this budget
    double imp_max = 0.0;
    double imp_min = 0.0;
    double imp_mean = 0.0;
};

struct SuiteReport {
    std::vector<SuiteCampaignResult> campaigns;
    std::vector<BudgetAggregate> aggregates;
};

// Runs every campaign at every budget: trains the model pair once per
// campaign, then re-selects, observes, re-scores, and evaluates all
// strategies and fairness reports per budget. Deterministic given the
// configs; campaign cells are evaluated in order.
SuiteReport run_suite(const std::vector<CampaignRunConfig>& configs,
                      const std::vector<double>& budgets);

// Default suite: `count` campaigns whose positive rates sweep a low-incidence
// band, seeded from a single root seed.
std::vector<CampaignRunConfig> default_suite_configs(std::uint64_t seed, std::size_t count,
                                                     std::size_t n_individuals, double noise_level,
                                                     double drift_magnitude);

std::string suite_report_to_json(const SuiteReport& report);

// Flat CSV: one row per campaign x budget x attribute x metric.
std::string suite_report_to_csv(const SuiteReport& report);

}  // namespace uplift
