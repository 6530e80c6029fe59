#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uplift/errors.hpp"

namespace uplift {

using Id = std::int64_t;

// One population member. Feature vectors are snapshots of the same variables
// at the campaign start and end; protected attributes are pre-binarized at
// ingestion (group of interest coded 1).
struct Individual {
    Id id = 0;
    Eigen::VectorXd features_start;
    Eigen::VectorXd features_end;
    std::map<std::string, int> protected_attrs;  // values are 0 or 1
    std::optional<double> kpi_observed;          // observed outcome over the window
    std::optional<bool> treated;                 // set once a selection has run
};

using Population = std::vector<Individual>;

enum class KpiKind { BinaryProfitability, ContinuousProfit };

// The campaign tuple: who can be targeted, at what cost, under which budget,
// over which window. budget_fraction is a share of the population, not a
// currency amount.
struct CampaignSpec {
    double budget_fraction = 0.10;           // in (0, 1]
    KpiKind kpi_kind = KpiKind::BinaryProfitability;
    std::int64_t t_start = 0;
    std::int64_t t_end = 30;                 // must exceed t_start
    double intervention_cost = 0.25;         // per treated individual, >= 0
    double unit_value = 1.0;                 // currency value of one positive binary outcome

    void validate() const;
};

enum class Quadrant { SureThing = 0, LostCause = 1, DoNotDisturb = 2, Persuadable = 3 };

const char* to_string(Quadrant q);

// Deterministic descending ordering of per-individual scores. Ties are broken
// by ascending id so that repeated runs select identical subsets. cut marks
// how many leading entries are selected (0 = no selection applied yet).
struct LiftRanking {
    std::vector<Id> ordered_ids;
    std::vector<double> scores;  // parallel to ordered_ids, non-increasing
    std::size_t cut = 0;

    std::size_t size() const { return ordered_ids.size(); }
};

// Result of applying a budget to a ranking: the selected ids, the rest, and
// the selection size.
struct TopKSplit {
    std::vector<Id> intervention;
    std::vector<Id> complement;
    std::size_t cut = 0;
};

// Sorts scores descending, ties by ascending id. Throws NonFiniteScore if any
// score is NaN or infinite, EmptyPopulation if scores is empty.
LiftRanking rank_by_score(const std::map<Id, double>& scores);

// Number of individuals selected under budget_fraction: floor(B * n), clamped
// below by 1 whenever B > 0 and n > 0.
std::size_t selection_size(double budget_fraction, std::size_t n);

// Splits a ranking at the budget cut. The ranking must cover exactly n ids.
// Throws EmptyPopulation when n == 0, InvalidConfig on a bad budget,
// SizeMismatch when the ranking does not cover n ids.
TopKSplit select_top_k(const LiftRanking& ranking, double budget_fraction, std::size_t n);

// Maps a counterfactual outcome pair to its response segment:
// (1,1) SureThing, (0,0) LostCause, (0,1) DoNotDisturb, (1,0) Persuadable.
// Arguments must be 0 or 1 (NonBinaryInput otherwise).
Quadrant classify_quadrant(int outcome_treated, int outcome_control);

}  // namespace uplift
