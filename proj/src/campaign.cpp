#include "uplift/campaign.hpp"

#include <algorithm>
#include <cmath>

namespace uplift {

void CampaignSpec::validate() const {
    if (!(budget_fraction > 0.0) || budget_fraction > 1.0) {
        throw_error(ErrorCode::InvalidConfig,
                    "budget_fraction must lie in (0, 1], got " + std::to_string(budget_fraction));
    }
    if (t_start >= t_end) {
        throw_error(ErrorCode::InvalidConfig, "t_start must precede t_end");
    }
    if (intervention_cost < 0.0 || !std::isfinite(intervention_cost)) {
        throw_error(ErrorCode::InvalidConfig, "intervention_cost must be finite and >= 0");
    }
    if (!(unit_value > 0.0) || !std::isfinite(unit_value)) {
        throw_error(ErrorCode::InvalidConfig, "unit_value must be finite and > 0");
    }
}

const char* to_string(Quadrant q) {
    switch (q) {
        case Quadrant::SureThing: return "sure_thing";
        case Quadrant::LostCause: return "lost_cause";
        case Quadrant::DoNotDisturb: return "do_not_disturb";
        case Quadrant::Persuadable: return "persuadable";
    }
    return "unknown";
}

LiftRanking rank_by_score(const std::map<Id, double>& scores) {
    if (scores.empty()) {
        throw_error(ErrorCode::EmptyPopulation, "cannot rank an empty score map");
    }
    std::vector<std::pair<Id, double>> entries;
    entries.reserve(scores.size());
    for (const auto& [id, score] : scores) {
        if (!std::isfinite(score)) {
            throw_error(ErrorCode::NonFiniteScore,
                        "score for id " + std::to_string(id) + " is not finite");
        }
        entries.emplace_back(id, score);
    }
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    LiftRanking ranking;
    ranking.ordered_ids.reserve(entries.size());
    ranking.scores.reserve(entries.size());
    for (const auto& [id, score] : entries) {
        ranking.ordered_ids.push_back(id);
        ranking.scores.push_back(score);
    }
    return ranking;
}

std::size_t selection_size(double budget_fraction, std::size_t n) {
    if (n == 0) {
        throw_error(ErrorCode::EmptyPopulation, "population is empty");
    }
    if (!(budget_fraction > 0.0) || budget_fraction > 1.0) {
        throw_error(ErrorCode::InvalidConfig, "budget_fraction must lie in (0, 1]");
    }
    // The 1e-9 slack keeps products like 0.3 * 10 = 2.999...96 from flooring
    // below their exact value; no real budget fraction sits that close to an
    // integer multiple from below.
    const auto k = static_cast<std::size_t>(
        std::floor(budget_fraction * static_cast<double>(n) + 1e-9));
    return std::max<std::size_t>(k, 1);
}

TopKSplit select_top_k(const LiftRanking& ranking, double budget_fraction, std::size_t n) {
    const std::size_t k = selection_size(budget_fraction, n);
    if (ranking.size() != n) {
        throw_error(ErrorCode::SizeMismatch,
                    "ranking covers " + std::to_string(ranking.size()) + " ids, expected " +
                        std::to_string(n));
    }
    TopKSplit split;
    split.cut = k;
    split.intervention.assign(ranking.ordered_ids.begin(),
                              ranking.ordered_ids.begin() + static_cast<std::ptrdiff_t>(k));
    split.complement.assign(ranking.ordered_ids.begin() + static_cast<std::ptrdiff_t>(k),
                            ranking.ordered_ids.end());
    return split;
}

Quadrant classify_quadrant(int outcome_treated, int outcome_control) {
    if ((outcome_treated != 0 && outcome_treated != 1) ||
        (outcome_control != 0 && outcome_control != 1)) {
        throw_error(ErrorCode::NonBinaryInput, "quadrant outcomes must be 0 or 1");
    }
    if (outcome_treated == 1) {
        return outcome_control == 1 ? Quadrant::SureThing : Quadrant::Persuadable;
    }
    return outcome_control == 1 ? Quadrant::DoNotDisturb : Quadrant::LostCause;
}

}  // namespace uplift
