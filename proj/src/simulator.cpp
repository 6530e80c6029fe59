#include "uplift/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "uplift/rng.hpp"

namespace uplift {

namespace {

// Stream tags for the generator's independent sub-streams.
enum Stream : std::uint64_t {
    kQuadrantStream = 1,
    kFeatureStream = 2,
    kFlipStream = 3,
    kProtectedStream = 4,
    kDriftStream = 5,
};

// Acklam's rational approximation of the standard normal quantile.
// Absolute error below 1.2e-9, ample for placing feature clusters.
double probit(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Margin kept by the signal coordinates in the noise-free limit.
constexpr double kNoiselessMargin = 1.0;

// Cluster shift of a signal coordinate for a given noise level. The per-arm
// feature misclassification rate of the ideal linear model is 4.5x the
// outcome flip rate (capped at 45%), so feature evidence degrades much faster
// than the observed outcomes it competes with; re-scoring against the
// observed KPI then recovers part of the model's selection errors, while the
// noise-free limit keeps a hard margin and stays exactly recoverable.
double signal_shift(double noise_level) {
    const double error_rate = std::min(0.45, 4.5 * noise_level);
    return probit(1.0 - error_rate);
}

std::array<int, 2> outcomes_of(Quadrant q) {
    switch (q) {
        case Quadrant::SureThing: return {1, 1};
        case Quadrant::LostCause: return {0, 0};
        case Quadrant::DoNotDisturb: return {0, 1};
        case Quadrant::Persuadable: return {1, 0};
    }
    return {0, 0};
}

// P(attr = 1 | persuadable?) pair realizing a phi coefficient of `rho`
// against the persuadable indicator, clamped to valid probabilities when the
// requested correlation is infeasible for the given base rates.
std::pair<double, double> attr_conditionals(double rho, double attr_rate, double persuadable_rate) {
    const double q = persuadable_rate;
    const double sigma = std::sqrt(attr_rate * (1.0 - attr_rate));
    if (q <= 0.0 || q >= 1.0) return {attr_rate, attr_rate};
    const double p_if = attr_rate + rho * sigma * std::sqrt((1.0 - q) / q);
    const double p_ifnot = attr_rate - rho * sigma * std::sqrt(q / (1.0 - q));
    return {std::clamp(p_if, 0.0, 1.0), std::clamp(p_ifnot, 0.0, 1.0)};
}

}  // namespace

void SimConfig::validate() const {
    if (n_individuals == 0) throw_error(ErrorCode::InvalidConfig, "n_individuals must be positive");
    if (n_features < 2) {
        throw_error(ErrorCode::InvalidConfig,
                    "n_features must be >= 2 (one signal coordinate per counterfactual arm)");
    }
    double total = 0.0;
    for (double share : quadrant_mix) {
        if (share < 0.0) throw_error(ErrorCode::InvalidConfig, "quadrant_mix shares must be >= 0");
        total += share;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw_error(ErrorCode::InvalidConfig, "quadrant_mix must sum to 1");
    }
    if (noise_level < 0.0 || noise_level > 1.0) {
        throw_error(ErrorCode::InvalidConfig, "noise_level must lie in [0, 1]");
    }
    if (drift_magnitude < 0.0 || !std::isfinite(drift_magnitude)) {
        throw_error(ErrorCode::InvalidConfig, "drift_magnitude must be finite and >= 0");
    }
    if (protected_correlation < -1.0 || protected_correlation > 1.0) {
        throw_error(ErrorCode::InvalidConfig, "protected_correlation must lie in [-1, 1]");
    }
    if (!(positive_rate > 0.0) || !(positive_rate < 1.0)) {
        throw_error(ErrorCode::InvalidConfig, "positive_rate must lie in (0, 1)");
    }
}

std::array<double, 4> derive_quadrant_mix(double positive_rate) {
    if (!(positive_rate > 0.0) || !(positive_rate < 4.0 / 7.0)) {
        throw_error(ErrorCode::InvalidConfig, "positive_rate must lie in (0, 4/7)");
    }
    const double r = positive_rate;
    return {r / 2.0, 1.0 - 1.75 * r, r / 4.0, r};
}

std::size_t SyntheticCampaign::index_of(Id id) const {
    const auto it = index_.find(id);
    if (it == index_.end()) {
        throw_error(ErrorCode::SizeMismatch, "id " + std::to_string(id) + " is not in the campaign");
    }
    return it->second;
}

void SyntheticCampaign::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < individuals.size(); ++i) {
        index_[individuals[i].id] = i;
    }
}

SyntheticCampaign generate_population(const SimConfig& config) {
    config.validate();

    const auto n = config.n_individuals;
    const auto d = static_cast<Eigen::Index>(config.n_features);

    Rng rng_quadrant = Rng(config.seed).fork(kQuadrantStream);
    Rng rng_features = Rng(config.seed).fork(kFeatureStream);
    Rng rng_flip = Rng(config.seed).fork(kFlipStream);
    Rng rng_protected = Rng(config.seed).fork(kProtectedStream);

    std::array<double, 4> cumulative{};
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        acc += config.quadrant_mix[k];
        cumulative[k] = acc;
    }
    cumulative[3] = 1.0;

    const double shift = config.noise_level > 0.0 ? signal_shift(config.noise_level) : 0.0;
    const double age_rho = config.protected_correlation;
    const double persuadable_share = config.quadrant_mix[static_cast<int>(Quadrant::Persuadable)];
    const auto [age_if, age_ifnot] = attr_conditionals(age_rho, 0.5, persuadable_share);
    const auto [income_if, income_ifnot] =
        attr_conditionals(age_rho / 2.0, 0.5, persuadable_share);

    SyntheticCampaign campaign;
    campaign.individuals.reserve(n);
    campaign.latent_outcomes.reserve(n);
    campaign.observed_outcomes.reserve(n);
    campaign.true_quadrant.reserve(n);

    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng_quadrant.uniform();
        int k = 0;
        while (k < 3 && u >= cumulative[static_cast<std::size_t>(k)]) ++k;
        const auto quadrant = static_cast<Quadrant>(k);
        const auto latent = outcomes_of(quadrant);

        Individual person;
        person.id = static_cast<Id>(i);
        person.features_start.resize(d);
        for (int arm = 0; arm < 2; ++arm) {
            const double sign = latent[static_cast<std::size_t>(arm)] == 1 ? 1.0 : -1.0;
            double coordinate;
            if (config.noise_level > 0.0) {
                coordinate = sign * shift + rng_features.normal();
            } else {
                coordinate = sign * (kNoiselessMargin + std::abs(rng_features.normal()));
            }
            person.features_start[arm] = coordinate;
        }
        for (Eigen::Index j = 2; j < d; ++j) {
            person.features_start[j] = rng_features.normal();
        }
        person.features_end = person.features_start;

        std::array<int, 2> observed = latent;
        for (auto& outcome : observed) {
            if (config.noise_level > 0.0 && rng_flip.bernoulli(config.noise_level)) {
                outcome = 1 - outcome;
            }
        }

        const bool persuadable = quadrant == Quadrant::Persuadable;
        person.protected_attrs["age"] =
            rng_protected.bernoulli(persuadable ? age_if : age_ifnot) ? 1 : 0;
        person.protected_attrs["gender"] = rng_protected.bernoulli(0.5) ? 1 : 0;
        person.protected_attrs["income"] =
            rng_protected.bernoulli(persuadable ? income_if : income_ifnot) ? 1 : 0;

        campaign.individuals.push_back(std::move(person));
        campaign.latent_outcomes.push_back(latent);
        campaign.observed_outcomes.push_back(observed);
        campaign.true_quadrant.push_back(quadrant);
    }

    campaign.rebuild_index();
    return campaign;
}

std::uint64_t drift_seed_for(std::uint64_t campaign_seed) {
    return mix_seed(campaign_seed, kDriftStream);
}

SyntheticCampaign apply_drift(const SyntheticCampaign& campaign, double drift_magnitude,
                              std::uint64_t seed) {
    if (drift_magnitude < 0.0 || !std::isfinite(drift_magnitude)) {
        throw_error(ErrorCode::InvalidConfig, "drift_magnitude must be finite and >= 0");
    }
    SyntheticCampaign drifted = campaign;
    if (drift_magnitude == 0.0) {
        for (auto& person : drifted.individuals) {
            person.features_end = person.features_start;
        }
        return drifted;
    }
    Rng rng = Rng(seed).fork(kDriftStream);
    for (auto& person : drifted.individuals) {
        person.features_end = person.features_start;
        for (Eigen::Index j = 0; j < person.features_end.size(); ++j) {
            person.features_end[j] += drift_magnitude * rng.normal();
        }
    }
    return drifted;
}

void observe_kpi(SyntheticCampaign& campaign, const std::vector<Id>& treated_ids) {
    if (campaign.observed_outcomes.size() != campaign.individuals.size()) {
        throw_error(ErrorCode::MissingCounterfactuals,
                    "campaign has no observed outcome pairs to draw the KPI from");
    }
    const std::set<Id> treated(treated_ids.begin(), treated_ids.end());
    for (std::size_t i = 0; i < campaign.individuals.size(); ++i) {
        auto& person = campaign.individuals[i];
        const bool is_treated = treated.count(person.id) > 0;
        person.treated = is_treated;
        person.kpi_observed = static_cast<double>(campaign.observed_outcomes[i][is_treated ? 0 : 1]);
    }
}

namespace {

double contribution(const std::array<int, 2>& latent, bool treat, const CampaignSpec& spec) {
    if (treat) return spec.unit_value * latent[0] - spec.intervention_cost;
    return spec.unit_value * latent[1];
}

void require_counterfactuals(const SyntheticCampaign& campaign) {
    if (campaign.latent_outcomes.size() != campaign.individuals.size()) {
        throw_error(ErrorCode::MissingCounterfactuals,
                    "campaign lacks latent counterfactual outcomes");
    }
}

}  // namespace

OracleResult oracle_actions(const SyntheticCampaign& campaign, const CampaignSpec& spec) {
    spec.validate();
    require_counterfactuals(campaign);
    OracleResult result;
    for (std::size_t i = 0; i < campaign.individuals.size(); ++i) {
        const auto& latent = campaign.latent_outcomes[i];
        const double gain = spec.unit_value * (latent[0] - latent[1]) - spec.intervention_cost;
        const bool treat = gain > 0.0;
        result.actions[campaign.individuals[i].id] = treat;
        result.profit += contribution(latent, treat, spec);
    }
    return result;
}

OracleResult oracle_actions_budgeted(const SyntheticCampaign& campaign, const CampaignSpec& spec) {
    spec.validate();
    require_counterfactuals(campaign);
    const std::size_t n = campaign.individuals.size();
    const std::size_t budget = selection_size(spec.budget_fraction, n);

    struct Candidate {
        double gain;
        Id id;
        std::size_t index;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& latent = campaign.latent_outcomes[i];
        candidates.push_back({spec.unit_value * (latent[0] - latent[1]) - spec.intervention_cost,
                              campaign.individuals[i].id, i});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.gain != b.gain) return a.gain > b.gain;
        return a.id < b.id;
    });

    OracleResult result;
    for (std::size_t i = 0; i < n; ++i) {
        result.actions[campaign.individuals[i].id] = false;
    }
    for (std::size_t rank = 0; rank < budget && rank < candidates.size(); ++rank) {
        if (candidates[rank].gain <= 0.0) break;
        result.actions[candidates[rank].id] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        result.profit += contribution(campaign.latent_outcomes[i],
                                      result.actions.at(campaign.individuals[i].id), spec);
    }
    return result;
}

}  // namespace uplift
