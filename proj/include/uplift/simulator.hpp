#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "uplift/campaign.hpp"

namespace uplift {

// Synthetic campaign generator settings.
//
// Outcome model: each individual draws a latent response segment from
// quadrant_mix; the segment fixes the counterfactual outcome pair
// (treated, control). Two feature coordinates carry the segment signal (one
// per counterfactual arm), remaining coordinates are standard-normal noise.
// At noise_level == 0 the signal coordinates keep a hard margin away from the
// decision boundary, so an adequately trained classifier recovers every
// outcome exactly; at noise_level > 0 the signal coordinates are Gaussians
// whose overlap grows with noise_level and each observed outcome additionally
// flips against its latent value with probability noise_level.
struct SimConfig {
    std::size_t n_individuals = 17000;
    std::size_t n_features = 6;  // >= 2; two signal coordinates, rest noise
    std::uint64_t seed = 0;
    // Target segment proportions in Quadrant enum order:
    // {SureThing, LostCause, DoNotDisturb, Persuadable}.
    std::array<double, 4> quadrant_mix{0.25, 0.25, 0.25, 0.25};
    double noise_level = 0.1;         // in [0, 1]
    double drift_magnitude = 0.05;    // >= 0, per-feature perturbation scale
    double protected_correlation = 0.3;  // in [-1, 1], attribute "age" vs persuadability
    double positive_rate = 0.15;      // in (0, 1); used by derive_quadrant_mix

    void validate() const;
};

// Quadrant proportions whose per-arm positive incidence tracks a target rate:
// {SureThing: r/2, LostCause: 1 - 1.75r, DoNotDisturb: r/4, Persuadable: r},
// giving treatment-arm incidence 1.5r and control-arm incidence 0.75r.
// Requires r in (0, 4/7).
std::array<double, 4> derive_quadrant_mix(double positive_rate);

// A generated population together with its counterfactual ground truth.
// latent outcomes are the true (treated, control) pair per individual;
// observed outcomes are the noisy copies a campaign can actually measure.
struct SyntheticCampaign {
    Population individuals;
    std::vector<std::array<int, 2>> latent_outcomes;    // aligned with individuals
    std::vector<std::array<int, 2>> observed_outcomes;  // aligned with individuals
    std::vector<Quadrant> true_quadrant;                // aligned with individuals

    std::size_t size() const { return individuals.size(); }

    std::size_t index_of(Id id) const;
    const std::array<int, 2>& latent_of(Id id) const { return latent_outcomes[index_of(id)]; }
    const std::array<int, 2>& observed_of(Id id) const { return observed_outcomes[index_of(id)]; }
    Quadrant quadrant_of(Id id) const { return true_quadrant[index_of(id)]; }

    void rebuild_index();

private:
    std::map<Id, std::size_t> index_;
};

// Deterministically generates a population from the config. Throws
// InvalidConfig on out-of-range settings.
SyntheticCampaign generate_population(const SimConfig& config);

// Canonical drift sub-seed for a campaign seed, shared by the suite and the
// simulate subcommand so exported populations match in-process runs.
std::uint64_t drift_seed_for(std::uint64_t campaign_seed);

// Returns a copy with features_end = features_start + drift, where each
// coordinate receives an independent N(0, drift_magnitude) perturbation.
// drift_magnitude == 0 leaves features_end exactly equal to features_start.
SyntheticCampaign apply_drift(const SyntheticCampaign& campaign, double drift_magnitude,
                              std::uint64_t seed);

// Fills kpi_observed and the treated flag for every individual from the
// observed outcome of its realized arm. `treated_ids` lists the individuals
// that received the intervention.
void observe_kpi(SyntheticCampaign& campaign, const std::vector<Id>& treated_ids);

struct OracleResult {
    std::map<Id, bool> actions;  // true = treat
    double profit = 0.0;
};

// Best per-individual action from the latent counterfactual pair: treat iff
// unit_value * treated_outcome - cost exceeds unit_value * control_outcome.
// Ignores the budget (the virtual best strategy is unconstrained).
// Throws MissingCounterfactuals when latent outcomes are absent.
OracleResult oracle_actions(const SyntheticCampaign& campaign, const CampaignSpec& spec);

// Budget-constrained variant: treats the highest-gain individuals (ties by
// ascending id) up to the budget cut, skipping non-positive gains.
OracleResult oracle_actions_budgeted(const SyntheticCampaign& campaign, const CampaignSpec& spec);

}  // namespace uplift
