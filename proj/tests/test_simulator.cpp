#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "uplift/csv.hpp"
#include "uplift/models.hpp"
#include "uplift/rng.hpp"
#include "uplift/simulator.hpp"

using namespace uplift;

namespace {

// Rank-sum AUC, independent of any model code path.
double auc_of(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (labels[order[rank]] == 1) {
            rank_sum += static_cast<double>(rank + 1);
            ++positives;
        }
    }
    const std::size_t negatives = order.size() - positives;
    REQUIRE(positives > 0);
    REQUIRE(negatives > 0);
    return (rank_sum - static_cast<double>(positives) * (positives + 1) / 2.0) /
           (static_cast<double>(positives) * static_cast<double>(negatives));
}

// Pearson correlation of two binary vectors (phi coefficient).
double phi_coefficient(const std::vector<int>& a, const std::vector<int>& b) {
    REQUIRE(a.size() == b.size());
    double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 1 && b[i] == 1) ++n11;
        if (a[i] == 1 && b[i] == 0) ++n10;
        if (a[i] == 0 && b[i] == 1) ++n01;
        if (a[i] == 0 && b[i] == 0) ++n00;
    }
    const double denom =
        std::sqrt((n11 + n10) * (n01 + n00) * (n11 + n01) * (n10 + n00));
    REQUIRE(denom > 0.0);
    return (n11 * n00 - n10 * n01) / denom;
}

SimConfig small_config(std::uint64_t seed) {
    SimConfig config;
    config.n_individuals = 500;
    config.n_features = 4;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("generation is deterministic given the seed") {
    SimConfig config = small_config(1);
    const std::string first = population_to_csv(generate_population(config), true);
    const std::string second = population_to_csv(generate_population(config), true);
    CHECK(first == second);

    config.seed = 2;
    CHECK(population_to_csv(generate_population(config), true) != first);
}

TEST_CASE("realized quadrant proportions track the mix") {
    SimConfig config;
    config.n_individuals = 20000;
    config.seed = 11;
    config.quadrant_mix = {0.25, 0.25, 0.25, 0.25};
    const SyntheticCampaign campaign = generate_population(config);
    std::array<double, 4> counts{};
    for (Quadrant q : campaign.true_quadrant) counts[static_cast<std::size_t>(q)] += 1.0;
    for (double count : counts) {
        const double share = count / static_cast<double>(config.n_individuals);
        CHECK(share >= 0.23);
        CHECK(share <= 0.27);
    }
}

TEST_CASE("zero noise means observed outcomes equal latent outcomes") {
    SimConfig config = small_config(3);
    config.noise_level = 0.0;
    const SyntheticCampaign campaign = generate_population(config);
    for (std::size_t i = 0; i < campaign.size(); ++i) {
        CHECK(campaign.observed_outcomes[i] == campaign.latent_outcomes[i]);
    }
}

TEST_CASE("latent outcomes and quadrants stay consistent") {
    SimConfig config = small_config(5);
    config.noise_level = 0.4;
    const SyntheticCampaign campaign = generate_population(config);
    for (std::size_t i = 0; i < campaign.size(); ++i) {
        CHECK(classify_quadrant(campaign.latent_outcomes[i][0], campaign.latent_outcomes[i][1]) ==
              campaign.true_quadrant[i]);
    }
}

TEST_CASE("zero drift leaves end features exactly equal to start features") {
    const SyntheticCampaign campaign = generate_population(small_config(4));
    const SyntheticCampaign drifted = apply_drift(campaign, 0.0, 123);
    for (const auto& person : drifted.individuals) {
        CHECK(person.features_end == person.features_start);
    }
}

TEST_CASE("drift is deterministic and matches the half-normal mean") {
    SimConfig config;
    config.n_individuals = 20000;
    config.n_features = 6;  // n * d = 120000 coordinates
    config.seed = 9;
    const SyntheticCampaign campaign = generate_population(config);

    const double magnitude = 0.1;
    const SyntheticCampaign once = apply_drift(campaign, magnitude, 77);
    const SyntheticCampaign twice = apply_drift(campaign, magnitude, 77);
    double total_abs = 0.0;
    std::size_t coordinates = 0;
    for (std::size_t i = 0; i < once.size(); ++i) {
        CHECK(once.individuals[i].features_end == twice.individuals[i].features_end);
        const Eigen::VectorXd delta =
            once.individuals[i].features_end - once.individuals[i].features_start;
        total_abs += delta.cwiseAbs().sum();
        coordinates += static_cast<std::size_t>(delta.size());
    }
    // E|N(0, s)| = s * sqrt(2 / pi).
    const double expected = magnitude * std::sqrt(2.0 / M_PI);
    const double observed = total_abs / static_cast<double>(coordinates);
    CHECK(observed == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("one protected attribute correlates with persuadability") {
    SimConfig config;
    config.n_individuals = 10000;
    config.seed = 21;
    config.protected_correlation = 0.3;
    config.quadrant_mix = {0.25, 0.25, 0.25, 0.25};
    const SyntheticCampaign campaign = generate_population(config);
    std::vector<int> age;
    std::vector<int> persuadable;
    for (std::size_t i = 0; i < campaign.size(); ++i) {
        age.push_back(campaign.individuals[i].protected_attrs.at("age"));
        persuadable.push_back(campaign.true_quadrant[i] == Quadrant::Persuadable ? 1 : 0);
    }
    CHECK(std::abs(phi_coefficient(age, persuadable) - 0.3) < 0.05);
}

TEST_CASE("features carry learnable persuadability signal") {
    SimConfig config;
    config.n_individuals = 4000;
    config.seed = 31;
    config.noise_level = 0.3;
    const SyntheticCampaign campaign = generate_population(config);

    Eigen::MatrixXd X(campaign.size(), config.n_features);
    Eigen::VectorXi y(campaign.size());
    for (std::size_t i = 0; i < campaign.size(); ++i) {
        X.row(static_cast<Eigen::Index>(i)) = campaign.individuals[i].features_start.transpose();
        y[static_cast<Eigen::Index>(i)] =
            campaign.true_quadrant[i] == Quadrant::Persuadable ? 1 : 0;
    }
    TrainConfig train_config;
    train_config.max_iters = 150;
    train_config.seed = 5;
    const Classifier model = train_logistic(X, y, train_config);

    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < campaign.size(); ++i) {
        scores.push_back(predict_proba(model, campaign.individuals[i].features_start));
        labels.push_back(y[static_cast<Eigen::Index>(i)]);
    }
    CHECK(auc_of(scores, labels) > 0.5);
}

TEST_CASE("oracle picks the dominant action per individual") {
    SimConfig config = small_config(41);
    config.noise_level = 0.0;
    const SyntheticCampaign campaign = generate_population(config);
    CampaignSpec spec;
    spec.intervention_cost = 0.25;
    const OracleResult oracle = oracle_actions(campaign, spec);
    for (std::size_t i = 0; i < campaign.size(); ++i) {
        const auto& latent = campaign.latent_outcomes[i];
        const bool treat = oracle.actions.at(campaign.individuals[i].id);
        if (latent[0] == 1 && latent[1] == 0) {
            CHECK(treat);  // persuadable: gain 1 - cost > 0
        } else {
            CHECK_FALSE(treat);  // treatment only adds cost elsewhere
        }
    }
}

TEST_CASE("oracle profit dominates cheap strategies on 100 seeded campaigns") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        SimConfig config;
        config.n_individuals = 200;
        config.n_features = 3;
        config.seed = seed;
        config.noise_level = 0.2;
        const SyntheticCampaign campaign = generate_population(config);
        CampaignSpec spec;
        const OracleResult oracle = oracle_actions(campaign, spec);

        const auto profit_of = [&](const auto& treat_predicate) {
            double profit = 0.0;
            for (std::size_t i = 0; i < campaign.size(); ++i) {
                const auto& latent = campaign.latent_outcomes[i];
                profit += treat_predicate(i) ? spec.unit_value * latent[0] - spec.intervention_cost
                                             : spec.unit_value * latent[1];
            }
            return profit;
        };

        CHECK(oracle.profit >= profit_of([](std::size_t) { return false; }));
        CHECK(oracle.profit >= profit_of([](std::size_t) { return true; }));
        Rng rng(seed + 1000);
        for (int trial = 0; trial < 5; ++trial) {
            const double p = rng.uniform();
            std::vector<bool> random_actions(campaign.size());
            for (std::size_t i = 0; i < campaign.size(); ++i) random_actions[i] = rng.bernoulli(p);
            CHECK(oracle.profit >= profit_of([&](std::size_t i) { return random_actions[i]; }));
        }

        const OracleResult budgeted = oracle_actions_budgeted(campaign, spec);
        CHECK(oracle.profit >= budgeted.profit);
    }
}

TEST_CASE("derive_quadrant_mix hits the target incidence") {
    const auto mix = derive_quadrant_mix(0.20);
    CHECK(mix[0] + mix[1] + mix[2] + mix[3] == doctest::Approx(1.0));
    // Treatment-arm incidence: sure things + persuadables.
    CHECK(mix[0] + mix[3] == doctest::Approx(1.5 * 0.20));
    // Control-arm incidence: sure things + do-not-disturbs.
    CHECK(mix[0] + mix[2] == doctest::Approx(0.75 * 0.20));
    CHECK_THROWS_AS(derive_quadrant_mix(0.7), Error);
}

TEST_CASE("invalid configs are rejected") {
    SimConfig config = small_config(1);
    config.noise_level = 1.5;
    CHECK_THROWS_WITH_AS(generate_population(config), doctest::Contains("InvalidConfig"), Error);
    config = small_config(1);
    config.n_features = 1;
    CHECK_THROWS_AS(generate_population(config), Error);
    config = small_config(1);
    config.quadrant_mix = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(generate_population(config), Error);
}

}  // TEST_SUITE
