// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "uplift/campaign.hpp"
#include "uplift/fairness.hpp"
#include "uplift/harness.hpp"
#include "uplift/models.hpp"
#include "uplift/rng.hpp"
#include "uplift/sgt.hpp"
#include "uplift/simulator.hpp"

using namespace uplift;

namespace {

struct Criterion {
    std::string name;
    double time_limit_seconds;
    std::function<bool(std::string*)> body;
};

bool nearly(double value, double target, double tolerance) {
    return std::abs(value - target) <= tolerance;
}

// ---------------------------------------------------------------------------
// 1. Imp arithmetic on the published campaign profits.
// ---------------------------------------------------------------------------
bool imp_arithmetic(std::string* detail) {
    const double imp_campaign1 = gap_closed(6847, 7778, 7942);
    const double imp_campaign8 = gap_closed(8697, 9077, 11126);
    char buffer[128];
    std::snprintf(buffer, sizeof(buffer), "campaign1=%.2f%% campaign8=%.2f%%", imp_campaign1,
                  imp_campaign8);
    *detail = buffer;
    return nearly(imp_campaign1, 85.0, 0.5) && nearly(imp_campaign8, 16.0, 0.5);
}

// ---------------------------------------------------------------------------
// 2. Fairness band classification of every published metric value.
// ---------------------------------------------------------------------------
bool band_reproduction(std::string* detail) {
    struct Case {
        Metric metric;
        double value;
        Band expected;
    };
    const std::vector<Case> cases = {
        // Best-campaign table: age, gender, income columns.
        {Metric::SP, 0.021, Band::WithinIdeal},
        {Metric::SP, 0.066, Band::WithinIdeal},
        {Metric::SP, 0.098, Band::WithinIdeal},
        {Metric::DI, 1.228, Band::OutsideIdeal},
        {Metric::DI, 1.859, Band::OutsideIdeal},
        {Metric::DI, 2.708, Band::OutsideIdeal},
        {Metric::AO, -0.003, Band::WithinIdeal},
        {Metric::AO, 0.04, Band::WithinIdeal},
        {Metric::AO, 0.052, Band::WithinIdeal},
        {Metric::EO, -0.026, Band::WithinIdeal},
        {Metric::EO, 0.008, Band::WithinIdeal},
        {Metric::EO, -0.022, Band::WithinIdeal},
        {Metric::FNRDiff, 0.026, Band::WithinIdeal},
        {Metric::FNRDiff, -0.008, Band::WithinIdeal},
        {Metric::FNRDiff, 0.022, Band::WithinIdeal},
        {Metric::PE, 0.021, Band::WithinIdeal},
        {Metric::PE, 0.073, Band::WithinIdeal},
        {Metric::PE, 0.127, Band::WithinIdeal},
        // Worst-campaign table.
        {Metric::SP, -0.006, Band::WithinIdeal},
        {Metric::SP, -0.027, Band::WithinIdeal},
        {Metric::SP, -0.04, Band::WithinIdeal},
        {Metric::DI, 0.942, Band::WithinIdeal},
        {Metric::DI, 0.752, Band::OutsideIdeal},
        {Metric::DI, 0.661, Band::OutsideIdeal},
        {Metric::AO, -0.014, Band::WithinIdeal},
        {Metric::AO, -0.011, Band::WithinIdeal},
        {Metric::AO, -0.04, Band::WithinIdeal},
        {Metric::EO, -0.02, Band::WithinIdeal},
        {Metric::EO, 0.013, Band::WithinIdeal},
        {Metric::EO, -0.035, Band::WithinIdeal},
        {Metric::FNRDiff, 0.02, Band::WithinIdeal},
        {Metric::FNRDiff, -0.013, Band::WithinIdeal},
        {Metric::FNRDiff, 0.035, Band::WithinIdeal},
        {Metric::PE, -0.007, Band::WithinIdeal},
        {Metric::PE, -0.036, Band::WithinIdeal},
        {Metric::PE, -0.045, Band::WithinIdeal},
    };
    std::size_t flagged = 0;
    for (const auto& test : cases) {
        if (classify_band(test.metric, test.value) != test.expected) {
            *detail = std::string("misclassified ") + to_string(test.metric) + " = " +
                      std::to_string(test.value);
            return false;
        }
        if (test.expected == Band::OutsideIdeal) ++flagged;
    }
    *detail = std::to_string(cases.size()) + " published values, " + std::to_string(flagged) +
              " flagged outside_ideal";
    return flagged == 5;
}

// ---------------------------------------------------------------------------
// 3. Exhaustive metric-oracle equivalence on all binary triples of length <= 8.
// ---------------------------------------------------------------------------
bool metric_oracle_equivalence(std::string* detail) {
    std::size_t checked = 0;
    std::size_t undefined_di = 0;
    std::size_t undefined_rate = 0;
    for (std::size_t n = 1; n <= 8; ++n) {
        const std::uint64_t span = 1ull << n;
        BinaryVector preds(n), labels(n), membership(n);
        for (std::uint64_t pm = 0; pm < span; ++pm) {
            for (std::uint64_t lm = 0; lm < span; ++lm) {
                for (std::uint64_t mm = 0; mm < span; ++mm) {
                    if (mm == 0 || mm == span - 1) continue;  // one group empty
                    long count[2] = {0, 0};
                    long positive_preds[2] = {0, 0};
                    long tp[2] = {0, 0}, fp[2] = {0, 0}, tn[2] = {0, 0}, fn[2] = {0, 0};
                    for (std::size_t i = 0; i < n; ++i) {
                        preds[i] = static_cast<int>((pm >> i) & 1);
                        labels[i] = static_cast<int>((lm >> i) & 1);
                        membership[i] = static_cast<int>((mm >> i) & 1);
                        const int g = membership[i];
                        ++count[g];
                        positive_preds[g] += preds[i];
                        if (labels[i] == 1) {
                            preds[i] == 1 ? ++tp[g] : ++fn[g];
                        } else {
                            preds[i] == 1 ? ++fp[g] : ++tn[g];
                        }
                    }
                    ++checked;

                    const double rate0 = double(positive_preds[0]) / double(count[0]);
                    const double rate1 = double(positive_preds[1]) / double(count[1]);
                    if (std::abs(statistical_parity(preds, membership).value - (rate0 - rate1)) >
                        1e-12) {
                        *detail = "SP mismatch";
                        return false;
                    }
                    if (rate1 > 0.0) {
                        if (std::abs(disparate_impact(preds, membership).value - rate0 / rate1) >
                            1e-12) {
                            *detail = "DI mismatch";
                            return false;
                        }
                    } else if (undefined_di++ % 64 == 0) {
                        // The library must agree the ratio is undefined here;
                        // subsampled because throwing is the slow path.
                        try {
                            disparate_impact(preds, membership);
                            *detail = "DI did not flag a zero denominator";
                            return false;
                        } catch (const Error& error) {
                            if (error.code() != ErrorCode::ZeroDenominator) {
                                *detail = "DI raised the wrong error";
                                return false;
                            }
                        }
                    }

                    const GroupConfusion confusion = group_confusion(preds, labels, membership);
                    const bool tpr_ok = tp[0] + fn[0] > 0 && tp[1] + fn[1] > 0;
                    const bool fpr_ok = fp[0] + tn[0] > 0 && fp[1] + tn[1] > 0;
                    if ((!tpr_ok || !fpr_ok) && undefined_rate++ % 64 == 0) {
                        try {
                            if (!tpr_ok) {
                                equal_opportunity(confusion);
                            } else {
                                predictive_equality(confusion);
                            }
                            *detail = "rate with empty denominator did not raise";
                            return false;
                        } catch (const Error& error) {
                            if (error.code() != ErrorCode::UndefinedRate) {
                                *detail = "undefined rate raised the wrong error";
                                return false;
                            }
                        }
                    }
                    if (tpr_ok) {
                        const double tpr0 = double(tp[0]) / double(tp[0] + fn[0]);
                        const double tpr1 = double(tp[1]) / double(tp[1] + fn[1]);
                        const double fnr0 = double(fn[0]) / double(tp[0] + fn[0]);
                        const double fnr1 = double(fn[1]) / double(tp[1] + fn[1]);
                        const double eo = equal_opportunity(confusion).value;
                        const double fnr_diff = fnr_difference(confusion).value;
                        if (std::abs(eo - (tpr1 - tpr0)) > 1e-12 ||
                            std::abs(fnr_diff - (fnr1 - fnr0)) > 1e-12) {
                            *detail = "EO/FNRDiff mismatch";
                            return false;
                        }
                        if (eo + fnr_diff != 0.0) {
                            *detail = "EO + FNRDiff != 0";
                            return false;
                        }
                    }
                    if (fpr_ok) {
                        const double fpr0 = double(fp[0]) / double(fp[0] + tn[0]);
                        const double fpr1 = double(fp[1]) / double(fp[1] + tn[1]);
                        if (std::abs(predictive_equality(confusion).value - (fpr1 - fpr0)) >
                            1e-12) {
                            *detail = "PE mismatch";
                            return false;
                        }
                        if (tpr_ok) {
                            const double tpr0 = double(tp[0]) / double(tp[0] + fn[0]);
                            const double tpr1 = double(tp[1]) / double(tp[1] + fn[1]);
                            const double expected = 0.5 * ((fpr1 - fpr0) + (tpr1 - tpr0));
                            if (std::abs(average_odds(confusion).value - expected) > 1e-12) {
                                *detail = "AO mismatch";
                                return false;
                            }
                        }
                    }
                }
            }
        }
    }
    *detail = std::to_string(checked) + " triples checked";
    return true;
}

// ---------------------------------------------------------------------------
// 4. Label-free invariance of SP and DI.
// ---------------------------------------------------------------------------
bool label_free_invariance(std::string* detail) {
    Rng rng(404);
    const Classifier treatment = [] {
        Classifier c;
        c.weights = Eigen::Vector3d(4.0, 0.0, 0.0);
        return c;
    }();
    const Classifier control = [] {
        Classifier c;
        c.weights = Eigen::Vector3d(0.0, 4.0, 0.0);
        return c;
    }();

    for (int instance = 0; instance < 1000; ++instance) {
        const std::size_t n = 10 + rng.below(40);
        Population population;
        BinaryVector membership;
        for (std::size_t i = 0; i < n; ++i) {
            Individual person;
            person.id = static_cast<Id>(i);
            person.features_start = rng.normal_vector(2);
            person.features_end = person.features_start;
            population.push_back(std::move(person));
            membership.push_back(rng.bernoulli(0.5) ? 1 : 0);
        }
        membership[0] = 0;
        membership[n - 1] = 1;

        CampaignSpec spec;
        spec.budget_fraction = 0.25;
        const CampaignSelection selection = step_one(population, treatment, control, spec);
        BinaryVector preds;
        for (const auto& person : population) {
            preds.push_back(person.treated.value_or(false) ? 1 : 0);
        }

        // Genuine surrogate labels from the re-scoring step.
        for (auto& person : population) {
            person.kpi_observed = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        const SgtLabels sgt = step_two(population, selection, treatment, control);
        BinaryVector sgt_labels;
        BinaryVector random_labels;
        for (const auto& person : population) {
            sgt_labels.push_back(sgt.label_of(person.id));
            random_labels.push_back(rng.bernoulli(0.3) ? 1 : 0);
        }

        const FairnessReport base = evaluate_all(preds, std::nullopt, membership);
        const FairnessReport with_random = evaluate_all(preds, random_labels, membership);
        const FairnessReport with_sgt = evaluate_all(preds, sgt_labels, membership);
        for (Metric metric : {Metric::SP, Metric::DI}) {
            const MetricResult* a = base.find(metric);
            const MetricResult* b = with_random.find(metric);
            const MetricResult* c = with_sgt.find(metric);
            if ((a == nullptr) != (b == nullptr) || (a == nullptr) != (c == nullptr)) {
                *detail = "metric availability changed with labels";
                return false;
            }
            if (a != nullptr && (a->value != b->value || a->value != c->value)) {
                *detail = "SP/DI value changed with labels";
                return false;
            }
        }
    }
    *detail = "1000 instances, SP and DI bit-identical across label variants";
    return true;
}

// ---------------------------------------------------------------------------
// 5. Oracle recovery in the noise- and drift-free limit.
// ---------------------------------------------------------------------------
bool oracle_recovery(std::string* detail) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        SimConfig sim;
        sim.n_individuals = 5000;
        sim.n_features = 6;
        sim.seed = 1000 + seed;
        sim.noise_level = 0.0;
        sim.drift_magnitude = 0.0;
        sim.quadrant_mix = {0.25, 0.25, 0.25, 0.25};

        SimConfig train_sim = sim;
        train_sim.seed = mix_seed(sim.seed, 777);
        const SyntheticCampaign train_campaign = generate_population(train_sim);
        Eigen::MatrixXd X(train_campaign.size(), sim.n_features);
        Eigen::VectorXi y_treat(train_campaign.size());
        Eigen::VectorXi y_control(train_campaign.size());
        for (std::size_t i = 0; i < train_campaign.size(); ++i) {
            X.row(static_cast<Eigen::Index>(i)) =
                train_campaign.individuals[i].features_start.transpose();
            y_treat[static_cast<Eigen::Index>(i)] = train_campaign.observed_outcomes[i][0];
            y_control[static_cast<Eigen::Index>(i)] = train_campaign.observed_outcomes[i][1];
        }
        TrainConfig train_cfg;
        train_cfg.max_iters = 300;
        train_cfg.seed = seed;
        const Classifier treatment = train_logistic(X, y_treat, train_cfg);
        const Classifier control = train_logistic(X, y_control, train_cfg);

        SyntheticCampaign campaign = generate_population(sim);
        CampaignSpec spec;
        spec.budget_fraction = 0.10;
        spec.intervention_cost = 0.25;  // dyadic: profit sums are exact
        const CampaignSelection selection =
            step_one(campaign.individuals, treatment, control, spec);
        observe_kpi(campaign, selection.intervention);
        const SgtLabels labels = step_two(campaign.individuals, selection, treatment, control);

        StrategyContext context;
        context.selection = &selection;
        context.sgt = &labels;
        const double profit_uplift =
            evaluate_strategy(Strategy::Uplift, campaign, spec, context).profit;
        const double profit_sgt = evaluate_strategy(Strategy::Sgt, campaign, spec, context).profit;
        const double profit_oracle_budgeted = oracle_actions_budgeted(campaign, spec).profit;

        if (profit_sgt != profit_oracle_budgeted) {
            *detail = "seed " + std::to_string(seed) + ": sgt profit " +
                      std::to_string(profit_sgt) + " != budgeted oracle " +
                      std::to_string(profit_oracle_budgeted);
            return false;
        }
        if (profit_oracle_budgeted > profit_uplift) {
            const double imp = gap_closed(profit_uplift, profit_sgt, profit_oracle_budgeted);
            if (imp != 100.0) {
                *detail = "seed " + std::to_string(seed) + ": gap_closed = " + std::to_string(imp);
                return false;
            }
        }
        // The surrogate selection must consist of persuadables only.
        for (Id id : labels.surrogate_treat) {
            if (campaign.quadrant_of(id) != Quadrant::Persuadable) {
                *detail = "seed " + std::to_string(seed) + ": non-persuadable in surrogate set";
                return false;
            }
        }
    }
    *detail = "10 seeds, surrogate selection = budgeted oracle exactly";
    return true;
}

// ---------------------------------------------------------------------------
// 6. Surrogate usefulness under noise at the published budget grid.
// ---------------------------------------------------------------------------
bool usefulness_under_noise(std::string* detail) {
    const auto configs = default_suite_configs(/*seed=*/20260810, /*count=*/10,
                                               /*n_individuals=*/17000, /*noise_level=*/0.1,
                                               /*drift_magnitude=*/0.05);
    const std::vector<double> budgets = {0.05, 0.10, 0.15, 0.20};
    const SuiteReport report = run_suite(configs, budgets);

    // Top-decile: positive mean and positive gap in at least 8 of 10 campaigns.
    const std::size_t decile = 1;  // budgets[1] == 0.10
    std::size_t positive = 0;
    std::size_t defined = 0;
    double total = 0.0;
    for (const auto& campaign : report.campaigns) {
        const auto& imp = campaign.cells[decile].gap.imp;
        if (!imp.has_value()) continue;
        ++defined;
        total += *imp;
        if (*imp > 0.0) ++positive;
    }
    const double mean_decile = defined > 0 ? total / double(defined) : 0.0;
    if (defined < 10 || positive < 8 || mean_decile <= 0.0) {
        *detail = "top-decile: defined=" + std::to_string(defined) +
                  " positive=" + std::to_string(positive) +
                  " mean=" + std::to_string(mean_decile);
        return false;
    }

    // Mean gap closed should rise with the budget, allowing one inversion.
    std::vector<double> means;
    for (const auto& aggregate : report.aggregates) {
        if (aggregate.n_defined == 0) {
            *detail = "budget " + std::to_string(aggregate.budget) + " has no defined gaps";
            return false;
        }
        means.push_back(aggregate.imp_mean);
    }
    std::size_t inversions = 0;
    for (std::size_t b = 1; b < means.size(); ++b) {
        if (means[b] < means[b - 1]) ++inversions;
    }
    char buffer[160];
    std::snprintf(buffer, sizeof(buffer),
                  "means %%: B5=%.1f B10=%.1f B15=%.1f B20=%.1f, top-decile positive %zu/10",
                  means[0], means[1], means[2], means[3], positive);
    *detail = buffer;
    return inversions <= 1;
}

// ---------------------------------------------------------------------------
// 7. Algorithm structural invariants over randomized campaigns.
// ---------------------------------------------------------------------------
bool structural_invariants(std::string* detail) {
    Rng rng(777);
    for (int iteration = 0; iteration < 10000; ++iteration) {
        const std::size_t n = 1 + rng.below(60);
        const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.below(4));
        Population population;
        for (std::size_t i = 0; i < n; ++i) {
            Individual person;
            person.id = static_cast<Id>(rng.below(100000));
            person.features_start = rng.normal_vector(d);
            person.features_end = rng.normal_vector(d);
            population.push_back(std::move(person));
        }
        // Ids must be unique; regenerate clashes.
        std::set<Id> seen;
        for (auto& person : population) {
            while (seen.count(person.id) > 0) ++person.id;
            seen.insert(person.id);
        }

        Classifier treatment;
        treatment.weights = rng.normal_vector(d + 1);
        Classifier control;
        control.weights = rng.normal_vector(d + 1);

        CampaignSpec spec;
        spec.budget_fraction = 0.01 + rng.uniform() * 0.99;
        const CampaignSelection selection = step_one(population, treatment, control, spec);

        // Partition of the population.
        if (selection.intervention.size() + selection.no_intervention.size() != n) {
            *detail = "selection does not cover the population";
            return false;
        }
        std::set<Id> ids(selection.intervention.begin(), selection.intervention.end());
        for (Id id : selection.no_intervention) {
            if (!ids.insert(id).second) {
                *detail = "selection sets overlap";
                return false;
            }
        }
        if (ids != seen) {
            *detail = "selection ids differ from population ids";
            return false;
        }

        for (auto& person : population) {
            person.kpi_observed = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
        const SgtLabels labels = step_two(population, selection, treatment, control);

        // Cut conservation and partition of the surrogate sets.
        if (labels.surrogate_treat.size() != selection.size ||
            labels.surrogate_treat.size() + labels.surrogate_no_treat.size() != n) {
            *detail = "surrogate partition broken";
            return false;
        }

        // Complementary-model rule on a random individual.
        const auto& person = population[rng.below(n)];
        Classifier perturbed;
        perturbed.weights = rng.normal_vector(d + 1);
        const double base = rescore(person, treatment, control);
        const double changed = person.treated.value()
                                   ? rescore(person, perturbed, control)
                                   : rescore(person, treatment, perturbed);
        if (base != changed) {
            *detail = "surrogate lift depends on the unused model";
            return false;
        }

        // Permutation invariance every few iterations.
        if (iteration % 10 == 0) {
            Population shuffled = population;
            for (std::size_t i = shuffled.size(); i > 1; --i) {
                std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
            }
            const SgtLabels again = step_two(shuffled, selection, treatment, control);
            if (again.surrogate_treat != labels.surrogate_treat ||
                again.surrogate_lift != labels.surrogate_lift) {
                *detail = "surrogate labels depend on population order";
                return false;
            }
        }
    }
    *detail = "10000 randomized campaigns";
    return true;
}

// ---------------------------------------------------------------------------
// 8. Byte-identical suite reports under a fixed seed.
// ---------------------------------------------------------------------------
bool suite_determinism(std::string* detail) {
    const auto configs = default_suite_configs(/*seed=*/20260810, /*count=*/10,
                                               /*n_individuals=*/17000, /*noise_level=*/0.1,
                                               /*drift_magnitude=*/0.05);
    const std::vector<double> budgets = {0.05, 0.10, 0.15, 0.20};
    const std::string first = suite_report_to_json(run_suite(configs, budgets));
    const std::string second = suite_report_to_json(run_suite(configs, budgets));
    *detail = std::to_string(first.size()) + " bytes per report";
    return !first.empty() && first == second;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"1. Imp arithmetic reproduction (85% / 16% within 0.5pp)", 1.0, imp_arithmetic},
        {"2. Fairness band reproduction of published values", 1.0, band_reproduction},
        {"3. Metric oracle equivalence, exhaustive length <= 8", 60.0, metric_oracle_equivalence},
        {"4. Label-free invariance of SP and DI", 10.0, label_free_invariance},
        {"5. Oracle recovery in the noiseless limit", 120.0, oracle_recovery},
        {"6. Surrogate usefulness under noise", 300.0, usefulness_under_noise},
        {"7. Structural invariants, 10000 randomized cases", 60.0, structural_invariants},
        {"8. Byte-identical suite determinism", 900.0, suite_determinism},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        std::string info;
        bool ok = false;
        try {
            ok = criterion.body(&info);
        } catch (const std::exception& error) {
            info = std::string("exception: ") + error.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = elapsed <= criterion.time_limit_seconds;
        if (!in_time) {
            info += " [exceeded " + std::to_string(criterion.time_limit_seconds) + "s limit]";
        }
        const bool passed = ok && in_time;
        std::printf("[%s] %s (%.2fs) %s\n", passed ? "PASS" : "FAIL", criterion.name.c_str(),
                    elapsed, info.c_str());
        std::fflush(stdout);
        if (!passed) ++failures;
    }
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
