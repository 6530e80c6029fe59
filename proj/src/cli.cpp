#include "uplift/cli.hpp"

#include <cstdlib>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "uplift/csv.hpp"
#include "uplift/fsio.hpp"
#include "uplift/harness.hpp"
#include "uplift/ingest.hpp"
#include "uplift/rng.hpp"

namespace uplift {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::uint64_t resolve_seed(const CLI::Option* seed_option, std::uint64_t parsed) {
    if (seed_option->count() > 0) return parsed;
    if (const char* env = std::getenv("UPLIFT_SGT_SEED"); env != nullptr && *env != '\0') {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw_error(ErrorCode::InvalidConfig,
                        std::string("UPLIFT_SGT_SEED is not an integer: ") + env);
        }
    }
    return 0;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_file_atomic(path, text);
    }
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::size_t n = 17000;
    std::size_t features = 6;
    double noise = 0.1;
    double drift = 0.05;
    double positive_rate = 0.15;
    std::vector<double> quadrant_mix;
    double protected_correlation = 0.3;
    bool no_counterfactuals = false;
    std::string out_path;
};

int run_simulate(const SimulateArgs& args, std::ostream& out) {
    SimConfig config;
    config.n_individuals = args.n;
    config.n_features = args.features;
    config.seed = resolve_seed(args.seed_opt, args.seed);
    config.noise_level = args.noise;
    config.drift_magnitude = args.drift;
    config.protected_correlation = args.protected_correlation;
    config.positive_rate = args.positive_rate;
    if (!args.quadrant_mix.empty()) {
        if (args.quadrant_mix.size() != 4) {
            throw_error(ErrorCode::InvalidConfig, "--quadrant-mix needs exactly four shares");
        }
        for (std::size_t k = 0; k < 4; ++k) config.quadrant_mix[k] = args.quadrant_mix[k];
    } else {
        config.quadrant_mix = derive_quadrant_mix(config.positive_rate);
    }

    SyntheticCampaign campaign = apply_drift(generate_population(config), config.drift_magnitude,
                                             drift_seed_for(config.seed));
    emit(population_to_csv(campaign, !args.no_counterfactuals), args.out_path, out);
    return kExitOk;
}

// --- ingest -----------------------------------------------------------------

struct IngestArgs {
    std::string events_path;
    std::string profiles_path;
    std::string portfolio_path;
    std::string records_out;
    std::string population_out;
    int campaign = 0;
    CLI::Option* campaign_opt = nullptr;
    std::optional<double> age_threshold;
    std::optional<double> income_threshold;
};

int run_ingest(const IngestArgs& args, std::ostream& out, std::ostream& err) {
    IngestOptions options;
    options.age_threshold = args.age_threshold;
    options.income_threshold = args.income_threshold;
    const IngestResult result =
        ingest_events(read_text_file(args.events_path), read_text_file(args.profiles_path),
                      read_text_file(args.portfolio_path), options);
    for (const auto& warning : result.warnings) {
        err << "warning: " << warning << '\n';
    }
    err << "ingest: " << result.records.size() << " records, " << result.rows_skipped
        << " malformed rows skipped (age threshold " << result.age_threshold
        << ", income threshold " << result.income_threshold << ")\n";

    emit(records_to_csv(result.records), args.records_out, out);

    if (!args.population_out.empty()) {
        if (args.campaign_opt->count() == 0) {
            throw_error(ErrorCode::InvalidConfig, "--population-out requires --campaign");
        }
        const AssembledPopulations populations =
            assemble_populations(result.records, args.campaign);
        write_text_file_atomic(args.population_out + "_train.csv",
                               population_to_csv(populations.train, false));
        write_text_file_atomic(args.population_out + "_valid.csv",
                               population_to_csv(populations.validation, false));
        write_text_file_atomic(args.population_out + "_test.csv",
                               population_to_csv(populations.test, false));
        err << "ingest: wrote " << populations.train.size() << "/" << populations.validation.size()
            << "/" << populations.test.size() << " train/valid/test rows for campaign "
            << args.campaign << '\n';
    }
    return kExitOk;
}

// --- train ------------------------------------------------------------------

struct TrainArgs {
    std::string population_path;
    std::string out_dir;
    std::string strategy = "two_model";
    TrainConfig config;
    CLI::Option* seed_opt = nullptr;
    std::uint64_t seed = 0;
};

// Builds (features, label) rows from a population. With counterfactual
// columns present every individual contributes to both arms; otherwise the
// treated flag routes each row to its arm.
void training_rows(const SyntheticCampaign& campaign, int arm, Eigen::MatrixXd* X,
                   Eigen::VectorXi* y) {
    const bool has_counterfactuals =
        campaign.observed_outcomes.size() == campaign.individuals.size();
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < campaign.individuals.size(); ++i) {
        const auto& person = campaign.individuals[i];
        if (has_counterfactuals) {
            rows.push_back(static_cast<Eigen::Index>(i));
        } else {
            if (!person.treated.has_value()) {
                throw_error(ErrorCode::InvalidConfig,
                            "population rows need a treated flag (or counterfactual columns)");
            }
            if ((*person.treated ? 0 : 1) == arm) rows.push_back(static_cast<Eigen::Index>(i));
        }
    }
    if (rows.empty()) {
        throw_error(ErrorCode::DegenerateLabels, "no rows for arm " + std::to_string(arm));
    }
    const Eigen::Index dim = campaign.individuals.front().features_start.size();
    X->resize(static_cast<Eigen::Index>(rows.size()), dim);
    y->resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = static_cast<std::size_t>(rows[r]);
        const auto& person = campaign.individuals[i];
        X->row(static_cast<Eigen::Index>(r)) = person.features_start.transpose();
        if (has_counterfactuals) {
            (*y)[static_cast<Eigen::Index>(r)] = campaign.observed_outcomes[i][arm];
        } else {
            if (!person.kpi_observed.has_value()) {
                throw_error(ErrorCode::MissingKpi,
                            "row " + std::to_string(person.id) + " has no KPI to train on");
            }
            (*y)[static_cast<Eigen::Index>(r)] = *person.kpi_observed > 0.5 ? 1 : 0;
        }
    }
}

int run_train(const TrainArgs& args, std::ostream& err) {
    const SyntheticCampaign campaign = population_from_csv(read_text_file(args.population_path));
    TrainConfig config = args.config;
    config.seed = resolve_seed(args.seed_opt, args.seed);

    const std::string dir = args.out_dir.empty() ? "." : args.out_dir;
    if (args.strategy == "two_model") {
        Eigen::MatrixXd X;
        Eigen::VectorXi y;
        training_rows(campaign, 0, &X, &y);
        TrainConfig treatment_cfg = config;
        treatment_cfg.seed = mix_seed(config.seed, 1);
        const Classifier treatment = train_logistic(X, y, treatment_cfg);
        save_classifier(treatment, dir + "/treatment.json");

        training_rows(campaign, 1, &X, &y);
        TrainConfig control_cfg = config;
        control_cfg.seed = mix_seed(config.seed, 2);
        const Classifier control = train_logistic(X, y, control_cfg);
        save_classifier(control, dir + "/control.json");
        err << "train: wrote " << dir << "/treatment.json and " << dir << "/control.json\n";
        return kExitOk;
    }
    if (args.strategy == "dummy") {
        // Single model over [features, treatment indicator].
        Eigen::MatrixXd X0;
        Eigen::VectorXi y0;
        training_rows(campaign, 0, &X0, &y0);
        Eigen::MatrixXd X1;
        Eigen::VectorXi y1;
        training_rows(campaign, 1, &X1, &y1);
        Eigen::MatrixXd X(X0.rows() + X1.rows(), X0.cols() + 1);
        Eigen::VectorXi y(y0.size() + y1.size());
        X.topLeftCorner(X0.rows(), X0.cols()) = X0;
        X.topRightCorner(X0.rows(), 1).setOnes();
        X.bottomLeftCorner(X1.rows(), X1.cols()) = X1;
        X.bottomRightCorner(X1.rows(), 1).setZero();
        y.head(y0.size()) = y0;
        y.tail(y1.size()) = y1;
        const Classifier model = train_logistic(X, y, config);
        save_classifier(model, dir + "/dummy.json");
        err << "train: wrote " << dir << "/dummy.json\n";
        return kExitOk;
    }
    throw_error(ErrorCode::InvalidConfig, "unsupported training strategy: " + args.strategy);
}

// --- sgt --------------------------------------------------------------------

struct SgtArgs {
    std::string population_path;
    std::string treatment_model_path;
    std::string control_model_path;
    std::string dummy_model_path;
    double budget = 0.0;
    CLI::Option* budget_opt = nullptr;
    std::string out_path;
};

int run_sgt(const SgtArgs& args, std::ostream& out, std::ostream& err) {
    SyntheticCampaign campaign = population_from_csv(read_text_file(args.population_path));
    Classifier treatment;
    Classifier control;
    if (!args.dummy_model_path.empty()) {
        // A dummy-variable model specializes into the two arm models by
        // pinning its trailing treatment indicator.
        const Classifier dummy = load_classifier(args.dummy_model_path);
        treatment = fold_dummy(dummy, 1);
        control = fold_dummy(dummy, 0);
    } else {
        if (args.treatment_model_path.empty() || args.control_model_path.empty()) {
            throw_error(ErrorCode::MissingModels,
                        "pass --treatment-model and --control-model, or --dummy-model");
        }
        treatment = load_classifier(args.treatment_model_path);
        control = load_classifier(args.control_model_path);
    }

    CampaignSelection selection;
    if (args.budget_opt->count() > 0) {
        // Fresh selection, then draw the KPI from the realized arm; needs the
        // counterfactual observation columns.
        CampaignSpec spec;
        spec.budget_fraction = args.budget;
        selection = step_one(campaign.individuals, treatment, control, spec);
        observe_kpi(campaign, selection.intervention);
        err << "sgt: selected " << selection.size << " of " << campaign.size()
            << " individuals at budget " << args.budget << '\n';
    } else {
        // Reuse the selection recorded in the population file.
        for (auto& person : campaign.individuals) {
            if (!person.treated.has_value()) {
                throw_error(ErrorCode::InvalidConfig,
                            "population has rows without a treated flag; pass --budget to run"
                            " the selection step");
            }
            (person.treated.value() ? selection.intervention : selection.no_intervention)
                .push_back(person.id);
        }
        selection.size = selection.intervention.size();
        if (selection.size == 0) {
            throw_error(ErrorCode::EmptyPopulation, "population has no treated rows");
        }
    }

    const SgtLabels labels = step_two(campaign.individuals, selection, treatment, control);
    emit(sgt_labels_to_csv(campaign.individuals, labels), args.out_path, out);
    return kExitOk;
}

// --- fairness ---------------------------------------------------------------

struct FairnessArgs {
    std::string preds_path;
    std::string labels_path;
    std::string membership_path;
    std::string attribute = "attribute";
    std::string out_path;
};

BinaryVector binary_column(const std::vector<std::pair<Id, double>>& pairs, const char* what) {
    BinaryVector values;
    values.reserve(pairs.size());
    for (const auto& [id, value] : pairs) {
        if (value != 0.0 && value != 1.0) {
            throw_error(ErrorCode::NonBinaryInput, std::string(what) + " for id " +
                                                       std::to_string(id) + " must be 0 or 1");
        }
        values.push_back(static_cast<int>(value));
    }
    return values;
}

int run_fairness(const FairnessArgs& args, std::ostream& out) {
    auto preds_pairs = id_value_pairs_from_csv(read_text_file(args.preds_path));
    auto membership_pairs = id_value_pairs_from_csv(read_text_file(args.membership_path));
    const auto by_id = [](const auto& a, const auto& b) { return a.first < b.first; };
    std::sort(preds_pairs.begin(), preds_pairs.end(), by_id);
    std::sort(membership_pairs.begin(), membership_pairs.end(), by_id);
    if (preds_pairs.size() != membership_pairs.size()) {
        throw_error(ErrorCode::LengthMismatch, "preds and membership cover different ids");
    }
    for (std::size_t i = 0; i < preds_pairs.size(); ++i) {
        if (preds_pairs[i].first != membership_pairs[i].first) {
            throw_error(ErrorCode::LengthMismatch, "preds and membership cover different ids");
        }
    }

    const BinaryVector preds = binary_column(preds_pairs, "prediction");
    const BinaryVector membership = binary_column(membership_pairs, "membership");
    std::optional<BinaryVector> labels;
    if (!args.labels_path.empty()) {
        auto label_pairs = id_value_pairs_from_csv(read_text_file(args.labels_path));
        std::sort(label_pairs.begin(), label_pairs.end(), by_id);
        if (label_pairs.size() != preds_pairs.size()) {
            throw_error(ErrorCode::LengthMismatch, "labels cover different ids than preds");
        }
        for (std::size_t i = 0; i < label_pairs.size(); ++i) {
            if (label_pairs[i].first != preds_pairs[i].first) {
                throw_error(ErrorCode::LengthMismatch, "labels cover different ids than preds");
            }
        }
        labels = binary_column(label_pairs, "label");
    }

    const FairnessReport report = evaluate_all(preds, labels, membership, args.attribute);
    emit(fairness_report_to_json(report) + "\n", args.out_path, out);
    return kExitOk;
}

// --- suite ------------------------------------------------------------------

struct SuiteArgs {
    std::uint64_t seed = 0;
    CLI::Option* seed_opt = nullptr;
    std::size_t campaigns = 10;
    std::vector<double> budgets = {0.05, 0.10, 0.15, 0.20};
    std::size_t n = 17000;
    double noise = 0.1;
    double drift = 0.05;
    std::string json_out;
    std::string csv_out;
};

int run_suite_cmd(const SuiteArgs& args, std::ostream& out, std::ostream& err) {
    const std::uint64_t seed = resolve_seed(args.seed_opt, args.seed);
    const auto configs =
        default_suite_configs(seed, args.campaigns, args.n, args.noise, args.drift);
    const SuiteReport report = run_suite(configs, args.budgets);
    emit(suite_report_to_json(report), args.json_out, out);
    if (!args.csv_out.empty()) {
        emit(suite_report_to_csv(report), args.csv_out, out);
    }
    err << "suite: " << args.campaigns << " campaigns x " << args.budgets.size() << " budgets\n";
    return kExitOk;
}

// --- report -----------------------------------------------------------------

struct ReportArgs {
    std::string input_path;
    std::string csv_out;
    bool summary = false;
};

int run_report(const ReportArgs& args, std::ostream& out) {
    const nlohmann::json j =
        nlohmann::json::parse(read_text_file(args.input_path), nullptr, false);
    if (j.is_discarded() || !j.contains("campaigns")) {
        throw_error(ErrorCode::MalformedRow, "input is not a suite report");
    }

    if (!args.csv_out.empty() || !args.summary) {
        std::ostringstream csv;
        csv.precision(17);
        csv << "campaign,budget,attribute,mode,metric,value,band,requires_labels\n";
        for (const auto& campaign : j["campaigns"]) {
            for (const auto& cell : campaign["cells"]) {
                if (!cell.contains("fairness")) continue;  // failed cell
                for (const auto& fairness : cell["fairness"]) {
                    for (const auto& result : fairness["results"]) {
                        csv << campaign["campaign"].get<std::size_t>() << ','
                            << cell["budget"].get<double>() << ','
                            << fairness["attribute"].get<std::string>() << ','
                            << fairness["mode"].get<std::string>() << ','
                            << result["metric"].get<std::string>() << ','
                            << result["value"].get<double>() << ','
                            << result["band"].get<std::string>() << ','
                            << (result["requires_labels"].get<bool>() ? 1 : 0) << '\n';
                    }
                }
            }
        }
        emit(csv.str(), args.csv_out, out);
    }

    if (args.summary) {
        std::ostringstream table;
        table << "budget,n_defined,imp_max,imp_min,imp_mean\n";
        for (const auto& aggregate : j["aggregates"]) {
            table << aggregate["budget"].get<double>() << ','
                  << aggregate["n_defined"].get<std::size_t>();
            if (aggregate.contains("imp_mean")) {
                table << ',' << aggregate["imp_max"].get<double>() << ','
                      << aggregate["imp_min"].get<double>() << ','
                      << aggregate["imp_mean"].get<double>();
            } else {
                table << ",,,";
            }
            table << '\n';
        }
        out << table.str();
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Uplift campaign toolkit: simulation, surrogate labels, fairness evaluation"};
    app.name("uplift_sgt");
    app.require_subcommand(1);

    SimulateArgs simulate_args;
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a synthetic campaign population and write it as CSV");
    simulate_args.seed_opt = simulate->add_option("--seed", simulate_args.seed, "Random seed");
    simulate->add_option("--n", simulate_args.n, "Population size");
    simulate->add_option("--features", simulate_args.features, "Feature dimension (>= 2)");
    simulate->add_option("--noise", simulate_args.noise, "Outcome noise level in [0, 1]");
    simulate->add_option("--drift", simulate_args.drift, "Feature drift magnitude");
    simulate->add_option("--positive-rate", simulate_args.positive_rate,
                         "Target per-arm positive incidence");
    simulate->add_option("--quadrant-mix", simulate_args.quadrant_mix,
                         "Explicit segment shares: sure_thing,lost_cause,do_not_disturb,persuadable")
        ->delimiter(',');
    simulate->add_option("--protected-correlation", simulate_args.protected_correlation,
                         "Correlation between the age attribute and persuadability");
    simulate->add_flag("--no-counterfactuals", simulate_args.no_counterfactuals,
                       "Omit the counterfactual outcome columns");
    simulate->add_option("--out", simulate_args.out_path, "Output CSV path (default stdout)");

    IngestArgs ingest_args;
    auto* ingest = app.add_subcommand(
        "ingest", "Normalize an event log into monthly treatment/control records");
    ingest->add_option("--events", ingest_args.events_path, "Events CSV")->required();
    ingest->add_option("--profiles", ingest_args.profiles_path, "Customer profiles CSV")
        ->required();
    ingest->add_option("--portfolio", ingest_args.portfolio_path, "Campaign portfolio CSV")
        ->required();
    ingest->add_option("--records-out", ingest_args.records_out,
                       "Records CSV path (default stdout)");
    ingest->add_option("--population-out", ingest_args.population_out,
                       "Prefix for train/valid/test population CSVs");
    ingest_args.campaign_opt =
        ingest->add_option("--campaign", ingest_args.campaign, "Campaign id for --population-out");
    ingest->add_option("--age-threshold", ingest_args.age_threshold,
                       "Age binarization threshold (default median)");
    ingest->add_option("--income-threshold", ingest_args.income_threshold,
                       "Income binarization threshold (default median)");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Fit response models from a population CSV");
    train->add_option("--population", train_args.population_path, "Population CSV")->required();
    train->add_option("--out-dir", train_args.out_dir, "Directory for model JSON files");
    train->add_option("--strategy", train_args.strategy, "two_model or dummy");
    train->add_option("--lr", train_args.config.learning_rate, "Learning rate");
    train->add_option("--iters", train_args.config.max_iters, "Max gradient-descent iterations");
    train->add_option("--tol", train_args.config.tol, "Convergence tolerance");
    train->add_option("--l2", train_args.config.l2, "L2 regularization strength");
    train->add_option("--oversample-ratio", train_args.config.oversample_ratio,
                      "Target minority share");
    train->add_option("--jitter", train_args.config.jitter_scale, "Oversample jitter scale");
    train_args.seed_opt = train->add_option("--seed", train_args.seed, "Training seed");

    SgtArgs sgt_args;
    auto* sgt = app.add_subcommand(
        "sgt", "Re-score a finished campaign and emit surrogate ground-truth labels");
    sgt->add_option("--population", sgt_args.population_path, "Population CSV")->required();
    sgt->add_option("--treatment-model", sgt_args.treatment_model_path, "Treatment model JSON");
    sgt->add_option("--control-model", sgt_args.control_model_path, "Control model JSON");
    sgt->add_option("--dummy-model", sgt_args.dummy_model_path,
                    "Dummy-variable model JSON (replaces the two arm models)");
    sgt_args.budget_opt = sgt->add_option(
        "--budget", sgt_args.budget, "Run the selection step at this budget fraction first");
    sgt->add_option("--out", sgt_args.out_path, "Output CSV path (default stdout)");

    FairnessArgs fairness_args;
    auto* fairness = app.add_subcommand(
        "fairness", "Evaluate binary fairness metrics from id,value CSV columns");
    fairness->add_option("--preds", fairness_args.preds_path, "Predictions CSV (id,value)")
        ->required();
    fairness->add_option("--labels", fairness_args.labels_path,
                         "Truth labels CSV; omit for the label-free base evaluation");
    fairness->add_option("--membership", fairness_args.membership_path, "Membership CSV")
        ->required();
    fairness->add_option("--attribute", fairness_args.attribute, "Attribute name for the report");
    fairness->add_option("--out", fairness_args.out_path, "Output JSON path (default stdout)");

    SuiteArgs suite_args;
    auto* suite = app.add_subcommand(
        "suite", "Run the full simulated strategy comparison and fairness sweep");
    suite_args.seed_opt = suite->add_option("--seed", suite_args.seed, "Root seed");
    suite->add_option("--campaigns", suite_args.campaigns, "Number of campaigns");
    suite->add_option("--budgets", suite_args.budgets, "Budget fractions")->delimiter(',');
    suite->add_option("--n", suite_args.n, "Population size per campaign");
    suite->add_option("--noise", suite_args.noise, "Outcome noise level");
    suite->add_option("--drift", suite_args.drift, "Feature drift magnitude");
    suite->add_option("--json", suite_args.json_out, "Suite JSON path (default stdout)");
    suite->add_option("--csv", suite_args.csv_out, "Flat fairness CSV path");

    ReportArgs report_args;
    auto* report =
        app.add_subcommand("report", "Render a suite JSON report as CSV or a summary table");
    report->add_option("--input", report_args.input_path, "Suite report JSON")->required();
    report->add_option("--csv", report_args.csv_out, "CSV output path (default stdout)");
    report->add_flag("--summary", report_args.summary, "Print the per-budget gap summary");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& error) {
        err << "error: " << error.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (simulate->parsed()) return run_simulate(simulate_args, out);
        if (ingest->parsed()) return run_ingest(ingest_args, out, err);
        if (train->parsed()) return run_train(train_args, err);
        if (sgt->parsed()) return run_sgt(sgt_args, out, err);
        if (fairness->parsed()) return run_fairness(fairness_args, out);
        if (suite->parsed()) return run_suite_cmd(suite_args, out, err);
        if (report->parsed()) return run_report(report_args, out);
    } catch (const Error& error) {
        err << "error: " << error.what() << '\n';
        return error.code() == ErrorCode::InvalidConfig ? kExitUsage : kExitData;
    } catch (const std::exception& error) {
        err << "error: " << error.what() << '\n';
        return kExitData;
    }
    err << "error: no subcommand given\n\n" << app.help();
    return kExitUsage;
}

}  // namespace uplift
