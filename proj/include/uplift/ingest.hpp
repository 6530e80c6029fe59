#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "uplift/campaign.hpp"
#include "uplift/simulator.hpp"

namespace uplift {

// One campaign of the portfolio file: type, channels, difficulty, duration
// in days, and the reward handed to the customer (= cost to the company).
struct PortfolioCampaign {
    int id = 0;
    std::string type;
    std::string channels;
    double difficulty = 0.0;
    int duration_days = 0;
    double reward = 0.0;
};

// Per-customer monthly treatment/control record after ingestion. An empty
// campaign ("None" in the emitted CSV) denotes non-promotional behavior.
// Purchases are normalized to a 30-day rate; promotional windows scale by
// 30 / duration, the control remainder by 30 / (30 - duration).
struct EventRecord {
    Id customer = 0;
    int month = 0;
    std::optional<int> campaign;  // empty = control (non-promotional) row
    double purchase_30d = 0.0;    // finite, >= 0
    int profitable = 0;           // purchase_30d > 0
    std::map<std::string, int> protected_attrs;
};

struct IngestOptions {
    // Binarization thresholds; empty means "median over profiles".
    std::optional<double> age_threshold;
    std::optional<double> income_threshold;
    int days_per_month = 30;
};

struct IngestResult {
    std::vector<EventRecord> records;
    std::size_t rows_skipped = 0;
    std::vector<std::string> warnings;  // one entry per skipped row, with line number
    double age_threshold = 0.0;
    double income_threshold = 0.0;
};

// Parses the three CSV inputs and produces the monthly treatment/control
// records. Malformed rows are skipped, counted, and reported with their line
// number; a missing required column is fatal (MissingColumn). Duplicate
// event rows are dropped and missing profile values are imputed with zero.
//
// events CSV:    customer_id,day,kind,campaign_id,amount
//                kind is offer_received (campaign_id set) or transaction
// profiles CSV:  customer_id,age,gender,income,became_member_day
// portfolio CSV: campaign_id,type,channels,difficulty,duration,reward
IngestResult ingest_events(const std::string& events_csv, const std::string& profiles_csv,
                           const std::string& portfolio_csv, const IngestOptions& options = {});

std::string records_to_csv(const std::vector<EventRecord>& records);

// Assembles per-(customer, month, arm) observation units for one campaign
// into populations ready for model training: features are lagged and
// cumulative 30-day purchase rates plus tenure. The last active month forms
// the test population, the second-to-last the validation population, earlier
// months the training population.
struct AssembledPopulations {
    SyntheticCampaign train;
    SyntheticCampaign validation;
    SyntheticCampaign test;
};

AssembledPopulations assemble_populations(const std::vector<EventRecord>& records,
                                          int campaign_id);

}  // namespace uplift
