#include "uplift/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "uplift/csv.hpp"

namespace uplift {

namespace {

struct HeaderIndex {
    std::vector<std::string> names;

    std::size_t require(const std::string& name, const char* file) const {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            throw_error(ErrorCode::MissingColumn,
                        std::string(file) + " CSV lacks column '" + name + "'");
        }
        return static_cast<std::size_t>(it - names.begin());
    }
};

struct Profile {
    double age = 0.0;
    int gender_code = 0;  // F -> 1, everything else -> 0
    double income = 0.0;
    long long member_day = 0;
};

struct Offer {
    int campaign = 0;
    long long day = 0;
    int duration = 0;
};

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

IngestResult ingest_events(const std::string& events_csv, const std::string& profiles_csv,
                           const std::string& portfolio_csv, const IngestOptions& options) {
    IngestResult result;
    const int month_days = options.days_per_month;
    if (month_days <= 0) {
        throw_error(ErrorCode::InvalidConfig, "days_per_month must be positive");
    }

    // Portfolio: campaign durations and rewards.
    std::map<int, PortfolioCampaign> portfolio;
    {
        std::istringstream in(portfolio_csv);
        std::string line;
        if (!std::getline(in, line)) {
            throw_error(ErrorCode::MissingColumn, "portfolio CSV is empty");
        }
        HeaderIndex header{split_csv_line(line)};
        const std::size_t id_col = header.require("campaign_id", "portfolio");
        const std::size_t type_col = header.require("type", "portfolio");
        const std::size_t channels_col = header.require("channels", "portfolio");
        const std::size_t difficulty_col = header.require("difficulty", "portfolio");
        const std::size_t duration_col = header.require("duration", "portfolio");
        const std::size_t reward_col = header.require("reward", "portfolio");
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            try {
                if (fields.size() != header.names.size()) {
                    throw_error(ErrorCode::MalformedRow,
                                "line " + std::to_string(line_no) + ": wrong field count");
                }
                PortfolioCampaign campaign;
                campaign.id = static_cast<int>(parse_csv_long(fields[id_col], line_no));
                campaign.type = fields[type_col];
                campaign.channels = fields[channels_col];
                campaign.difficulty =
                    fields[difficulty_col].empty() ? 0.0
                                                   : parse_csv_double(fields[difficulty_col], line_no);
                campaign.duration_days =
                    static_cast<int>(parse_csv_long(fields[duration_col], line_no));
                campaign.reward =
                    fields[reward_col].empty() ? 0.0 : parse_csv_double(fields[reward_col], line_no);
                if (campaign.duration_days <= 0) {
                    throw_error(ErrorCode::MalformedRow,
                                "line " + std::to_string(line_no) + ": duration must be positive");
                }
                portfolio[campaign.id] = campaign;
            } catch (const Error& error) {
                if (error.code() == ErrorCode::MalformedRow) {
                    ++result.rows_skipped;
                    result.warnings.push_back(std::string("portfolio ") + error.what());
                    continue;
                }
                throw;
            }
        }
    }

    // Profiles: protected attributes, missing values imputed with zero.
    std::map<Id, Profile> profiles;
    std::vector<double> ages;
    std::vector<double> incomes;
    {
        std::istringstream in(profiles_csv);
        std::string line;
        if (!std::getline(in, line)) {
            throw_error(ErrorCode::MissingColumn, "profiles CSV is empty");
        }
        HeaderIndex header{split_csv_line(line)};
        const std::size_t id_col = header.require("customer_id", "profiles");
        const std::size_t age_col = header.require("age", "profiles");
        const std::size_t gender_col = header.require("gender", "profiles");
        const std::size_t income_col = header.require("income", "profiles");
        const std::size_t member_col = header.require("became_member_day", "profiles");
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto fields = split_csv_line(line);
            try {
                if (fields.size() != header.names.size()) {
                    throw_error(ErrorCode::MalformedRow,
                                "line " + std::to_string(line_no) + ": wrong field count");
                }
                Profile profile;
                const Id id = parse_csv_long(fields[id_col], line_no);
                profile.age =
                    fields[age_col].empty() ? 0.0 : parse_csv_double(fields[age_col], line_no);
                profile.gender_code = fields[gender_col] == "F" ? 1 : 0;
                profile.income =
                    fields[income_col].empty() ? 0.0 : parse_csv_double(fields[income_col], line_no);
                profile.member_day =
                    fields[member_col].empty() ? 0 : parse_csv_long(fields[member_col], line_no);
                profiles[id] = profile;
                ages.push_back(profile.age);
                incomes.push_back(profile.income);
            } catch (const Error& error) {
                if (error.code() == ErrorCode::MalformedRow) {
                    ++result.rows_skipped;
                    result.warnings.push_back(std::string("profiles ") + error.what());
                    continue;
                }
                throw;
            }
        }
    }

    result.age_threshold = options.age_threshold.value_or(median(ages));
    result.income_threshold = options.income_threshold.value_or(median(incomes));

    // Events: dedup exact duplicates, split into offers and transactions.
    struct Transaction {
        Id customer;
        long long day;
        double amount;
    };
    std::map<Id, std::vector<Offer>> offers;
    std::vector<Transaction> transactions;
    {
        std::istringstream in(events_csv);
        std::string line;
        if (!std::getline(in, line)) {
            throw_error(ErrorCode::MissingColumn, "events CSV is empty");
        }
        HeaderIndex header{split_csv_line(line)};
        const std::size_t id_col = header.require("customer_id", "events");
        const std::size_t day_col = header.require("day", "events");
        const std::size_t kind_col = header.require("kind", "events");
        const std::size_t campaign_col = header.require("campaign_id", "events");
        const std::size_t amount_col = header.require("amount", "events");

        std::set<std::string> seen;
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            if (!seen.insert(line).second) continue;  // duplicate row dropped
            const auto fields = split_csv_line(line);
            try {
                if (fields.size() != header.names.size()) {
                    throw_error(ErrorCode::MalformedRow,
                                "line " + std::to_string(line_no) + ": wrong field count");
                }
                const Id customer = parse_csv_long(fields[id_col], line_no);
                const long long day = parse_csv_long(fields[day_col], line_no);
                const std::string& kind = fields[kind_col];
                if (kind == "offer_received") {
                    const int campaign =
                        static_cast<int>(parse_csv_long(fields[campaign_col], line_no));
                    const auto it = portfolio.find(campaign);
                    if (it == portfolio.end()) {
                        throw_error(ErrorCode::MalformedRow,
                                    "line " + std::to_string(line_no) + ": campaign " +
                                        std::to_string(campaign) + " is not in the portfolio");
                    }
                    offers[customer].push_back({campaign, day, it->second.duration_days});
                } else if (kind == "transaction") {
                    const double amount =
                        fields[amount_col].empty() ? 0.0
                                                   : parse_csv_double(fields[amount_col], line_no);
                    if (amount < 0.0) {
                        throw_error(ErrorCode::MalformedRow,
                                    "line " + std::to_string(line_no) + ": negative amount");
                    }
                    transactions.push_back({customer, day, amount});
                } else {
                    throw_error(ErrorCode::MalformedRow, "line " + std::to_string(line_no) +
                                                             ": unknown event kind '" + kind + "'");
                }
            } catch (const Error& error) {
                if (error.code() == ErrorCode::MalformedRow) {
                    ++result.rows_skipped;
                    result.warnings.push_back(std::string("events ") + error.what());
                    continue;
                }
                throw;
            }
        }
    }
    for (auto& [customer, list] : offers) {
        std::sort(list.begin(), list.end(),
                  [](const Offer& a, const Offer& b) { return a.day < b.day; });
    }

    // Attribute each transaction: promotional iff its day falls inside
    // [offer received, received + duration) of an offer the customer got;
    // the earliest matching offer wins when windows overlap.
    struct Bucket {
        std::map<int, double> promo;  // campaign -> amount
        double control = 0.0;
    };
    std::map<std::pair<Id, int>, Bucket> buckets;
    const auto month_of = [month_days](long long day) { return static_cast<int>(day / month_days); };

    for (const auto& transaction : transactions) {
        const int month = month_of(transaction.day);
        auto& bucket = buckets[{transaction.customer, month}];
        const auto it = offers.find(transaction.customer);
        const Offer* match = nullptr;
        if (it != offers.end()) {
            for (const auto& offer : it->second) {
                if (transaction.day >= offer.day && transaction.day < offer.day + offer.duration) {
                    match = &offer;
                    break;
                }
            }
        }
        if (match != nullptr) {
            bucket.promo[match->campaign] += transaction.amount;
        } else {
            bucket.control += transaction.amount;
        }
    }
    // Months with a received offer yield a treatment row even without
    // transactions.
    for (const auto& [customer, list] : offers) {
        for (const auto& offer : list) {
            auto& bucket = buckets[{customer, month_of(offer.day)}];
            bucket.promo.emplace(offer.campaign, 0.0);
        }
    }

    const auto protected_of = [&](Id customer) {
        std::map<std::string, int> attrs;
        const auto it = profiles.find(customer);
        const Profile profile = it == profiles.end() ? Profile{} : it->second;
        attrs["age"] = profile.age >= result.age_threshold ? 1 : 0;
        attrs["gender"] = profile.gender_code;
        attrs["income"] = profile.income >= result.income_threshold ? 1 : 0;
        return attrs;
    };

    for (const auto& [key, bucket] : buckets) {
        const auto& [customer, month] = key;
        const auto attrs = protected_of(customer);
        int promo_days = 0;
        for (const auto& [campaign, amount] : bucket.promo) {
            const int duration = portfolio.at(campaign).duration_days;
            promo_days += duration;
            EventRecord record;
            record.customer = customer;
            record.month = month;
            record.campaign = campaign;
            record.purchase_30d = amount * static_cast<double>(month_days) / duration;
            record.profitable = record.purchase_30d > 0.0 ? 1 : 0;
            record.protected_attrs = attrs;
            result.records.push_back(std::move(record));
        }
        EventRecord control;
        control.customer = customer;
        control.month = month;
        const int control_days = std::max(1, month_days - promo_days);
        control.purchase_30d = bucket.control * static_cast<double>(month_days) / control_days;
        control.profitable = control.purchase_30d > 0.0 ? 1 : 0;
        control.protected_attrs = attrs;
        result.records.push_back(std::move(control));
    }

    std::sort(result.records.begin(), result.records.end(),
              [](const EventRecord& a, const EventRecord& b) {
                  if (a.customer != b.customer) return a.customer < b.customer;
                  if (a.month != b.month) return a.month < b.month;
                  const int ca = a.campaign.value_or(-1);
                  const int cb = b.campaign.value_or(-1);
                  return ca < cb;
              });
    return result;
}

std::string records_to_csv(const std::vector<EventRecord>& records) {
    std::ostringstream out;
    out.precision(17);
    out << "customer_id,month,campaign_id,purchase_30d,profitable,age,gender,income\n";
    for (const auto& record : records) {
        out << record.customer << ',' << record.month << ',';
        if (record.campaign.has_value()) {
            out << *record.campaign;
        } else {
            out << "None";
        }
        out << ',' << record.purchase_30d << ',' << record.profitable;
        for (const char* name : {"age", "gender", "income"}) {
            const auto it = record.protected_attrs.find(name);
            out << ',' << (it == record.protected_attrs.end() ? 0 : it->second);
        }
        out << '\n';
    }
    return out.str();
}

AssembledPopulations assemble_populations(const std::vector<EventRecord>& records,
                                          int campaign_id) {
    // Months in which the campaign produced treatment rows.
    std::set<int> active_months;
    for (const auto& record : records) {
        if (record.campaign == campaign_id) active_months.insert(record.month);
    }
    if (active_months.empty()) {
        throw_error(ErrorCode::EmptyPopulation,
                    "campaign " + std::to_string(campaign_id) + " has no treatment records");
    }

    // Purchase history per customer, for lagged/cumulative features.
    struct History {
        std::map<int, double> promo;    // month -> 30-day rate
        std::map<int, double> control;  // month -> 30-day rate
    };
    std::map<Id, History> histories;
    for (const auto& record : records) {
        auto& history = histories[record.customer];
        if (record.campaign.has_value()) {
            history.promo[record.month] += record.purchase_30d;
        } else {
            history.control[record.month] += record.purchase_30d;
        }
    }

    const auto aggregate = [](const std::map<int, double>& series, int month_limit,
                              double* lag1, double* cumulative) {
        *lag1 = 0.0;
        *cumulative = 0.0;
        int count = 0;
        for (const auto& [month, rate] : series) {
            if (month >= month_limit) break;
            *cumulative += rate;
            ++count;
            if (month == month_limit - 1) *lag1 = rate;
        }
        if (count > 0) *cumulative /= count;
    };

    const int test_month = *active_months.rbegin();
    const int validation_month =
        active_months.size() >= 2 ? *std::next(active_months.rbegin()) : -1;

    AssembledPopulations out;
    Id next_id = 0;
    for (const auto& record : records) {
        const bool is_treatment = record.campaign == campaign_id;
        const bool is_control_in_active_month =
            !record.campaign.has_value() && active_months.count(record.month) > 0;
        if (!is_treatment && !is_control_in_active_month) continue;

        const auto& history = histories.at(record.customer);
        Individual person;
        person.id = next_id++;
        person.treated = is_treatment;
        person.kpi_observed = static_cast<double>(record.profitable);
        person.protected_attrs = record.protected_attrs;

        double lag_promo, cum_promo, lag_control, cum_control;
        person.features_start.resize(5);
        aggregate(history.promo, record.month, &lag_promo, &cum_promo);
        aggregate(history.control, record.month, &lag_control, &cum_control);
        person.features_start << lag_promo, cum_promo, lag_control, cum_control,
            static_cast<double>(record.month);
        person.features_end.resize(5);
        aggregate(history.promo, record.month + 1, &lag_promo, &cum_promo);
        aggregate(history.control, record.month + 1, &lag_control, &cum_control);
        person.features_end << lag_promo, cum_promo, lag_control, cum_control,
            static_cast<double>(record.month);

        SyntheticCampaign* target = &out.train;
        if (record.month == test_month) {
            target = &out.test;
        } else if (record.month == validation_month) {
            target = &out.validation;
        }
        target->individuals.push_back(std::move(person));
    }

    out.train.rebuild_index();
    out.validation.rebuild_index();
    out.test.rebuild_index();
    return out;
}

}  // namespace uplift
