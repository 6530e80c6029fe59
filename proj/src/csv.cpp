#include "uplift/csv.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

namespace uplift {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

double parse_csv_double(const std::string& field, std::size_t line_no) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw_error(ErrorCode::MalformedRow,
                    "line " + std::to_string(line_no) + ": '" + field + "' is not a number");
    }
    return value;
}

long long parse_csv_long(const std::string& field, std::size_t line_no) {
    long long value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw_error(ErrorCode::MalformedRow,
                    "line " + std::to_string(line_no) + ": '" + field + "' is not an integer");
    }
    return value;
}

namespace {

void append_double(std::ostringstream& out, double value) {
    out << value;
}

}  // namespace

std::string population_to_csv(const SyntheticCampaign& campaign, bool include_counterfactuals) {
    std::ostringstream out;
    out.precision(17);

    std::vector<std::string> protected_names;
    if (!campaign.individuals.empty()) {
        for (const auto& [name, value] : campaign.individuals.front().protected_attrs) {
            protected_names.push_back(name);
        }
    }
    const Eigen::Index dim =
        campaign.individuals.empty() ? 0 : campaign.individuals.front().features_start.size();

    out << "id,treated,kpi";
    for (const auto& name : protected_names) out << ',' << name;
    for (Eigen::Index j = 0; j < dim; ++j) out << ",f" << j << "_start";
    for (Eigen::Index j = 0; j < dim; ++j) out << ",f" << j << "_end";
    const bool with_cf = include_counterfactuals &&
                         campaign.latent_outcomes.size() == campaign.individuals.size();
    if (with_cf) {
        out << ",y_treat,y_control,y_treat_observed,y_control_observed";
    }
    out << '\n';

    for (std::size_t i = 0; i < campaign.individuals.size(); ++i) {
        const auto& person = campaign.individuals[i];
        out << person.id << ',';
        if (person.treated.has_value()) out << (*person.treated ? 1 : 0);
        out << ',';
        if (person.kpi_observed.has_value()) append_double(out, *person.kpi_observed);
        for (const auto& name : protected_names) {
            const auto it = person.protected_attrs.find(name);
            out << ',' << (it == person.protected_attrs.end() ? 0 : it->second);
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            out << ',';
            append_double(out, person.features_start[j]);
        }
        const bool has_end = person.features_end.size() == dim;
        for (Eigen::Index j = 0; j < dim; ++j) {
            out << ',';
            append_double(out, has_end ? person.features_end[j] : person.features_start[j]);
        }
        if (with_cf) {
            const auto& latent = campaign.latent_outcomes[i];
            const auto& observed = campaign.observed_outcomes[i];
            out << ',' << latent[0] << ',' << latent[1] << ',' << observed[0] << ','
                << observed[1];
        }
        out << '\n';
    }
    return out.str();
}

SyntheticCampaign population_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw_error(ErrorCode::MissingColumn, "population CSV is empty");
    }
    const std::vector<std::string> header = split_csv_line(line);

    const auto column = [&header](const std::string& name) -> std::optional<std::size_t> {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    };
    const auto required = [&column](const std::string& name) {
        const auto idx = column(name);
        if (!idx.has_value()) {
            throw_error(ErrorCode::MissingColumn, "population CSV lacks column '" + name + "'");
        }
        return *idx;
    };

    const std::size_t id_col = required("id");
    const std::size_t treated_col = required("treated");
    const std::size_t kpi_col = required("kpi");

    std::vector<std::pair<std::string, std::size_t>> protected_cols;
    std::vector<std::optional<std::size_t>> start_cols;
    std::vector<std::optional<std::size_t>> end_cols;
    const auto feature_index = [](const std::string& name,
                                  const char* suffix) -> std::optional<std::size_t> {
        if (name.size() < 2 || name[0] != 'f') return std::nullopt;
        const std::string tail(suffix);
        if (name.size() <= 1 + tail.size() || name.substr(name.size() - tail.size()) != tail) {
            return std::nullopt;
        }
        const std::string digits = name.substr(1, name.size() - 1 - tail.size());
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(c); })) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(std::stoul(digits));
    };

    const std::vector<std::string> cf_names = {"y_treat", "y_control", "y_treat_observed",
                                               "y_control_observed"};
    std::array<std::optional<std::size_t>, 4> cf_cols;
    for (std::size_t i = 0; i < 4; ++i) cf_cols[i] = column(cf_names[i]);
    const bool with_cf = cf_cols[0].has_value();
    if (with_cf) {
        for (std::size_t i = 1; i < 4; ++i) {
            if (!cf_cols[i].has_value()) {
                throw_error(ErrorCode::MissingColumn,
                            "population CSV lacks counterfactual column '" + cf_names[i] + "'");
            }
        }
    }

    for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string& name = header[c];
        if (name == "id" || name == "treated" || name == "kpi") continue;
        if (std::find(cf_names.begin(), cf_names.end(), name) != cf_names.end()) continue;
        if (const auto fi = feature_index(name, "_start"); fi.has_value()) {
            if (start_cols.size() <= *fi) start_cols.resize(*fi + 1);
            start_cols[*fi] = c;
            continue;
        }
        if (const auto fi = feature_index(name, "_end"); fi.has_value()) {
            if (end_cols.size() <= *fi) end_cols.resize(*fi + 1);
            end_cols[*fi] = c;
            continue;
        }
        protected_cols.emplace_back(name, c);
    }

    if (start_cols.empty()) {
        throw_error(ErrorCode::MissingColumn, "population CSV has no f<k>_start feature columns");
    }
    if (end_cols.size() != start_cols.size()) {
        throw_error(ErrorCode::MissingColumn,
                    "population CSV start/end feature column counts differ");
    }
    for (std::size_t j = 0; j < start_cols.size(); ++j) {
        if (!start_cols[j].has_value() || !end_cols[j].has_value()) {
            throw_error(ErrorCode::MissingColumn,
                        "population CSV lacks feature column f" + std::to_string(j));
        }
    }
    const auto dim = static_cast<Eigen::Index>(start_cols.size());

    SyntheticCampaign campaign;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw_error(ErrorCode::MalformedRow,
                        "line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
        }
        Individual person;
        person.id = parse_csv_long(fields[id_col], line_no);
        if (!fields[treated_col].empty()) {
            const long long treated = parse_csv_long(fields[treated_col], line_no);
            if (treated != 0 && treated != 1) {
                throw_error(ErrorCode::NonBinaryInput,
                            "line " + std::to_string(line_no) + ": treated must be 0 or 1");
            }
            person.treated = treated == 1;
        }
        if (!fields[kpi_col].empty()) {
            person.kpi_observed = parse_csv_double(fields[kpi_col], line_no);
        }
        for (const auto& [name, col] : protected_cols) {
            const long long value = parse_csv_long(fields[col], line_no);
            if (value != 0 && value != 1) {
                throw_error(ErrorCode::NonBinaryInput,
                            "line " + std::to_string(line_no) + ": protected attribute '" + name +
                                "' must be 0 or 1");
            }
            person.protected_attrs[name] = static_cast<int>(value);
        }
        person.features_start.resize(dim);
        person.features_end.resize(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            person.features_start[j] =
                parse_csv_double(fields[*start_cols[static_cast<std::size_t>(j)]], line_no);
            person.features_end[j] =
                parse_csv_double(fields[*end_cols[static_cast<std::size_t>(j)]], line_no);
        }

        if (with_cf) {
            std::array<int, 2> latent{};
            std::array<int, 2> observed{};
            latent[0] = static_cast<int>(parse_csv_long(fields[*cf_cols[0]], line_no));
            latent[1] = static_cast<int>(parse_csv_long(fields[*cf_cols[1]], line_no));
            observed[0] = static_cast<int>(parse_csv_long(fields[*cf_cols[2]], line_no));
            observed[1] = static_cast<int>(parse_csv_long(fields[*cf_cols[3]], line_no));
            campaign.true_quadrant.push_back(classify_quadrant(latent[0], latent[1]));
            campaign.latent_outcomes.push_back(latent);
            campaign.observed_outcomes.push_back(observed);
        }
        campaign.individuals.push_back(std::move(person));
    }

    campaign.rebuild_index();
    if (campaign.individuals.empty()) {
        throw_error(ErrorCode::EmptyPopulation, "population CSV has no data rows");
    }
    std::vector<Id> ids;
    ids.reserve(campaign.individuals.size());
    for (const auto& person : campaign.individuals) ids.push_back(person.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw_error(ErrorCode::MalformedRow, "population CSV contains duplicate ids");
    }
    return campaign;
}

std::vector<std::pair<Id, double>> id_value_pairs_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw_error(ErrorCode::MissingColumn, "CSV is empty");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "id") {
        throw_error(ErrorCode::MissingColumn, "expected header 'id,<value>'");
    }
    std::vector<std::pair<Id, double>> pairs;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw_error(ErrorCode::MalformedRow,
                        "line " + std::to_string(line_no) + ": wrong field count");
        }
        pairs.emplace_back(parse_csv_long(fields[0], line_no),
                           parse_csv_double(fields[1], line_no));
    }
    return pairs;
}

}  // namespace uplift
