#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uplift/simulator.hpp"

namespace uplift {

// Minimal CSV helpers for the library's own unquoted, comma-separated files.
std::vector<std::string> split_csv_line(const std::string& line);

// Number parsing with row-aware errors (MalformedRow carries the 1-based line).
double parse_csv_double(const std::string& field, std::size_t line_no);
long long parse_csv_long(const std::string& field, std::size_t line_no);

// Population exchange format. Header:
//   id,treated,kpi,<protected...>,f0_start..f{d-1}_start,f0_end..f{d-1}_end
// optionally followed by the counterfactual columns
//   y_treat,y_control,y_treat_observed,y_control_observed
// which a simulated export carries so that oracle-dependent evaluation
// survives a round trip. treated and kpi may be empty when not yet observed.
std::string population_to_csv(const SyntheticCampaign& campaign, bool include_counterfactuals);

SyntheticCampaign population_from_csv(const std::string& text);

// id,value pairs, used by the fairness subcommand inputs.
std::vector<std::pair<Id, double>> id_value_pairs_from_csv(const std::string& text);

}  // namespace uplift
