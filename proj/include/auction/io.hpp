#pragma once

#include <iosfwd>
#include <string>

#include "auction/mechanism.hpp"

namespace auction {

struct ModelSpec {
  DiscreteDistribution dist;
  Constraints cons;
};

// JSON schema:
//   {"setting": "k-items"|"k-bidders", "delta": "1/10", "bidders": 2,
//    "factors": [{"support": [{"values": ["2/5","1"], "prob": "1/4"}, ...]}],
//    "demands": ["1", "inf"], "budgets": ["inf", "3/4"]}
// k-items may give a single shared factor; values are rational strings.
ModelSpec parse_model_json(const std::string& text);
std::string model_to_json(const ModelSpec& spec);

// Mechanism dump: a JSON header (group, delta, setting, representative
// profiles, class weights) plus CSV rows class_id,bidder,item,phi,price.
// The pair round-trips losslessly.
void dump_mechanism(const Mechanism& m, const DiscreteDistribution& dist, std::ostream& header_json,
                    std::ostream& rows_csv);
Mechanism load_mechanism(const std::string& header_json, const std::string& rows_csv);

// Representative classes as CSV for inspection.
void dump_representatives(const RepresentativeSet& reps, std::ostream& os);

std::string audit_to_json(const AuditReport& report, const std::string& label);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace auction
