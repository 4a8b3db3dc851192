#pragma once

#include "auction/io.hpp"
#include "auction/lp.hpp"
#include "auction/reduction.hpp"

namespace auction {

enum class IrMode { ExInterim, ExPost };

struct RunConfig {
  std::string input_path;
  std::string output_dir;
  Rat epsilon;         // incentive slack of the LP
  Rat delta;           // grid step (0: keep the input grid)
  Rat eta;             // rebate fraction for the reduction (0: default = epsilon)
  Mode mode = Mode::Bic;
  IrMode ir = IrMode::ExInterim;
  std::uint64_t seed = 0;
  long scale_r = 0;
  long trials = 10000;
  std::size_t max_support = 65536;  // explosion guard
  bool emit_lp = false;
};

struct PipelineResult {
  Rat lp_objective;
  bool audits_clean = false;
  bool oracle_checked = false;   // naive comparison ran
  bool oracle_matched = false;
  std::vector<std::string> artifacts;  // file names written under output_dir
};

// input -> discretize -> succinct LP -> audits -> dumps.  Writes
// mechanism.json/mechanism.csv, audit.json, reps.csv, summary.json and
// optional lp.txt / expost.json under output_dir.  Deterministic given
// (config, input bytes, seed).
PipelineResult solve_pipeline(const RunConfig& config);

// Audits a mechanism dump against a model; returns the audit and whether it
// is clean at the given epsilon.
struct VerifyResult {
  AuditReport audit;
  bool clean = false;
};
VerifyResult verify_dump(const std::string& model_json, const std::string& mech_header,
                         const std::string& mech_csv, const Rat& epsilon, Mode mode);

struct OracleComparison {
  Rat naive_objective;
  Rat succinct_objective;
  bool equal = false;
  LpForm succinct_form;
};
// Builds and solves both the naive LP and the setting's succinct LP.
OracleComparison oracle_compare(const DiscreteDistribution& dist, const Constraints& cons,
                                const Rat& epsilon, Mode mode, std::size_t max_support = 65536);

// Deterministic random instance for oracle-equivalence sweeps: i.i.d.
// bidder factors with item-symmetric supports, small rational probabilities,
// values on the half grid.  Valid for both settings.
ModelSpec random_symmetric_instance(RandomStream& rng, int bidders, int items, bool unit_demand,
                                    bool with_budget);

}  // namespace auction
