#include "auction/pipeline.hpp"

#include <filesystem>
#include <sstream>

#include <json.hpp>

namespace auction {

using nlohmann::json;

namespace {

LinearProgram build_succinct(const DiscreteDistribution& dist, const Constraints& cons,
                             const Rat& eps, Mode mode, std::size_t cap) {
  BuildOptions opt;
  opt.support_cap = cap;
  if (dist.setting == Setting::KItems) return build_succinct_k_items(dist, cons, eps, mode, opt);
  return build_succinct_k_bidders(dist, cons, eps, mode, opt);
}

}  // namespace

PipelineResult solve_pipeline(const RunConfig& config) {
  namespace fs = std::filesystem;
  PipelineResult result;
  ModelSpec spec = parse_model_json(read_file(config.input_path));
  if (config.delta > 0 && config.delta != spec.dist.delta)
    spec.dist = discretize(spec.dist, config.delta, RoundDirection::Down);
  validate_or_throw(spec.dist, spec.cons);

  LinearProgram lp = build_succinct(spec.dist, spec.cons, config.epsilon, config.mode,
                                    config.max_support);
  LpSolution sol = solve(lp);
  if (sol.status != LpStatus::Optimal)
    throw ModelError("solve_pipeline: LP status is not optimal");
  result.lp_objective = sol.objective;
  Mechanism mech = extract(sol, lp);

  AuditReport audit = config.mode == Mode::Bic
                          ? check_bic(mech, spec.dist, config.epsilon, config.max_support)
                          : check_ic(mech, spec.dist, config.epsilon, config.max_support);
  auto mono = check_strong_monotonicity(mech, spec.dist, config.mode, config.max_support);
  audit.monotonicity_violations = mono;
  result.audits_clean = audit.incentive_ok(config.epsilon) && audit.max_ir_violation == 0 &&
                        mono.empty();

  // oracle comparison when the expanded support is small
  std::optional<OracleComparison> oracle;
  try {
    auto support = expand_support(spec.dist, std::min<std::size_t>(config.max_support, 4096));
    (void)support;
    oracle = oracle_compare(spec.dist, spec.cons, config.epsilon, config.mode, config.max_support);
    result.oracle_checked = true;
    result.oracle_matched = oracle->equal;
  } catch (const ExplosionGuard&) {
  }

  fs::create_directories(config.output_dir);
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file((fs::path(config.output_dir) / name).string(), content);
    result.artifacts.push_back(name);
  };

  {
    std::ostringstream header, rows;
    dump_mechanism(mech, spec.dist, header, rows);
    emit("mechanism.json", header.str());
    emit("mechanism.csv", rows.str());
  }
  {
    RepresentativeSet reps = enumerate_representatives(spec.dist, lp.group, config.max_support);
    std::ostringstream os;
    dump_representatives(reps, os);
    emit("reps.csv", os.str());
  }
  emit("audit.json", audit_to_json(audit, config.mode == Mode::Bic ? "bic" : "ic"));
  if (config.ir == IrMode::ExPost) {
    ExPostPaymentRule rule = ex_post_ir_transform(mech, spec.dist, config.max_support);
    json j;
    j["rule"] = json::array();
    for (std::size_t i = 0; i < rule.coefficient.size(); ++i)
      for (const auto& [type, c] : rule.coefficient[i]) {
        json je;
        je["bidder"] = i;
        je["type"] = json::array();
        for (const Rat& v : type) je["type"].push_back(rat_str(v));
        je["coefficient"] = rat_str(c);
        j["rule"].push_back(je);
      }
    emit("expost.json", j.dump(2) + "\n");
  }
  if (config.emit_lp) {
    std::ostringstream os;
    export_lp_format(lp, os);
    emit("lp.txt", os.str());
  }
  {
    json j;
    j["objective"] = rat_str(result.lp_objective);
    j["audits_clean"] = result.audits_clean;
    j["mode"] = config.mode == Mode::Bic ? "bic" : "ic";
    j["epsilon"] = rat_str(config.epsilon);
    j["seed"] = config.seed;
    if (result.oracle_checked) {
      j["naive_objective"] = rat_str(oracle->naive_objective);
      j["oracle_matched"] = result.oracle_matched;
    }
    emit("summary.json", j.dump(2) + "\n");
  }
  return result;
}

VerifyResult verify_dump(const std::string& model_json, const std::string& mech_header,
                         const std::string& mech_csv, const Rat& epsilon, Mode mode) {
  ModelSpec spec = parse_model_json(model_json);
  Mechanism mech = load_mechanism(mech_header, mech_csv);
  VerifyResult out;
  out.audit = mode == Mode::Bic ? check_bic(mech, spec.dist, epsilon)
                                : check_ic(mech, spec.dist, epsilon);
  out.audit.monotonicity_violations = check_strong_monotonicity(mech, spec.dist, mode);
  // feasibility of the stored tables
  bool feasible = true;
  for (std::size_t c = 0; c < mech.reps().size() && feasible; ++c) {
    const auto& phi = mech.rep_phi(int(c));
    for (int j = 0; j < mech.items() && feasible; ++j) {
      Rat col(0);
      for (int i = 0; i < mech.bidders(); ++i) {
        if (phi[i][j] < 0 || phi[i][j] > 1) feasible = false;
        col += phi[i][j];
      }
      if (col > 1) feasible = false;
    }
    for (int i = 0; i < mech.bidders() && feasible; ++i) {
      Rat row(0);
      for (int j = 0; j < mech.items(); ++j) row += phi[i][j];
      const Demand& d = spec.cons.demands[i];
      if (d && row > Rat(*d)) feasible = false;
      const Budget& b = spec.cons.budgets[i];
      if (b && mech.rep_price(int(c))[i] > *b) feasible = false;
    }
  }
  out.clean = feasible && out.audit.incentive_ok(epsilon) && out.audit.max_ir_violation == 0;
  return out;
}

OracleComparison oracle_compare(const DiscreteDistribution& dist, const Constraints& cons,
                                const Rat& epsilon, Mode mode, std::size_t max_support) {
  BuildOptions opt;
  opt.support_cap = max_support;
  OracleComparison out;
  LpSolution naive = solve(build_naive(dist, cons, epsilon, mode, opt));
  if (naive.status != LpStatus::Optimal) throw ModelError("oracle_compare: naive LP not optimal");
  out.naive_objective = naive.objective;
  LinearProgram slp = build_succinct(dist, cons, epsilon, mode, max_support);
  out.succinct_form = slp.form;
  LpSolution succ = solve(slp);
  if (succ.status != LpStatus::Optimal)
    throw ModelError("oracle_compare: succinct LP not optimal");
  out.succinct_objective = succ.objective;
  out.equal = out.naive_objective == out.succinct_objective;
  return out;
}

ModelSpec random_symmetric_instance(RandomStream& rng, int bidders, int items, bool unit_demand,
                                    bool with_budget) {
  ModelSpec spec;
  spec.dist.setting = Setting::KItems;  // caller flips when needed
  spec.dist.delta = rat(1, 2);
  spec.dist.bidders = bidders;
  spec.dist.items = items;

  // two grid values per item marginal, shared across items
  Rat lo = rat(long(rng.below(2)), 2);        // 0 or 1/2
  Rat hi = lo + rat(long(1 + rng.below(2 - rat_long(lo * 2))), 2);  // strictly above lo, <= 1
  Factor f;
  if (items == 1) {
    long a = 1 + long(rng.below(7));
    f.support.push_back({{hi}, rat(a, 8)});
    f.support.push_back({{lo}, rat(8 - a, 8)});
  } else {
    // item-symmetric weights on {hi hi, hi lo, lo hi, lo lo}
    long whh = 1 + long(rng.below(5));
    long wmix = 1 + long(rng.below(5));
    long wll = 1 + long(rng.below(5));
    long total = whh + 2 * wmix + wll;
    f.support.push_back({{hi, hi}, Rat(whh, total)});
    f.support.push_back({{hi, lo}, Rat(wmix, total)});
    f.support.push_back({{lo, hi}, Rat(wmix, total)});
    f.support.push_back({{lo, lo}, Rat(wll, total)});
    for (FactorEntry& e : f.support) e.prob.canonicalize();
  }
  spec.dist.factors.assign(std::size_t(bidders), f);
  normalize_support(spec.dist);

  spec.cons = unit_demand ? Constraints::uniform_demand(bidders, 1)
                          : Constraints::unconstrained(bidders);
  if (with_budget) {
    Rat b = rat(long(1 + rng.below(4)), 4);
    for (Budget& budget : spec.cons.budgets) budget = b;
  }
  return spec;
}

}  // namespace auction
