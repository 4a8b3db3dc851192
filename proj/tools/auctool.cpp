// Command-line front end: solve / verify / sample / reduce / mhr-plan /
// oracle-compare over JSON model specs.

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "auction/allocation.hpp"
#include "auction/mhr.hpp"
#include "auction/pipeline.hpp"

using namespace auction;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Mode parse_mode(const std::string& s) {
  if (s == "bic") return Mode::Bic;
  if (s == "ic") return Mode::Ic;
  throw CLI::ValidationError("--mode must be bic or ic");
}

int cmd_solve(const RunConfig& config) {
  PipelineResult r = solve_pipeline(config);
  std::cout << "objective " << rat_str(r.lp_objective) << "\n";
  std::cout << "audits " << (r.audits_clean ? "clean" : "VIOLATED") << "\n";
  if (r.oracle_checked)
    std::cout << "naive-oracle " << (r.oracle_matched ? "matched" : "MISMATCH") << "\n";
  for (const auto& a : r.artifacts) std::cout << "wrote " << config.output_dir << "/" << a << "\n";
  return r.audits_clean && (!r.oracle_checked || r.oracle_matched) ? 0 : 1;
}

int cmd_verify(const std::string& model, const std::string& mech_dir, const Rat& eps, Mode mode) {
  VerifyResult v = verify_dump(read_file(model), read_file(mech_dir + "/mechanism.json"),
                               read_file(mech_dir + "/mechanism.csv"), eps, mode);
  std::cout << audit_to_json(v.audit, v.clean ? "clean" : "violated");
  if (!v.clean) {
    std::cerr << "verification failed: max violation "
              << rat_str(v.audit.max_violation) << ", ir violation "
              << rat_str(v.audit.max_ir_violation) << ", monotonicity violations "
              << v.audit.monotonicity_violations.size() << "\n";
    return 1;
  }
  return 0;
}

int cmd_sample(const std::string& model, const std::string& mech_dir, std::uint64_t seed,
               long count) {
  ModelSpec spec = parse_model_json(read_file(model));
  RandomStream rng(seed);
  if (mech_dir.empty()) {
    for (long t = 0; t < count; ++t) {
      TypeProfile v = sample(spec.dist, rng);
      json j = json::array();
      for (const auto& row : v) {
        json jr = json::array();
        for (const Rat& x : row) jr.push_back(rat_str(x));
        j.push_back(jr);
      }
      std::cout << j.dump() << "\n";
    }
    return 0;
  }
  Mechanism mech = load_mechanism(read_file(mech_dir + "/mechanism.json"),
                                  read_file(mech_dir + "/mechanism.csv"));
  for (long t = 0; t < count; ++t) {
    TypeProfile v = sample(spec.dist, rng);
    Outcome o = mech.at(v);
    auto bundles = sample_assignment(lottery_for(o, spec.cons), spec.dist.bidders, rng);
    json j;
    j["bundles"] = bundles;
    json prices = json::array();
    for (const Rat& p : o.price) prices.push_back(rat_str(p));
    j["prices"] = prices;
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int cmd_reduce(const std::string& model, const std::string& mech_dir, Rat eta, Rat delta, Rat eps,
               long scale_r, long trials, std::uint64_t seed, const std::string& out_path) {
  ModelSpec spec = parse_model_json(read_file(model));
  Mechanism m1 = load_mechanism(read_file(mech_dir + "/mechanism.json"),
                                read_file(mech_dir + "/mechanism.csv"));
  ReductionConfig rc;
  rc.eta = eta;
  rc.delta = delta > 0 ? delta : spec.dist.delta;
  rc.epsilon = eps;
  rc.scale_override = scale_r;
  // identical source and surrogate distribution: the model is already on a grid
  EpsBicToBic reduction(m1, spec.dist, spec.dist, rc);
  RandomStream rng(seed);

  std::ostringstream traces;
  long trace_count = std::min<long>(trials, 50);
  for (long t = 0; t < trace_count; ++t) {
    RandomStream trial = rng.split(0xA000 + (std::uint64_t)t);
    TypeProfile truth = sample(spec.dist, trial);
    auto run = reduction.run(truth, spec.cons, trial);
    json j;
    json jt = json::array();
    for (const auto& row : truth) {
      json jr = json::array();
      for (const Rat& x : row) jr.push_back(rat_str(x));
      jt.push_back(jr);
    }
    j["truth"] = jt;
    j["items"] = run.items;
    json jp = json::array();
    for (const Rat& p : run.payments) jp.push_back(rat_str(p));
    j["payments"] = jp;
    j["matched"] = run.matched;
    traces << j.dump() << "\n";
  }

  auto report = reduction.revenue_bound_check(spec.cons, trials, rng);
  json j;
  j["replicas"] = reduction.replica_count();
  j["revenue_mean"] = report.revenue.mean;
  j["revenue_stderr"] = report.revenue.stderr_mean;
  j["bound"] = report.bound;
  j["discounted_m1_revenue"] = report.discounted_m1_revenue;
  j["matched_fraction"] = report.matched_fraction;
  j["matched_reference"] = report.matched_reference;
  j["w_over_r_mean"] = report.w_over_r_mean;
  j["holds_within_3_sigma"] = report.holds_within_3_sigma;
  if (!out_path.empty()) {
    fs::create_directories(out_path);
    write_file(out_path + "/traces.jsonl", traces.str());
    write_file(out_path + "/bound.json", j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  return report.holds_within_3_sigma ? 0 : 1;
}

int cmd_mhr_plan(const std::string& family, double param1, double param2, double eps, int k,
                 int count, const std::string& delta_str, long trials, std::uint64_t seed) {
  ContinuousMarginal f = family == "exponential" ? ContinuousMarginal::exponential(param1)
                         : family == "uniform"
                             ? ContinuousMarginal::uniform(param1, param2)
                             : ContinuousMarginal::normal_truncated_at_zero(param1, param2);
  TailPlan p = plan({f}, eps, k, count);
  json j;
  j["zeta"] = p.zeta;
  j["xi"] = p.xi;
  j["xi_prime"] = p.xi_prime;
  if (!delta_str.empty()) {
    TruncatedFactor tf = truncate_and_discretize(f, p.xi, rat_parse(delta_str), 1);
    json js = json::array();
    for (const auto& e : tf.factor.support) {
      json je;
      je["value"] = rat_str(e.values[0]);
      je["prob"] = rat_str(e.prob);
      js.push_back(je);
    }
    j["truncated_factor"] = js;
    j["scale"] = rat_str(tf.scale);
  }
  RandomStream rng(seed);
  auto posted = posted_price_lower_bound({f}, count, 1, p.xi_prime,
                                         std::vector<Demand>(std::size_t(count), Demand(1)),
                                         trials, rng);
  j["posted_price"] = posted.price;
  j["posted_revenue_mean"] = posted.revenue.mean;
  j["posted_revenue_stderr"] = posted.revenue.stderr_mean;
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_oracle_compare(const std::string& model, const Rat& eps, Mode mode, std::size_t cap) {
  ModelSpec spec = parse_model_json(read_file(model));
  OracleComparison c = oracle_compare(spec.dist, spec.cons, eps, mode, cap);
  std::cout << "naive    " << rat_str(c.naive_objective) << "\n";
  std::cout << "succinct " << rat_str(c.succinct_objective) << "\n";
  std::cout << (c.equal ? "equal" : "MISMATCH") << "\n";
  return c.equal ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"revenue-optimal symmetric auction toolkit"};
  app.require_subcommand(1);

  std::string input, output, mech_dir, mode_str = "bic", ir_str = "interim";
  std::string eps_str = "0", delta_str, eta_str, family = "exponential";
  std::uint64_t seed = 0;
  long count = 10, trials = 10000, scale_r = 0;
  std::size_t max_support = 65536;
  bool emit_lp = false;
  double param1 = 1.0, param2 = 1.0, eps_d = 0.5;
  int k = 1, bidders_count = 2;

  auto* solve_cmd = app.add_subcommand("solve", "solve the succinct LP and dump artifacts");
  solve_cmd->add_option("--input", input)->required();
  solve_cmd->add_option("--out", output)->required();
  solve_cmd->add_option("--epsilon", eps_str);
  solve_cmd->add_option("--delta", delta_str);
  solve_cmd->add_option("--mode", mode_str);
  solve_cmd->add_option("--ir", ir_str);
  solve_cmd->add_option("--seed", seed)->required();
  solve_cmd->add_option("--max-support", max_support);
  solve_cmd->add_flag("--emit-lp", emit_lp);

  auto* verify_cmd = app.add_subcommand("verify", "audit a mechanism dump");
  verify_cmd->add_option("--input", input)->required();
  verify_cmd->add_option("--mechanism", mech_dir)->required();
  verify_cmd->add_option("--epsilon", eps_str);
  verify_cmd->add_option("--mode", mode_str);

  auto* sample_cmd = app.add_subcommand("sample", "sample profiles or executed outcomes");
  sample_cmd->add_option("--input", input)->required();
  sample_cmd->add_option("--mechanism", mech_dir);
  sample_cmd->add_option("--seed", seed)->required();
  sample_cmd->add_option("--count", count);

  auto* reduce_cmd = app.add_subcommand("reduce", "run the eps-BIC to BIC transform");
  reduce_cmd->add_option("--input", input)->required();
  reduce_cmd->add_option("--mechanism", mech_dir)->required();
  reduce_cmd->add_option("--eta", eta_str)->required();
  reduce_cmd->add_option("--delta", delta_str);
  reduce_cmd->add_option("--epsilon", eps_str);
  reduce_cmd->add_option("--scale-r", scale_r);
  reduce_cmd->add_option("--trials", trials);
  reduce_cmd->add_option("--seed", seed)->required();
  reduce_cmd->add_option("--out", output);

  auto* mhr_cmd = app.add_subcommand("mhr-plan", "tail plan for an MHR marginal");
  mhr_cmd->add_option("--family", family);
  mhr_cmd->add_option("--param1", param1);
  mhr_cmd->add_option("--param2", param2);
  mhr_cmd->add_option("--eps", eps_d);
  mhr_cmd->add_option("--k", k);
  mhr_cmd->add_option("--count", bidders_count);
  mhr_cmd->add_option("--delta", delta_str);
  mhr_cmd->add_option("--trials", trials);
  mhr_cmd->add_option("--seed", seed)->required();

  auto* oracle_cmd = app.add_subcommand("oracle-compare", "naive vs succinct LP optimum");
  oracle_cmd->add_option("--input", input)->required();
  oracle_cmd->add_option("--epsilon", eps_str);
  oracle_cmd->add_option("--mode", mode_str);
  oracle_cmd->add_option("--max-support", max_support);

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      RunConfig config;
      config.input_path = input;
      config.output_dir = output;
      config.epsilon = rat_parse(eps_str);
      config.delta = delta_str.empty() ? Rat(0) : rat_parse(delta_str);
      config.mode = parse_mode(mode_str);
      config.ir = ir_str == "expost" ? IrMode::ExPost : IrMode::ExInterim;
      config.seed = seed;
      config.max_support = max_support;
      config.emit_lp = emit_lp;
      return cmd_solve(config);
    }
    if (verify_cmd->parsed())
      return cmd_verify(input, mech_dir, rat_parse(eps_str), parse_mode(mode_str));
    if (sample_cmd->parsed()) return cmd_sample(input, mech_dir, seed, count);
    if (reduce_cmd->parsed())
      return cmd_reduce(input, mech_dir, rat_parse(eta_str),
                        delta_str.empty() ? Rat(0) : rat_parse(delta_str), rat_parse(eps_str),
                        scale_r, trials, seed, output);
    if (mhr_cmd->parsed())
      return cmd_mhr_plan(family, param1, param2, eps_d, k, bidders_count, delta_str, trials,
                          seed);
    if (oracle_cmd->parsed())
      return cmd_oracle_compare(input, rat_parse(eps_str), parse_mode(mode_str), max_support);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
