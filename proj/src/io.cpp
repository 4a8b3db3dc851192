#include "auction/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace auction {

using nlohmann::json;

namespace {

Factor parse_factor(const json& jf, int items) {
  Factor f;
  for (const auto& je : jf.at("support")) {
    FactorEntry e;
    for (const auto& jv : je.at("values")) e.values.push_back(rat_parse(jv.get<std::string>()));
    if (items > 0 && int(e.values.size()) != items)
      throw std::invalid_argument("model json: inconsistent item count in factor support");
    e.prob = rat_parse(je.at("prob").get<std::string>());
    f.support.push_back(std::move(e));
  }
  return f;
}

json factor_to_json(const Factor& f) {
  json jf;
  jf["support"] = json::array();
  for (const FactorEntry& e : f.support) {
    json je;
    je["values"] = json::array();
    for (const Rat& v : e.values) je["values"].push_back(rat_str(v));
    je["prob"] = rat_str(e.prob);
    jf["support"].push_back(je);
  }
  return jf;
}

}  // namespace

ModelSpec parse_model_json(const std::string& text) {
  json j = json::parse(text);
  ModelSpec spec;
  spec.dist.setting = setting_parse(j.at("setting").get<std::string>());
  spec.dist.delta = rat_parse(j.at("delta").get<std::string>());

  std::vector<Factor> factors;
  int items = 0;
  for (const auto& jf : j.at("factors")) {
    Factor f = parse_factor(jf, items);
    if (!f.support.empty()) items = int(f.support[0].values.size());
    factors.push_back(std::move(f));
  }
  int bidders = j.contains("bidders") ? j.at("bidders").get<int>() : int(factors.size());
  if (int(factors.size()) == 1 && bidders > 1)
    factors.assign(std::size_t(bidders), factors[0]);  // shared factor shorthand
  if (int(factors.size()) != bidders)
    throw std::invalid_argument("model json: factor count does not match bidders");
  spec.dist.bidders = bidders;
  spec.dist.items = items;
  spec.dist.factors = std::move(factors);
  normalize_support(spec.dist);

  spec.cons = Constraints::unconstrained(bidders);
  if (j.contains("demands")) {
    int i = 0;
    for (const auto& jd : j.at("demands")) spec.cons.demands.at(i++) = demand_parse(jd.get<std::string>());
  }
  if (j.contains("budgets")) {
    int i = 0;
    for (const auto& jb : j.at("budgets")) spec.cons.budgets.at(i++) = budget_parse(jb.get<std::string>());
  }
  return spec;
}

std::string model_to_json(const ModelSpec& spec) {
  json j;
  j["setting"] = setting_str(spec.dist.setting);
  j["delta"] = rat_str(spec.dist.delta);
  j["bidders"] = spec.dist.bidders;
  j["factors"] = json::array();
  for (const Factor& f : spec.dist.factors) j["factors"].push_back(factor_to_json(f));
  j["demands"] = json::array();
  for (const Demand& d : spec.cons.demands) j["demands"].push_back(demand_str(d));
  j["budgets"] = json::array();
  for (const Budget& b : spec.cons.budgets) j["budgets"].push_back(budget_str(b));
  return j.dump(2) + "\n";
}

void dump_mechanism(const Mechanism& m, const DiscreteDistribution& dist, std::ostream& header_json,
                    std::ostream& rows_csv) {
  if (m.is_symmetrized_view() || m.is_lifted())
    throw std::invalid_argument("dump_mechanism: materialize the view before dumping");
  json j;
  j["group"] = group_kind_str(m.group().kind());
  j["setting"] = setting_str(dist.setting);
  j["delta"] = rat_str(dist.delta);
  j["bidders"] = m.bidders();
  j["items"] = m.items();
  j["classes"] = json::array();
  for (std::size_t c = 0; c < m.reps().size(); ++c) {
    json jc;
    jc["id"] = c;
    jc["profile"] = json::array();
    for (const ValueVector& row : m.reps()[c]) {
      json jr = json::array();
      for (const Rat& v : row) jr.push_back(rat_str(v));
      jc["profile"].push_back(jr);
    }
    j["classes"].push_back(jc);
  }
  header_json << j.dump(2) << "\n";

  rows_csv << "class_id,bidder,item,phi,price\n";
  for (std::size_t c = 0; c < m.reps().size(); ++c)
    for (int i = 0; i < m.bidders(); ++i)
      for (int jj = 0; jj < m.items(); ++jj)
        rows_csv << c << "," << i << "," << jj << "," << rat_str(m.rep_phi(int(c))[i][jj]) << ","
                 << rat_str(m.rep_price(int(c))[i]) << "\n";
}

Mechanism load_mechanism(const std::string& header_json, const std::string& rows_csv) {
  json j = json::parse(header_json);
  int m = j.at("bidders").get<int>(), n = j.at("items").get<int>();
  GroupKind kind = group_kind_parse(j.at("group").get<std::string>());
  SymmetryGroup group = SymmetryGroup::trivial(m, n);
  if (kind == GroupKind::AllBidders) group = SymmetryGroup::all_bidders(m, n);
  if (kind == GroupKind::AllItems) group = SymmetryGroup::all_items(m, n);
  if (kind == GroupKind::Product) group = SymmetryGroup::product(m, n);

  std::vector<TypeProfile> reps;
  for (const auto& jc : j.at("classes")) {
    TypeProfile p;
    for (const auto& jr : jc.at("profile")) {
      ValueVector row;
      for (const auto& jv : jr) row.push_back(rat_parse(jv.get<std::string>()));
      p.push_back(row);
    }
    reps.push_back(p);
  }
  std::vector<std::vector<std::vector<Rat>>> phi(reps.size(),
                                                 std::vector<std::vector<Rat>>(m, std::vector<Rat>(n)));
  std::vector<std::vector<Rat>> price(reps.size(), std::vector<Rat>(m, Rat(0)));

  std::istringstream is(rows_csv);
  std::string line;
  std::getline(is, line);  // header
  if (line != "class_id,bidder,item,phi,price")
    throw std::invalid_argument("load_mechanism: unexpected csv header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw std::invalid_argument("load_mechanism: bad csv row: " + line);
    int c = std::stoi(cells[0]), i = std::stoi(cells[1]), jj = std::stoi(cells[2]);
    phi.at(c).at(i).at(jj) = rat_parse(cells[3]);
    price.at(c).at(i) = rat_parse(cells[4]);
  }
  return Mechanism(group, reps, phi, price);
}

void dump_representatives(const RepresentativeSet& reps, std::ostream& os) {
  os << "class_id,weight,orbit_size,profile\n";
  for (std::size_t c = 0; c < reps.classes.size(); ++c) {
    const RepClass& cls = reps.classes[c];
    os << c << "," << rat_str(cls.class_weight) << "," << cls.orbit_size << ",\"";
    for (std::size_t i = 0; i < cls.rep.size(); ++i) {
      if (i) os << ";";
      for (std::size_t j = 0; j < cls.rep[i].size(); ++j) {
        if (j) os << " ";
        os << rat_str(cls.rep[i][j]);
      }
    }
    os << "\"\n";
  }
}

std::string audit_to_json(const AuditReport& report, const std::string& label) {
  json j;
  j["label"] = label;
  j["max_violation_normalized"] = rat_str(report.max_violation);
  j["max_violation_raw"] = rat_str(report.max_raw_violation);
  j["unbounded_violation"] = report.unbounded_violation;
  j["max_ir_violation"] = rat_str(report.max_ir_violation);
  j["monotonicity_violations"] = report.monotonicity_violations.size();
  j["revenue"] = rat_str(report.revenue);
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

}  // namespace auction
