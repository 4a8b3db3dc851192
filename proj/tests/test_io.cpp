#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "auction/lp.hpp"
#include "auction/pipeline.hpp"

using namespace auction;

namespace {

const char* kMenuInstance = R"({
  "setting": "k-bidders",
  "delta": "1/10",
  "bidders": 1,
  "factors": [{"support": [
    {"values": ["4/5", "4/5"], "prob": "1/4"},
    {"values": ["4/5", "1"], "prob": "1/4"},
    {"values": ["1", "4/5"], "prob": "1/4"},
    {"values": ["1", "1"], "prob": "1/4"}
  ]}],
  "demands": ["1"],
  "budgets": ["inf"]
})";

}  // namespace

TEST_CASE("model json round trip") {
  ModelSpec spec = parse_model_json(kMenuInstance);
  CHECK(spec.dist.setting == Setting::KBidders);
  CHECK(spec.dist.bidders == 1);
  CHECK(spec.dist.items == 2);
  CHECK(spec.dist.delta == rat(1, 10));
  CHECK(spec.cons.demands[0] == Demand{1});
  CHECK(!spec.cons.budgets[0]);
  CHECK(validate(spec.dist, spec.cons).empty());

  ModelSpec again = parse_model_json(model_to_json(spec));
  CHECK(again.dist.factors[0].support.size() == spec.dist.factors[0].support.size());
  CHECK(model_to_json(again) == model_to_json(spec));
}

TEST_CASE("shared factor shorthand for k-items") {
  const char* shared = R"({
    "setting": "k-items", "delta": "1/2", "bidders": 3,
    "factors": [{"support": [
      {"values": ["1"], "prob": "1/2"}, {"values": ["1/2"], "prob": "1/2"}]}],
    "demands": ["1", "1", "1"]})";
  ModelSpec spec = parse_model_json(shared);
  CHECK(spec.dist.factors.size() == 3);
  CHECK(validate(spec.dist, spec.cons).empty());
}

TEST_CASE("mechanism dump round trip is lossless") {
  ModelSpec spec = parse_model_json(kMenuInstance);
  auto lp = build_succinct_k_bidders(spec.dist, spec.cons, Rat(0), Mode::Bic);
  auto mech = extract(solve(lp), lp);

  std::ostringstream header, rows;
  dump_mechanism(mech, spec.dist, header, rows);
  Mechanism loaded = load_mechanism(header.str(), rows.str());

  REQUIRE(loaded.reps().size() == mech.reps().size());
  for (std::size_t c = 0; c < mech.reps().size(); ++c) {
    CHECK(loaded.reps()[c] == mech.reps()[c]);
    CHECK(loaded.rep_phi(int(c)) == mech.rep_phi(int(c)));
    CHECK(loaded.rep_price(int(c)) == mech.rep_price(int(c)));
  }
  // a second dump of the loaded mechanism is byte-identical
  std::ostringstream header2, rows2;
  dump_mechanism(loaded, spec.dist, header2, rows2);
  CHECK(header2.str() == header.str());
  CHECK(rows2.str() == rows.str());
}

TEST_CASE("verify accepts the optimum and flags a tampered dump") {
  ModelSpec spec = parse_model_json(kMenuInstance);
  auto lp = build_succinct_k_bidders(spec.dist, spec.cons, Rat(0), Mode::Bic);
  auto mech = extract(solve(lp), lp);
  std::ostringstream header, rows;
  dump_mechanism(mech, spec.dist, header, rows);

  auto ok = verify_dump(kMenuInstance, header.str(), rows.str(), Rat(0), Mode::Bic);
  CHECK(ok.clean);

  // raise one price: some type now envies another report
  std::string tampered = rows.str();
  auto pos = tampered.rfind(",");
  tampered = tampered.substr(0, pos + 1) + "9/10\n";
  auto bad = verify_dump(kMenuInstance, header.str(), tampered, Rat(0), Mode::Bic);
  CHECK_FALSE(bad.clean);
}

TEST_CASE("representative csv dump") {
  ModelSpec spec = parse_model_json(kMenuInstance);
  auto reps = enumerate_representatives(spec.dist, SymmetryGroup::all_items(1, 2));
  std::ostringstream os;
  dump_representatives(reps, os);
  std::string text = os.str();
  CHECK(text.find("class_id,weight,orbit_size,profile") == 0);
  CHECK(text.find("1/2") != std::string::npos);
}

TEST_CASE("lp export emits the interchange format") {
  ModelSpec spec = parse_model_json(kMenuInstance);
  auto lp = build_succinct_k_bidders(spec.dist, spec.cons, Rat(0), Mode::Bic);
  std::ostringstream os;
  export_lp_format(lp, os);
  std::string text = os.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("audit report json") {
  AuditReport r;
  r.max_violation = rat(1, 8);
  r.revenue = rat(3, 4);
  std::string j = audit_to_json(r, "bic");
  CHECK(j.find("\"1/8\"") != std::string::npos);
  CHECK(j.find("\"3/4\"") != std::string::npos);
}
