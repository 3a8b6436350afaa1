#include <cmath>
#include <set>

#include "apguard/attack.hpp"
#include "apguard/datasource.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace apguard;
using testsupport::make_db;

namespace {

FingerprintDatabase survey_queries() {
  SyntheticWorldConfig cfg;
  cfg.samples_per_rp = 8;
  return generate_world(cfg).survey;
}

AttackPlan plan_for(AttackKind kind, const std::vector<ApId>& aps, std::uint64_t seed = 9) {
  AttackPlan p;
  p.kind = kind;
  p.malicious_aps = aps;
  p.rng_seed = seed;
  return p;
}

}  // namespace

TEST_CASE("attack kind names") {
  for (auto k : kAllAttackKinds) CHECK(parse_attack_kind(to_string(k)) == k);
  CHECK(parse_attack_kind("arro") == AttackKind::ARRO);
  CHECK_THROWS_AS(parse_attack_kind("XYZ"), ConfigError);
}

TEST_CASE("choose_malicious_aps") {
  const auto schema = numbered_schema(40);
  CHECK(choose_malicious_aps(schema, 0.5, 1).size() == 20);
  CHECK(choose_malicious_aps(schema, 0.1, 1).size() == 4);
  CHECK(choose_malicious_aps(schema, 0.3, 1).size() == 12);
  CHECK(choose_malicious_aps(schema, 0.5, 7) == choose_malicious_aps(schema, 0.5, 7));
  const auto set = choose_malicious_aps(schema, 0.5, 7);
  std::set<std::string> names;
  for (std::size_t i = 0; i < set.size(); ++i) {
    names.insert(set[i].name);
    CHECK(schema[set[i].index] == set[i]);
    if (i) CHECK(set[i - 1].index < set[i].index);
  }
  CHECK(names.size() == 20);
  CHECK_THROWS_AS(choose_malicious_aps(schema, 0.01, 1), ConfigError);
  CHECK_THROWS_AS(choose_malicious_aps(schema, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(choose_malicious_aps(schema, 1.5, 1), ConfigError);
}

TEST_CASE("hand-checked corruptions") {
  const auto db = make_db({{-57, -40, 100}}, {1}, Domain::raw, DbKind::raw_survey);
  const std::vector<ApId> first{db.schema()[0]};
  const std::vector<ApId> third{db.schema()[2]};

  CHECK(apply_attack(db, plan_for(AttackKind::CV, first)).records()[0].rssi ==
        std::vector<double>{100, -40, 100});

  auto arco = plan_for(AttackKind::ARCO, first);
  arco.arco_offsets["AP001"] = 0.0;
  CHECK(apply_attack(db, arco) == db);
  arco.arco_offsets["AP001"] = -60.0;
  CHECK(apply_attack(db, arco).records()[0].rssi[0] == -100);
  arco.arco_offsets["AP001"] = -3.5;
  CHECK(apply_attack(db, arco).records()[0].rssi[0] == -60.5);
  arco.arco_offsets["AP001"] = -120;
  CHECK_THROWS_AS(apply_attack(db, arco), ConfigError);

  // no-signal entries are left alone by offset attacks, replaced by RV
  auto arco3 = plan_for(AttackKind::ARCO, third);
  CHECK(apply_attack(db, arco3).records()[0].rssi[2] == kNoSignal);
  CHECK(apply_attack(db, plan_for(AttackKind::ARRO, third)).records()[0].rssi[2] == kNoSignal);
  const double rv = apply_attack(db, plan_for(AttackKind::RV, third)).records()[0].rssi[2];
  CHECK(rv >= -100);
  CHECK(rv <= 0);

  const auto norm = make_db({{0.5}}, {1}, Domain::normalized, DbKind::offline);
  CHECK_THROWS_AS(apply_attack(norm, plan_for(AttackKind::CV, {norm.schema()[0]})), DomainError);
  CHECK_THROWS_AS(apply_attack(db, plan_for(AttackKind::CV, {ApId{0, "nope"}})), SchemaError);
}

TEST_CASE("attack invariants on a synthetic survey") {
  const auto q = survey_queries();
  for (auto kind : kAllAttackKinds) {
    const auto plan = plan_for(kind, choose_malicious_aps(q.schema(), 0.5, 3), 21);
    const auto out = apply_attack(q, plan);
    CHECK(out == apply_attack(q, plan));
    std::set<std::size_t> bad;
    for (const auto& ap : plan.malicious_aps) bad.insert(ap.index);
    for (std::size_t r = 0; r < q.size(); ++r) {
      for (std::size_t a = 0; a < q.ap_count(); ++a) {
        const double v = out.records()[r].rssi[a];
        CHECK(is_legal_value(v, Domain::raw));
        if (!bad.contains(a)) CHECK(v == q.records()[r].rssi[a]);
        if (kind == AttackKind::ARCO || kind == AttackKind::ARRO) {
          if (q.records()[r].rssi[a] != kNoSignal) CHECK(v <= q.records()[r].rssi[a]);
        }
      }
      CHECK(out.records()[r].location == q.records()[r].location);
    }
    if (kind == AttackKind::CV)
      for (auto a : bad) {
        const auto col = column(out, out.schema()[a]);
        CHECK(testsupport::naive_variance(col) == 0.0);
      }
  }
}

TEST_CASE("RV column means sit near -50 dBm") {
  std::vector<FingerprintRecord> recs(12000, FingerprintRecord{{-40.0}, std::nullopt});
  const FingerprintDatabase db(numbered_schema(1), recs, Domain::raw, DbKind::raw_survey);
  const auto out = apply_attack(db, plan_for(AttackKind::RV, db.schema(), 77));
  const double mean = testsupport::naive_mean(column(out, out.schema()[0]));
  CHECK(std::fabs(mean + 50.0) < 3.0);
}

TEST_CASE("ARCO offsets are drawn once per AP") {
  std::vector<FingerprintRecord> recs(50, FingerprintRecord{{-30.0, -35.0}, std::nullopt});
  const FingerprintDatabase db(numbered_schema(2), recs, Domain::raw, DbKind::raw_survey);
  const auto plan = plan_for(AttackKind::ARCO, db.schema(), 5);
  const auto offsets = resolve_arco_offsets(plan);
  REQUIRE(offsets.size() == 2);
  const auto out = apply_attack(db, plan);
  for (const auto& r : out.records()) {
    CHECK(r.rssi[0] == std::max(-30.0 + offsets.at("AP001"), -100.0));
    CHECK(r.rssi[1] == std::max(-35.0 + offsets.at("AP002"), -100.0));
  }
  // ARRO draws a fresh offset per entry
  const auto arro = apply_attack(db, plan_for(AttackKind::ARRO, db.schema(), 5));
  std::set<double> seen;
  for (const auto& r : arro.records()) seen.insert(r.rssi[0]);
  CHECK(seen.size() > 10);
}
