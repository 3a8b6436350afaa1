#include <cmath>
#include <sstream>

#include "apguard/attack.hpp"
#include "apguard/datasource.hpp"
#include "apguard/detect.hpp"
#include "apguard/preprocess.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace apguard;
using testsupport::make_db;

namespace {

const DetectorConfig kDefault{};

}  // namespace

TEST_CASE("variance test examples") {
  const auto constant = make_db({{0.5}, {0.5}, {0.5}}, {1, 1, 1}, Domain::normalized, DbKind::online);
  const auto v = variance_test(constant, kDefault);
  CHECK(v.max_variance[0] == 0.0);
  CHECK_FALSE(v.flagged[0]);

  const auto alt = make_db({{0.25}, {1.0}, {0.25}, {1.0}}, {1, 1, 1, 1}, Domain::normalized, DbKind::online);
  const auto va = variance_test(alt, kDefault);
  CHECK(va.max_variance[0] == 0.140625);
  CHECK(va.flagged[0]);

  // groups below the minimum size are skipped
  const auto single = make_db({{0.25}, {1.0}}, {1, 2}, Domain::normalized, DbKind::online);
  CHECK_THROWS_AS(variance_test(single, kDefault), InsufficientDataError);
  CHECK_THROWS_AS(variance_test(make_db({{-50}}, {1}, Domain::raw, DbKind::raw_survey), kDefault), DomainError);
}

TEST_CASE("mean difference examples") {
  const auto off = make_db({{0.6}, {0.6}, {0.6}, {0.6}}, {1, 1, 2, 2}, Domain::normalized, DbKind::offline);
  const auto same = off.with_kind(DbKind::online);
  const auto m0 = mean_difference_test(off, same, kDefault);
  CHECK(m0.min_mean_diff[0] == 0.0);
  CHECK_FALSE(m0.flagged[0]);

  const auto lower = make_db({{0.59}, {0.59}, {0.59}, {0.59}}, {1, 1, 2, 2}, Domain::normalized, DbKind::online);
  const auto m1 = mean_difference_test(off, lower, kDefault);
  CHECK(m1.min_mean_diff[0] == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(m1.flagged[0]);

  const auto mixed = make_db({{0.59}, {0.59}, {0.9}, {0.9}}, {1, 1, 2, 2}, Domain::normalized, DbKind::online);
  const auto m2 = mean_difference_test(off, mixed, kDefault);
  CHECK(m2.min_mean_diff[0] < 0.0);
  CHECK_FALSE(m2.flagged[0]);

  const auto elsewhere = make_db({{0.5}, {0.5}}, {7, 7}, Domain::normalized, DbKind::online);
  CHECK_THROWS_AS(mean_difference_test(off, elsewhere, kDefault), InsufficientDataError);
}

TEST_CASE("threshold boundaries") {
  DetectorConfig cfg;
  cfg.th1_variance = 0.140625;  // variance exactly at the threshold is flagged
  const auto alt = make_db({{0.25}, {1.0}}, {1, 1}, Domain::normalized, DbKind::online);
  CHECK(variance_test(alt, cfg).flagged[0]);
  cfg.th2_mean_diff = 0.25;  // difference exactly at the threshold is not flagged
  const auto off = make_db({{0.75}, {0.75}}, {1, 1}, Domain::normalized, DbKind::offline);
  const auto on = make_db({{0.5}, {0.5}}, {1, 1}, Domain::normalized, DbKind::online);
  const auto m = mean_difference_test(off, on, cfg);
  CHECK(m.min_mean_diff[0] == 0.25);
  CHECK_FALSE(m.flagged[0]);
}

TEST_CASE("both tests match a brute-force oracle on random databases") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_aps = 1 + rng.below(6);
    const auto off = testsupport::random_normalized_db(rng, n_aps, 2 + rng.below(6), 6, DbKind::offline);
    const auto on = testsupport::random_normalized_db(rng, n_aps, 2 + rng.below(6), 6, DbKind::online);
    DetectorConfig cfg;
    cfg.min_group_size = 1 + rng.below(3);
    std::optional<VarianceTestResult> v;
    std::optional<MeanDifferenceTestResult> m;
    try {
      v = variance_test(on, cfg);
    } catch (const InsufficientDataError&) {
    }
    try {
      m = mean_difference_test(off, on, cfg);
    } catch (const InsufficientDataError&) {
    }
    for (std::size_t a = 0; a < n_aps; ++a) {
      const auto ov = testsupport::oracle_max_variance(on, a, cfg.min_group_size);
      const auto om = testsupport::oracle_min_mean_diff(off, on, a, cfg.min_group_size);
      REQUIRE(ov.has_value() == v.has_value());
      REQUIRE(om.has_value() == m.has_value());
      if (ov) {
        CHECK(std::fabs(*ov - v->max_variance[a]) <= 1e-12);
        CHECK(v->flagged[a] == (v->max_variance[a] >= cfg.th1_variance));
      }
      if (om) {
        CHECK(std::fabs(*om - m->min_mean_diff[a]) <= 1e-12);
        CHECK(m->flagged[a] == (m->min_mean_diff[a] > cfg.th2_mean_diff));
      }
    }
  }
}

TEST_CASE("detector properties") {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto off = testsupport::random_normalized_db(rng, 4, 5, 8, DbKind::offline);
    const auto on = testsupport::random_normalized_db(rng, 4, 5, 8, DbKind::online);

    // variance flags do not depend on record order
    auto recs = on.records();
    for (std::size_t i = recs.size(); i > 1; --i) std::swap(recs[i - 1], recs[rng.below(i)]);
    const FingerprintDatabase shuffled(on.schema(), recs, Domain::normalized, DbKind::online);
    CHECK(variance_test(on, kDefault).flagged == variance_test(shuffled, kDefault).flagged);

    // swapping the arguments negates every difference
    const auto fwd = rp_mean_differences(off, on, kDefault);
    const auto bwd = rp_mean_differences(on.with_kind(DbKind::offline), off.with_kind(DbKind::online), kDefault);
    REQUIRE(fwd.rp_ids == bwd.rp_ids);
    for (std::size_t a = 0; a < fwd.values.size(); ++a)
      for (std::size_t j = 0; j < fwd.values[a].size(); ++j)
        CHECK(fwd.values[a][j] == doctest::Approx(-bwd.values[a][j]).epsilon(1e-12));

  }

  // uniform attenuation beyond th2 always trips the mean test
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<FingerprintRecord> off_recs, on_recs;
    const double c = 0.006 + 0.01 * rng.uniform01();
    for (int rp = 1; rp <= 4; ++rp)
      for (int k = 0; k < 5; ++k) {
        FingerprintRecord a{{rng.uniform(0.4, 0.9), rng.uniform(0.4, 0.9)}, RpLocation{rp, 1.0 * rp, 0}};
        FingerprintRecord b = a;
        b.rssi[1] -= c;
        off_recs.push_back(a);
        on_recs.push_back(b);
      }
    const FingerprintDatabase off(numbered_schema(2), off_recs, Domain::normalized, DbKind::offline);
    const FingerprintDatabase on(numbered_schema(2), on_recs, Domain::normalized, DbKind::online);
    const auto verdicts = detect_malicious_aps(off, on, kDefault);
    CHECK(verdicts[1].flagged_by_mean);
    CHECK_FALSE(verdicts[0].flagged_by_mean);
  }
}

TEST_CASE("end-to-end detection on the synthetic world") {
  SyntheticWorldConfig cfg;
  const auto world = generate_world(cfg);
  const auto offline = normalize_database(world.survey);
  const auto queries = queries_as_database(world.truth, sample_online_queries(world.truth, 500, 3));

  SUBCASE("clean world: honest columns stay below the variance threshold") {
    const auto online = normalize_database(queries, DbKind::online);
    const auto verdicts = detect_malicious_aps(offline, online, kDefault);
    std::size_t flagged = 0;
    for (const auto& v : verdicts) {
      CHECK(*v.max_variance < 0.05);
      flagged += v.malicious;
    }
    CHECK(flagged <= 2);  // FPR <= 5% of 40
  }
  SUBCASE("RV on half the APs is fully detected") {
    AttackPlan plan;
    plan.kind = AttackKind::RV;
    plan.malicious_aps = choose_malicious_aps(queries.schema(), 0.5, 11);
    plan.rng_seed = 12;
    const auto online = normalize_database(apply_attack(queries, plan), DbKind::online);
    const auto verdicts = detect_malicious_aps(offline, online, kDefault);
    for (const auto& ap : plan.malicious_aps) CHECK(verdicts[ap.index].malicious);
  }
  SUBCASE("CV is caught by the mean test, not the variance test") {
    AttackPlan plan;
    plan.kind = AttackKind::CV;
    plan.malicious_aps = choose_malicious_aps(queries.schema(), 0.25, 13);
    const auto online = normalize_database(apply_attack(queries, plan), DbKind::online);
    const auto verdicts = detect_malicious_aps(offline, online, kDefault);
    for (const auto& ap : plan.malicious_aps) {
      CHECK(verdicts[ap.index].flagged_by_mean);
      CHECK_FALSE(verdicts[ap.index].flagged_by_variance);
      CHECK(*verdicts[ap.index].max_variance == 0.0);
    }
  }
}

TEST_CASE("one-sided evidence and verdict files") {
  // online groups of one record: only the mean test can run, and it needs groups of two
  DetectorConfig cfg;
  cfg.min_group_size = 2;
  const auto off = make_db({{0.6}, {0.6}}, {1, 1}, Domain::normalized, DbKind::offline);
  const auto on = make_db({{0.3}, {0.3}}, {1, 1}, Domain::normalized, DbKind::online);
  const auto both = detect_malicious_aps(off, on, cfg);
  CHECK(both[0].malicious);

  const auto off_far = make_db({{0.6}, {0.6}}, {2, 2}, Domain::normalized, DbKind::offline);
  const auto only_var = detect_malicious_aps(off_far, on, cfg);
  CHECK(only_var[0].max_variance.has_value());
  CHECK_FALSE(only_var[0].min_mean_diff.has_value());
  CHECK_FALSE(only_var[0].malicious);

  const auto lonely = make_db({{0.3}}, {5}, Domain::normalized, DbKind::online);
  CHECK_THROWS_AS(detect_malicious_aps(off, lonely, cfg), InsufficientDataError);

  std::ostringstream out;
  write_verdicts_csv(out, both);
  write_verdicts_csv(out, {});
  std::ostringstream o2;
  write_verdicts_csv(o2, only_var);
  std::istringstream in(o2.str());
  CHECK(read_verdicts_csv(in) == only_var);
  CHECK(o2.str().rfind("ap,name,max_variance,min_mean_diff,flag_var,flag_mean,malicious\n", 0) == 0);
  std::istringstream bad("ap,name,max_variance,min_mean_diff,flag_var,flag_mean,malicious\n0,AP001,0,0,1,0,0\n");
  CHECK_THROWS_AS(read_verdicts_csv(bad), ParseError);
}
