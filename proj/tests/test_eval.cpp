#include <cmath>
#include <sstream>

#include "apguard/eval.hpp"
#include "apguard/experiment.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace apguard;

namespace {

std::vector<ApVerdict> flags(std::size_t n, const std::vector<std::size_t>& flagged) {
  std::vector<ApVerdict> out;
  for (const auto& ap : numbered_schema(n)) {
    ApVerdict v;
    v.ap = ap;
    v.malicious = std::find(flagged.begin(), flagged.end(), ap.index) != flagged.end();
    out.push_back(v);
  }
  return out;
}

std::vector<ApId> pick(std::size_t n, const std::vector<std::size_t>& idx) {
  const auto schema = numbered_schema(n);
  std::vector<ApId> out;
  for (auto i : idx) out.push_back(schema[i]);
  return out;
}

std::vector<std::size_t> range(std::size_t lo, std::size_t hi) {
  std::vector<std::size_t> v;
  for (auto i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

}  // namespace

TEST_CASE("confusion counts") {
  const auto truth = pick(40, range(0, 20));
  CHECK(confusion_counts(flags(40, range(0, 20)), truth) == ConfusionCounts{20, 20, 0, 0});
  CHECK(confusion_counts(flags(40, range(0, 40)), truth) == ConfusionCounts{20, 0, 20, 0});
  CHECK(confusion_counts(flags(40, {}), truth) == ConfusionCounts{0, 20, 0, 20});

  const auto c = confusion_counts(flags(40, {0, 1, 2, 10}), pick(40, {0, 1, 2, 3}));
  CHECK(c == ConfusionCounts{3, 35, 1, 1});
  CHECK(c.total() == 40);

  CHECK_THROWS_AS(confusion_counts(flags(3, {}), pick(5, {4})), SchemaError);
}

TEST_CASE("detection metrics") {
  const auto m = detection_metrics(ConfusionCounts{3, 35, 1, 1});
  CHECK(std::fabs(*m.precision - 0.75) <= 1e-12);
  CHECK(std::fabs(*m.recall - 0.75) <= 1e-12);
  CHECK(std::fabs(*m.f1 - 0.75) <= 1e-12);
  CHECK(std::fabs(*m.fpr - 1.0 / 36.0) <= 1e-12);
  CHECK(std::fabs(*m.fnr - 0.25) <= 1e-12);
  CHECK(std::fabs(*m.accuracy - 38.0 / 40.0) <= 1e-12);

  const auto perfect = detection_metrics(ConfusionCounts{20, 20, 0, 0});
  CHECK(*perfect.fpr == 0.0);
  CHECK(*perfect.recall == 1.0);
  CHECK(*perfect.f1 == 1.0);

  SUBCASE("zero denominators are undefined") {
    const auto nothing_flagged = detection_metrics(ConfusionCounts{0, 40, 0, 0});
    CHECK_FALSE(nothing_flagged.precision.has_value());
    CHECK_FALSE(nothing_flagged.recall.has_value());
    CHECK_FALSE(nothing_flagged.fnr.has_value());
    CHECK_FALSE(nothing_flagged.f1.has_value());
    CHECK(*nothing_flagged.fpr == 0.0);
    CHECK(*nothing_flagged.accuracy == 1.0);
    const auto all_bad = detection_metrics(ConfusionCounts{0, 0, 0, 5});
    CHECK_FALSE(all_bad.fpr.has_value());
    CHECK(*all_bad.recall == 0.0);
    CHECK_FALSE(all_bad.f1.has_value());
    CHECK_FALSE(detection_metrics(ConfusionCounts{}).accuracy.has_value());
  }

  SUBCASE("random counts agree with the textbook formulas") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
      const ConfusionCounts k{rng.below(30), rng.below(30), rng.below(30), rng.below(30)};
      const auto got = detection_metrics(k);
      const double tp = static_cast<double>(k.tp), tn = static_cast<double>(k.tn);
      const double fp = static_cast<double>(k.fp), fn = static_cast<double>(k.fn);
      if (tp + fp > 0) CHECK(std::fabs(*got.precision - tp / (tp + fp)) <= 1e-12);
      if (tp + fn > 0) CHECK(std::fabs(*got.recall - tp / (tp + fn)) <= 1e-12);
      if (fp + tn > 0) CHECK(std::fabs(*got.fpr - fp / (fp + tn)) <= 1e-12);
      if (tp + fn > 0) CHECK(std::fabs(*got.fnr - fn / (tp + fn)) <= 1e-12);
      if (k.total() > 0) CHECK(std::fabs(*got.accuracy - (tp + tn) / (tp + tn + fp + fn)) <= 1e-12);
      if (tp > 0) CHECK(std::fabs(*got.f1 - 2 * tp / (2 * tp + fp + fn)) <= 1e-12);
      for (const auto& v : {got.precision, got.recall, got.fpr, got.fnr, got.accuracy, got.f1})
        if (v) {
          CHECK(*v >= 0.0);
          CHECK(*v <= 1.0);
        }
    }
  }
}

TEST_CASE("localization error") {
  const std::vector<RpLocation> pred{{1, 0, 0}, {2, 3, 4}};
  const std::vector<RpLocation> truth{{1, 0, 0}, {1, 0, 0}};
  CHECK(localization_errors(pred, truth) == std::vector<double>{0.0, 5.0});
  CHECK(mean_localization_error(pred, truth) == 2.5);
  CHECK(mean_localization_error(truth, truth) == 0.0);
  const std::vector<RpLocation> one{{1, 0, 0}};
  CHECK_THROWS(localization_errors(pred, one));
  CHECK_THROWS(mean_localization_error(std::span<const RpLocation>{}, std::span<const RpLocation>{}));
}

TEST_CASE("error CDF") {
  const std::vector<double> single{5.0};
  CHECK(error_cdf(single) == std::vector<CdfPoint>{{5.0, 1.0}});
  const std::vector<double> three{3.0, 1.0, 1.0};
  const auto cdf = error_cdf(three);
  REQUIRE(cdf.size() == 2);
  CHECK(cdf[0].error_m == 1.0);
  CHECK(cdf[0].cum_fraction == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(cdf[1] == CdfPoint{3.0, 1.0});
  CHECK_THROWS(error_cdf(std::vector<double>{}));

  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> e;
    const auto n = 1 + rng.below(50);
    for (std::size_t i = 0; i < n; ++i) e.push_back(static_cast<double>(rng.below(8)) * 2.5);
    const auto c = error_cdf(e);
    CHECK(c.back().cum_fraction == 1.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double below = static_cast<double>(std::count_if(e.begin(), e.end(), [&](double v) {
        return v <= c[i].error_m;
      }));
      CHECK(std::fabs(c[i].cum_fraction - below / static_cast<double>(n)) <= 1e-12);
      if (i) {
        CHECK(c[i - 1].error_m < c[i].error_m);
        CHECK(c[i - 1].cum_fraction < c[i].cum_fraction);
      }
    }
  }
}

TEST_CASE("summaries over trials") {
  const std::vector<std::optional<double>> vals{0.5, std::nullopt, 1.0, 0.0};
  const auto s = summarize(vals);
  CHECK(*s.mean == 0.5);
  CHECK(*s.min == 0.0);
  CHECK(*s.max == 1.0);
  CHECK(s.undefined == 1);
  const std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
  CHECK_FALSE(summarize(none).mean.has_value());
  CHECK(summarize(none).undefined == 2);

  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    std::vector<std::optional<double>> v;
    for (std::size_t i = 0, n = 1 + rng.below(20); i < n; ++i) v.push_back(0.1 * rng.uniform01() + 0.3);
    const auto r = summarize(v);
    CHECK(*r.min <= *r.mean);
    CHECK(*r.mean <= *r.max);
  }
}

TEST_CASE("detection experiment") {
  PipelineConfig cfg;
  cfg.world.samples_per_rp = 20;
  cfg.n_queries = 200;
  cfg.model.n_trees = 30;
  const auto data = make_synthetic_data(cfg);
  const auto world = prepare_world(data.world.survey, data.queries, cfg);

  SUBCASE("a single trial is one detect run") {
    const auto s = run_detection_experiment(world, AttackKind::RV, 0.25, 1, cfg.master_seed, cfg.detector);
    const auto plan = make_attack_plan(world.queries.schema(), AttackKind::RV, 0.25, cfg.master_seed, 0);
    const auto attacked = normalize_database(apply_attack(world.queries, plan), DbKind::raw_survey);
    const auto online = serve_queries(world.classifier, world.rp_index, attacked);
    const auto counts = confusion_counts(detect_malicious_aps(world.offline, online, cfg.detector),
                                         plan.malicious_aps);
    CHECK(s.totals == counts);
    const auto m = detection_metrics(counts);
    CHECK(s.recall.mean == m.recall);
    CHECK(s.fpr.mean == m.fpr);
    CHECK(s.trials == 1);
  }
  SUBCASE("deterministic for a fixed seed") {
    const auto a = run_detection_experiment(world, AttackKind::ARRO, 0.5, 3, 42, cfg.detector);
    const auto b = run_detection_experiment(world, AttackKind::ARRO, 0.5, 3, 42, cfg.detector);
    std::ostringstream oa, ob;
    write_detection_csv(oa, std::span<const DetectionSummary>(&a, 1));
    write_detection_csv(ob, std::span<const DetectionSummary>(&b, 1));
    CHECK(oa.str() == ob.str());
    CHECK(oa.str().rfind("attack,fraction,trials,fpr,fpr_min,fpr_max,fpr_undefined,", 0) == 0);
    CHECK(a.totals.total() == 3 * world.queries.ap_count());
  }
  SUBCASE("trial plans differ") {
    const auto p0 = make_attack_plan(world.queries.schema(), AttackKind::CV, 0.5, 42, 0);
    const auto p1 = make_attack_plan(world.queries.schema(), AttackKind::CV, 0.5, 42, 1);
    CHECK_FALSE(p0.malicious_aps == p1.malicious_aps);
    CHECK(fraction_tag(0.5) == "0.5");
  }
  SUBCASE("error file round trip") {
    std::istringstream in("error_m\n0\n2.5\n");
    CHECK(read_errors_csv(in) == std::vector<double>{0.0, 2.5});
    std::istringstream bad("error_m\nfar\n");
    CHECK_THROWS(read_errors_csv(bad));
  }
}
