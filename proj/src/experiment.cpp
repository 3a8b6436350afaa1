#include "apguard/experiment.hpp"

#include <algorithm>

#include "apguard/csv.hpp"
#include "apguard/rng.hpp"

namespace apguard {

void PipelineConfig::validate() const {
  world.validate();
  if (n_queries < 1) throw ConfigError("n_queries must be >= 1");
  if (!(srcc_threshold >= 0.0 && srcc_threshold <= 1.0))
    throw ConfigError("srcc_threshold must be in [0, 1]");
  noise.validate();
  detector.validate();
  model.validate();
}

SyntheticData make_synthetic_data(const PipelineConfig& config) {
  SyntheticWorldConfig wc = config.world;
  wc.rng_seed = derive_seed(config.master_seed, stage::kWorld);
  SyntheticWorld world = generate_world(wc);
  const auto queries = sample_online_queries(world.truth, config.n_queries,
                                             derive_seed(config.master_seed, stage::kQueries));
  FingerprintDatabase qdb = queries_as_database(world.truth, queries);
  return SyntheticData{std::move(world), std::move(qdb)};
}

OfflineBuild build_offline(const FingerprintDatabase& survey, const PipelineConfig& config) {
  ApSelection selection = select_correlated_aps(survey, config.srcc_threshold);
  if (selection.kept.empty())
    throw Error("no AP passes the SRCC threshold " + csv::format_number(config.srcc_threshold));
  FingerprintDatabase offline =
      normalize_database(apply_selection(survey, selection), DbKind::offline);
  if (config.augment) {
    NoiseConfig noise = config.noise;
    noise.rng_seed = derive_seed(config.master_seed, stage::kAugment);
    offline = augment_with_noise(offline, noise);
  }
  return OfflineBuild{std::move(selection), std::move(offline)};
}

TreeEnsembleModel train_offline_classifier(const FingerprintDatabase& offline,
                                           const PipelineConfig& config) {
  TreeHyperparams hp = config.model;
  hp.rng_seed = derive_seed(config.master_seed, stage::kClassifier);
  return train_localizer(offline, hp);
}

RpIndex rp_location_index(const FingerprintDatabase& labeled) {
  RpIndex index;
  for (const auto& rec : labeled.records())
    if (rec.location) index.emplace(rec.location->rp_id, *rec.location);
  return index;
}

std::vector<RpLocation> localize(const TreeEnsembleModel& classifier, const RpIndex& index,
                                 const FingerprintDatabase& normalized) {
  if (normalized.domain() != Domain::normalized)
    throw DomainError("localize expects normalized fingerprints");
  std::vector<RpLocation> out;
  out.reserve(normalized.size());
  for (const auto& rec : normalized.records()) {
    const int rp = predict_label(classifier, rec.rssi).rp_id;
    auto it = index.find(rp);
    if (it == index.end()) throw Error("classifier predicted unknown RP " + std::to_string(rp));
    out.push_back(it->second);
  }
  return out;
}

FingerprintDatabase serve_queries(const TreeEnsembleModel& classifier, const RpIndex& index,
                                  const FingerprintDatabase& normalized) {
  const auto predicted = localize(classifier, index, normalized);
  std::vector<FingerprintRecord> records;
  records.reserve(normalized.size());
  for (std::size_t i = 0; i < normalized.size(); ++i)
    records.push_back(FingerprintRecord{normalized.records()[i].rssi, predicted[i]});
  return FingerprintDatabase(normalized.schema(), std::move(records), Domain::normalized,
                             DbKind::online);
}

std::vector<RpLocation> ground_truth(const FingerprintDatabase& labeled) {
  std::vector<RpLocation> out;
  out.reserve(labeled.size());
  for (std::size_t r = 0; r < labeled.size(); ++r) {
    const auto& loc = labeled.records()[r].location;
    if (!loc) throw MalformedDatabaseError("query " + std::to_string(r) + " has no ground truth");
    out.push_back(*loc);
  }
  return out;
}

PreparedWorld prepare_world(const FingerprintDatabase& survey,
                            const FingerprintDatabase& labeled_queries, const PipelineConfig& config) {
  config.validate();
  auto build = build_offline(survey, config);
  auto classifier = train_offline_classifier(build.offline, config);
  auto index = rp_location_index(build.offline);
  auto queries = labeled_queries.project(build.selection.kept_names());
  return PreparedWorld{survey,          std::move(build.selection), std::move(build.offline),
                       std::move(classifier), std::move(index),    std::move(queries)};
}

double evaluate_mle(const PreparedWorld& world, const FingerprintDatabase& raw_labeled_queries) {
  const auto projected = raw_labeled_queries.project(world.selection.kept_names());
  const auto normalized = normalize_database(projected, DbKind::raw_survey);
  const auto predicted = localize(world.classifier, world.rp_index, normalized);
  const auto truth = ground_truth(projected);
  return mean_localization_error(predicted, truth);
}

std::string fraction_tag(double fraction) { return csv::format_number(fraction); }

std::uint64_t choose_seed(std::uint64_t master, AttackKind kind, double fraction, std::size_t trial) {
  return derive_seed(master, "choose/" + std::string(to_string(kind)) + "/" + fraction_tag(fraction),
                     trial);
}

std::uint64_t attack_seed(std::uint64_t master, AttackKind kind, double fraction, std::size_t trial) {
  return derive_seed(master, "attack/" + std::string(to_string(kind)) + "/" + fraction_tag(fraction),
                     trial);
}

AttackPlan make_attack_plan(std::span<const ApId> schema, AttackKind kind, double fraction,
                            std::uint64_t master_seed, std::size_t trial) {
  AttackPlan plan;
  plan.kind = kind;
  plan.malicious_aps = choose_malicious_aps(schema, fraction, choose_seed(master_seed, kind, fraction, trial));
  plan.rng_seed = attack_seed(master_seed, kind, fraction, trial);
  return plan;
}

MetricSummary summarize(std::span<const std::optional<double>> per_trial) {
  std::vector<double> defined;
  MetricSummary s;
  for (const auto& v : per_trial) {
    if (v) defined.push_back(*v);
    else ++s.undefined;
  }
  if (defined.empty()) return s;
  // Sorted so the sum does not depend on trial completion order.
  std::sort(defined.begin(), defined.end());
  double sum = 0.0;
  for (double v : defined) sum += v;
  s.mean = std::clamp(sum / static_cast<double>(defined.size()), defined.front(), defined.back());
  s.min = defined.front();
  s.max = defined.back();
  return s;
}

DetectionSummary run_detection_experiment(const PreparedWorld& world, AttackKind kind, double fraction,
                                          std::size_t n_trials, std::uint64_t master_seed,
                                          const DetectorConfig& detector) {
  if (n_trials < 1) throw ConfigError("n_trials must be >= 1");
  const auto truth = ground_truth(world.queries);
  std::vector<std::optional<double>> fpr, fnr, precision, recall, accuracy, f1, mle;
  DetectionSummary out;
  out.kind = kind;
  out.fraction = fraction;
  out.trials = n_trials;
  for (std::size_t t = 0; t < n_trials; ++t) {
    const auto plan = make_attack_plan(world.queries.schema(), kind, fraction, master_seed, t);
    const auto attacked = normalize_database(apply_attack(world.queries, plan), DbKind::raw_survey);
    const auto online = serve_queries(world.classifier, world.rp_index, attacked);
    const auto verdicts = detect_malicious_aps(world.offline, online, detector);
    const auto counts = confusion_counts(verdicts, plan.malicious_aps);
    const auto m = detection_metrics(counts);
    fpr.push_back(m.fpr);
    fnr.push_back(m.fnr);
    precision.push_back(m.precision);
    recall.push_back(m.recall);
    accuracy.push_back(m.accuracy);
    f1.push_back(m.f1);
    std::vector<RpLocation> predicted;
    for (const auto& rec : online.records()) predicted.push_back(*rec.location);
    mle.push_back(mean_localization_error(predicted, truth));
    out.totals.tp += counts.tp;
    out.totals.tn += counts.tn;
    out.totals.fp += counts.fp;
    out.totals.fn += counts.fn;
  }
  out.fpr = summarize(fpr);
  out.fnr = summarize(fnr);
  out.precision = summarize(precision);
  out.recall = summarize(recall);
  out.accuracy = summarize(accuracy);
  out.f1 = summarize(f1);
  out.mle = summarize(mle);
  return out;
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::clean: return "clean";
    case Scenario::attacked: return "attacked";
    case Scenario::query_only: return "query-only";
    case Scenario::full_mitigation: return "full-mitigation";
    case Scenario::baseline_external: return "baseline-external";
  }
  return "?";
}

const CdfCurve& CdfExperimentResult::curve(Scenario s) const {
  for (const auto& c : curves)
    if (c.scenario == s) return c;
  throw Error("no curve for scenario " + std::string(to_string(s)));
}

namespace {
CdfCurve make_curve(Scenario s, std::vector<double> errors) {
  CdfCurve c;
  c.scenario = s;
  c.cdf = error_cdf(errors);
  double sum = 0.0;
  for (double e : errors) sum += e;
  c.mle = sum / static_cast<double>(errors.size());
  c.errors = std::move(errors);
  return c;
}
}  // namespace

CdfExperimentResult run_cdf_experiment(const PreparedWorld& world, AttackKind kind, double fraction,
                                       const PipelineConfig& config,
                                       const std::optional<std::vector<double>>& external_errors) {
  const auto truth = ground_truth(world.queries);
  CdfExperimentResult out;
  out.kind = kind;
  out.fraction = fraction;

  const auto clean = normalize_database(world.queries, DbKind::raw_survey);
  const auto clean_errors =
      localization_errors(localize(world.classifier, world.rp_index, clean), truth);

  const auto plan = make_attack_plan(world.queries.schema(), kind, fraction, config.master_seed, 0);
  out.truly_malicious = plan.malicious_aps;
  const auto attacked = normalize_database(apply_attack(world.queries, plan), DbKind::raw_survey);
  const auto online = serve_queries(world.classifier, world.rp_index, attacked);
  std::vector<RpLocation> attacked_pred;
  for (const auto& rec : online.records()) attacked_pred.push_back(*rec.location);
  const auto attacked_errors = localization_errors(attacked_pred, truth);

  out.verdicts = detect_malicious_aps(world.offline, online, config.detector);
  out.counts = confusion_counts(out.verdicts, out.truly_malicious);

  std::vector<double> query_only_errors = attacked_errors;
  std::vector<double> full_errors = attacked_errors;
  if (!malicious_aps(out.verdicts).empty()) {
    TreeHyperparams hp = config.model;
    hp.rng_seed = derive_seed(config.master_seed, stage::kMitigate);
    const auto state = mitigation_cycle(world.offline, online, out.verdicts, hp);
    const auto imputed = impute_queries(attacked, state.imputation);
    query_only_errors =
        localization_errors(localize(world.classifier, world.rp_index, imputed), truth);
    full_errors = localization_errors(
        localize(state.retrained_classifier, world.rp_index, imputed), truth);
    out.mitigated = true;
  }

  out.curves.push_back(make_curve(Scenario::clean, clean_errors));
  out.curves.push_back(make_curve(Scenario::attacked, attacked_errors));
  out.curves.push_back(make_curve(Scenario::query_only, query_only_errors));
  out.curves.push_back(make_curve(Scenario::full_mitigation, full_errors));
  out.curves.push_back(
      make_curve(Scenario::baseline_external, external_errors ? *external_errors : attacked_errors));
  return out;
}

namespace {
std::string cell(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : "undefined";
}
}  // namespace

void write_detection_csv(std::ostream& out, std::span<const DetectionSummary> rows) {
  static const char* names[] = {"fpr", "fnr", "precision", "recall", "accuracy", "f1", "mle"};
  std::string header = "attack,fraction,trials";
  for (const char* n : names) {
    header += std::string(",") + n + "," + n + "_min," + n + "_max," + n + "_undefined";
  }
  header += ",tp,tn,fp,fn\n";
  out << header;
  for (const auto& r : rows) {
    const MetricSummary* ms[] = {&r.fpr, &r.fnr, &r.precision, &r.recall, &r.accuracy, &r.f1, &r.mle};
    std::string line = std::string(to_string(r.kind)) + "," + csv::format_number(r.fraction) + "," +
                       std::to_string(r.trials);
    for (const auto* m : ms)
      line += "," + cell(m->mean) + "," + cell(m->min) + "," + cell(m->max) + "," +
              std::to_string(m->undefined);
    line += "," + std::to_string(r.totals.tp) + "," + std::to_string(r.totals.tn) + "," +
            std::to_string(r.totals.fp) + "," + std::to_string(r.totals.fn) + "\n";
    out << line;
  }
}

void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf) {
  out << "error_m,cum_fraction\n";
  for (const auto& p : cdf)
    out << csv::format_number(p.error_m) << ',' << csv::format_number(p.cum_fraction) << '\n';
}

void write_cdf_summary_csv(std::ostream& out, std::span<const CdfExperimentResult> results) {
  out << "attack,fraction,scenario,mle,queries,tp,tn,fp,fn\n";
  for (const auto& r : results) {
    for (const auto& c : r.curves) {
      out << to_string(r.kind) << ',' << csv::format_number(r.fraction) << ',' << to_string(c.scenario)
          << ',' << csv::format_number(c.mle) << ',' << c.errors.size() << ',' << r.counts.tp << ','
          << r.counts.tn << ',' << r.counts.fp << ',' << r.counts.fn << '\n';
    }
  }
}

std::vector<double> read_errors_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  const auto col = table.column_index("error_m");
  if (!col) throw ParseError(1, "missing column 'error_m'");
  std::vector<double> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const double v = csv::parse_number(table.rows[r][*col], table.line_numbers[r], "error_m");
    if (v < 0.0) throw ParseError(table.line_numbers[r], "negative localization error");
    out.push_back(v);
  }
  if (out.empty()) throw ParseError(1, "error file has no rows");
  return out;
}

}  // namespace apguard
