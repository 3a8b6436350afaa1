#include "apguard/mitigate.hpp"

#include <algorithm>
#include <set>

#include "apguard/rng.hpp"

namespace apguard {

double snap_normalized(double v) {
  if (v < kNormFloor / 2.0) return 0.0;
  return std::clamp(v, kNormFloor, 1.0);
}

namespace {

FeatureMatrix honest_features(const FingerprintDatabase& db, const std::vector<std::size_t>& cols) {
  std::vector<double> data;
  data.reserve(db.size() * cols.size());
  for (const auto& rec : db.records())
    for (auto c : cols) data.push_back(rec.rssi[c]);
  return FeatureMatrix(db.size(), cols.size(), std::move(data));
}

std::vector<std::size_t> positions(const FingerprintDatabase& db, const std::vector<ApId>& aps) {
  std::vector<std::size_t> out;
  out.reserve(aps.size());
  for (const auto& ap : aps) out.push_back(db.position_of(ap));
  return out;
}

}  // namespace

std::vector<TreeEnsembleModel> train_imputation_regressors(const FingerprintDatabase& offline,
                                                           const std::vector<ApId>& honest_aps,
                                                           const std::vector<ApId>& malicious_aps,
                                                           const TreeHyperparams& hp) {
  if (offline.domain() != Domain::normalized)
    throw DomainError("imputation regressors need a normalized offline database");
  if (honest_aps.empty())
    throw UnmitigableError("every AP is malicious; nothing to impute from");
  const auto honest_cols = positions(offline, honest_aps);
  const auto malicious_cols = positions(offline, malicious_aps);
  const FeatureMatrix x = honest_features(offline, honest_cols);
  std::vector<TreeEnsembleModel> regressors;
  regressors.reserve(malicious_aps.size());
  for (std::size_t k = 0; k < malicious_aps.size(); ++k) {
    std::vector<double> target;
    target.reserve(offline.size());
    for (const auto& rec : offline.records()) target.push_back(rec.rssi[malicious_cols[k]]);
    TreeHyperparams h = hp;
    h.rng_seed = derive_seed(hp.rng_seed, "imputation-regressor:" + malicious_aps[k].name);
    regressors.push_back(train_regressor(x, target, h));
  }
  return regressors;
}

ImputationModel build_imputation_model(const FingerprintDatabase& offline,
                                       const std::vector<ApId>& malicious_aps,
                                       const TreeHyperparams& hp) {
  std::set<std::size_t> bad;
  for (const auto& ap : malicious_aps) bad.insert(offline.position_of(ap));
  ImputationModel model;
  model.schema = offline.schema();
  for (const auto& ap : offline.schema())
    (bad.contains(ap.index) ? model.malicious_aps : model.honest_aps).push_back(ap);
  if (!model.malicious_aps.empty())
    model.regressors =
        train_imputation_regressors(offline, model.honest_aps, model.malicious_aps, hp);
  return model;
}

std::vector<double> ImputationModel::impute(std::span<const double> rssi) const {
  if (rssi.size() != schema.size())
    throw SchemaError("record has " + std::to_string(rssi.size()) + " values, imputation schema has " +
                      std::to_string(schema.size()));
  std::vector<double> out(rssi.begin(), rssi.end());
  if (malicious_aps.empty()) return out;
  std::vector<double> features;
  features.reserve(honest_aps.size());
  for (const auto& ap : honest_aps) features.push_back(rssi[ap.index]);
  for (std::size_t k = 0; k < malicious_aps.size(); ++k)
    out[malicious_aps[k].index] = snap_normalized(predict_value(regressors[k], features));
  return out;
}

namespace {
void check_schema(const FingerprintDatabase& db, const ImputationModel& model) {
  if (db.schema() != model.schema)
    throw SchemaError("database schema does not match the imputation model");
  if (db.domain() != Domain::normalized) throw DomainError("imputation needs normalized values");
}
}  // namespace

FingerprintDatabase impute_offline(const FingerprintDatabase& offline, const ImputationModel& model) {
  check_schema(offline, model);
  return impute_queries(offline, model);
}

FingerprintRecord impute_query(const FingerprintRecord& query, const ImputationModel& model) {
  return FingerprintRecord{model.impute(query.rssi), query.location};
}

FingerprintDatabase impute_queries(const FingerprintDatabase& queries, const ImputationModel& model) {
  check_schema(queries, model);
  std::vector<FingerprintRecord> out;
  out.reserve(queries.size());
  for (const auto& rec : queries.records()) out.push_back(impute_query(rec, model));
  return FingerprintDatabase(queries.schema(), std::move(out), Domain::normalized, queries.kind());
}

TreeEnsembleModel train_localizer(const FingerprintDatabase& offline, const TreeHyperparams& hp) {
  if (offline.domain() != Domain::normalized)
    throw DomainError("the localizer is trained on normalized data");
  const FeatureMatrix x(offline.size(), offline.ap_count(), flatten_rows(offline));
  const auto labels = rp_labels(offline);
  return train_classifier(x, labels, hp);
}

MitigationState mitigation_cycle(const FingerprintDatabase& offline, const FingerprintDatabase& online,
                                 const std::vector<ApVerdict>& verdicts, const TreeHyperparams& hp) {
  if (offline.schema() != online.schema())
    throw SchemaError("offline and online databases have different AP schemas");
  const auto bad = malicious_aps(verdicts);
  if (bad.empty()) throw Error("mitigation_cycle: verdicts name no malicious AP");
  if (bad.size() >= offline.ap_count())
    throw UnmitigableError("every AP is malicious; nothing to impute from");

  TreeHyperparams regressor_hp = hp;
  regressor_hp.rng_seed = derive_seed(hp.rng_seed, "imputation");
  ImputationModel imputation = build_imputation_model(offline, bad, regressor_hp);
  FingerprintDatabase updated = impute_offline(offline, imputation);
  TreeHyperparams classifier_hp = hp;
  classifier_hp.rng_seed = derive_seed(hp.rng_seed, "retrain");
  TreeEnsembleModel classifier = train_localizer(updated, classifier_hp);
  return MitigationState{std::move(imputation), std::move(updated), std::move(classifier)};
}

}  // namespace apguard
