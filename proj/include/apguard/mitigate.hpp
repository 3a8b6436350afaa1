#pragma once

#include <span>
#include <vector>

#include "apguard/core.hpp"
#include "apguard/detect.hpp"
#include "apguard/gbdt.hpp"

namespace apguard {

// Maps a regressor output onto the legal normalized codomain: below 0.125 is
// no signal (0), everything else is clamped to [0.25, 1].
double snap_normalized(double v);

// Regressors that rebuild malicious columns from honest ones.
struct ImputationModel {
  std::vector<ApId> schema;         // full schema of the databases it rewrites
  std::vector<ApId> honest_aps;     // m feature columns, schema order
  std::vector<ApId> malicious_aps;  // p imputed columns, schema order
  std::vector<TreeEnsembleModel> regressors;  // one per malicious AP

  // Replaces the malicious entries of one normalized fingerprint. Throws
  // SchemaError when the length does not match the schema.
  std::vector<double> impute(std::span<const double> rssi) const;
};

// Regressor k: features = honest columns of the offline database, target =
// malicious AP k's offline column. Throws UnmitigableError when no AP is honest.
std::vector<TreeEnsembleModel> train_imputation_regressors(const FingerprintDatabase& offline,
                                                           const std::vector<ApId>& honest_aps,
                                                           const std::vector<ApId>& malicious_aps,
                                                           const TreeHyperparams& hp);

ImputationModel build_imputation_model(const FingerprintDatabase& offline,
                                       const std::vector<ApId>& malicious_aps,
                                       const TreeHyperparams& hp);

FingerprintDatabase impute_offline(const FingerprintDatabase& offline, const ImputationModel& model);
FingerprintRecord impute_query(const FingerprintRecord& query, const ImputationModel& model);
// Every record of a normalized database; kind and labels are kept.
FingerprintDatabase impute_queries(const FingerprintDatabase& queries, const ImputationModel& model);

struct MitigationState {
  ImputationModel imputation;
  FingerprintDatabase updated_offline;
  TreeEnsembleModel retrained_classifier;
};

// Trains the regressors, rewrites the offline database and retrains the
// localization classifier on it from scratch. The online database is only
// checked for schema agreement.
MitigationState mitigation_cycle(const FingerprintDatabase& offline, const FingerprintDatabase& online,
                                 const std::vector<ApVerdict>& verdicts, const TreeHyperparams& hp);

// Convenience: trains a localization classifier on a labeled normalized database.
TreeEnsembleModel train_localizer(const FingerprintDatabase& offline, const TreeHyperparams& hp);

}  // namespace apguard
