#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "apguard/attack.hpp"
#include "apguard/datasource.hpp"
#include "apguard/detect.hpp"
#include "apguard/eval.hpp"
#include "apguard/gbdt.hpp"
#include "apguard/mitigate.hpp"
#include "apguard/preprocess.hpp"

namespace apguard {

// Everything a run needs besides the data. Every stage seed is derived from
// master_seed (see derive_seed) so a single number reproduces a run.
struct PipelineConfig {
  SyntheticWorldConfig world;
  std::size_t n_queries = 500;
  double srcc_threshold = kDefaultSrccThreshold;
  NoiseConfig noise;
  bool augment = true;
  DetectorConfig detector;
  TreeHyperparams model;
  std::uint64_t master_seed = 42;

  void validate() const;
};

// Stage seed names.
namespace stage {
inline constexpr const char* kWorld = "world";
inline constexpr const char* kQueries = "queries";
inline constexpr const char* kAugment = "augment";
inline constexpr const char* kClassifier = "classifier";
inline constexpr const char* kMitigate = "mitigate";
}  // namespace stage

struct SyntheticData {
  SyntheticWorld world;
  FingerprintDatabase queries;  // raw, full schema, labeled with ground truth
};

SyntheticData make_synthetic_data(const PipelineConfig& config);

struct OfflineBuild {
  ApSelection selection;
  FingerprintDatabase offline;  // normalized, selected, optionally augmented
};

OfflineBuild build_offline(const FingerprintDatabase& survey, const PipelineConfig& config);
TreeEnsembleModel train_offline_classifier(const FingerprintDatabase& offline,
                                           const PipelineConfig& config);

using RpIndex = std::map<int, RpLocation>;
RpIndex rp_location_index(const FingerprintDatabase& labeled);

// Predicted locations of normalized fingerprints.
std::vector<RpLocation> localize(const TreeEnsembleModel& classifier, const RpIndex& index,
                                 const FingerprintDatabase& normalized);

// Online database: the normalized queries labeled with their predicted RP.
FingerprintDatabase serve_queries(const TreeEnsembleModel& classifier, const RpIndex& index,
                                  const FingerprintDatabase& normalized);

std::vector<RpLocation> ground_truth(const FingerprintDatabase& labeled);

struct PreparedWorld {
  FingerprintDatabase survey;
  ApSelection selection;
  FingerprintDatabase offline;
  TreeEnsembleModel classifier;
  RpIndex rp_index;
  FingerprintDatabase queries;  // raw, kept APs only, labeled with ground truth
};

PreparedWorld prepare_world(const FingerprintDatabase& survey, const FingerprintDatabase& labeled_queries,
                            const PipelineConfig& config);

// Mean localization error of raw labeled queries (projected onto the kept APs).
double evaluate_mle(const PreparedWorld& world, const FingerprintDatabase& raw_labeled_queries);

std::string fraction_tag(double fraction);
std::uint64_t choose_seed(std::uint64_t master, AttackKind kind, double fraction, std::size_t trial);
std::uint64_t attack_seed(std::uint64_t master, AttackKind kind, double fraction, std::size_t trial);

AttackPlan make_attack_plan(std::span<const ApId> schema, AttackKind kind, double fraction,
                            std::uint64_t master_seed, std::size_t trial);

struct MetricSummary {
  std::optional<double> mean;
  std::optional<double> min;
  std::optional<double> max;
  std::size_t undefined = 0;  // trials where the metric had a zero denominator
};

MetricSummary summarize(std::span<const std::optional<double>> per_trial);

struct DetectionSummary {
  AttackKind kind = AttackKind::CV;
  double fraction = 0.0;
  std::size_t trials = 0;
  MetricSummary fpr, fnr, precision, recall, accuracy, f1, mle;
  ConfusionCounts totals;
};

// Per trial: fresh malicious set, attack, serve, detect, score. Metrics are
// averaged over trials, skipping undefined values.
DetectionSummary run_detection_experiment(const PreparedWorld& world, AttackKind kind, double fraction,
                                          std::size_t n_trials, std::uint64_t master_seed,
                                          const DetectorConfig& detector);

enum class Scenario { clean, attacked, query_only, full_mitigation, baseline_external };
std::string_view to_string(Scenario s);

struct CdfCurve {
  Scenario scenario = Scenario::clean;
  std::vector<double> errors;
  std::vector<CdfPoint> cdf;
  double mle = 0.0;
};

struct CdfExperimentResult {
  AttackKind kind = AttackKind::CV;
  double fraction = 0.0;
  std::vector<ApId> truly_malicious;
  std::vector<ApVerdict> verdicts;
  ConfusionCounts counts;
  bool mitigated = false;  // false when detection flagged nothing
  std::vector<CdfCurve> curves;  // clean, attacked, query_only, full_mitigation, baseline_external

  const CdfCurve& curve(Scenario s) const;
};

// The baseline slot carries `external_errors` when supplied, otherwise the
// attacked-unmitigated errors.
CdfExperimentResult run_cdf_experiment(const PreparedWorld& world, AttackKind kind, double fraction,
                                       const PipelineConfig& config,
                                       const std::optional<std::vector<double>>& external_errors = {});

void write_detection_csv(std::ostream& out, std::span<const DetectionSummary> rows);
void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf);
void write_cdf_summary_csv(std::ostream& out, std::span<const CdfExperimentResult> results);
// One error_m value per row.
std::vector<double> read_errors_csv(std::istream& in);

}  // namespace apguard
