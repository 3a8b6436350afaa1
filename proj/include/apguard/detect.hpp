#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <vector>

#include "apguard/core.hpp"

namespace apguard {

struct DetectorConfig {
  double th1_variance = 0.05;
  double th2_mean_diff = 0.005;
  std::size_t min_group_size = 2;

  void validate() const;
};

// Per-AP statistic for every qualifying RP: values[ap][j] belongs to rp_ids[j].
struct RpStatistics {
  std::vector<int> rp_ids;
  std::vector<std::vector<double>> values;
};

// Population variance (divide by t) of each AP within each online RP group of
// at least min_group_size records.
RpStatistics rp_variances(const FingerprintDatabase& online, const DetectorConfig& config);

// delta = mean(offline group) - mean(online group), over RPs present in both
// databases with groups of at least min_group_size records.
RpStatistics rp_mean_differences(const FingerprintDatabase& offline,
                                 const FingerprintDatabase& online, const DetectorConfig& config);

struct VarianceTestResult {
  std::vector<double> max_variance;
  std::vector<bool> flagged;  // max_variance >= th1
};

struct MeanDifferenceTestResult {
  std::vector<double> min_mean_diff;
  std::vector<bool> flagged;  // min_mean_diff > th2
};

// Both throw InsufficientDataError when no RP qualifies.
VarianceTestResult variance_test(const FingerprintDatabase& online, const DetectorConfig& config);
MeanDifferenceTestResult mean_difference_test(const FingerprintDatabase& offline,
                                              const FingerprintDatabase& online,
                                              const DetectorConfig& config);

struct ApVerdict {
  ApId ap;
  std::optional<double> max_variance;   // unset when the variance test had no data
  std::optional<double> min_mean_diff;  // unset when the mean test had no data
  bool flagged_by_variance = false;
  bool flagged_by_mean = false;
  bool malicious = false;

  friend bool operator==(const ApVerdict&, const ApVerdict&) = default;
};

// Union of both tests, one verdict per schema AP. If only one test has enough
// data, APs are judged by that test alone.
std::vector<ApVerdict> detect_malicious_aps(const FingerprintDatabase& offline,
                                            const FingerprintDatabase& online,
                                            const DetectorConfig& config);

std::vector<ApId> malicious_aps(const std::vector<ApVerdict>& verdicts);

// ap,name,max_variance,min_mean_diff,flag_var,flag_mean,malicious
void write_verdicts_csv(std::ostream& out, const std::vector<ApVerdict>& verdicts);
std::vector<ApVerdict> read_verdicts_csv(std::istream& in);

}  // namespace apguard
