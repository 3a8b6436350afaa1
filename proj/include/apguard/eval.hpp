#pragma once

#include <optional>
#include <span>
#include <vector>

#include "apguard/core.hpp"
#include "apguard/detect.hpp"

namespace apguard {

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Throws SchemaError when a ground-truth AP has no verdict.
ConfusionCounts confusion_counts(const std::vector<ApVerdict>& verdicts,
                                 std::span<const ApId> truly_malicious);

// A metric whose denominator is zero is std::nullopt ("undefined"), never 0.
struct DetectionMetrics {
  std::optional<double> fpr;
  std::optional<double> fnr;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> accuracy;
  std::optional<double> f1;
};

DetectionMetrics detection_metrics(const ConfusionCounts& counts);

struct MetricsReport {
  DetectionMetrics detection;
  std::optional<double> mle;
  std::vector<double> error_samples;
};

std::vector<double> localization_errors(std::span<const RpLocation> predicted,
                                        std::span<const RpLocation> truth);
double mean_localization_error(std::span<const RpLocation> predicted,
                               std::span<const RpLocation> truth);

struct CdfPoint {
  double error_m = 0.0;
  double cum_fraction = 0.0;

  friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

// Empirical CDF with one point per distinct error value.
std::vector<CdfPoint> error_cdf(std::span<const double> errors);

}  // namespace apguard
