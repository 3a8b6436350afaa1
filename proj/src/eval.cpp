#include "apguard/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace apguard {

ConfusionCounts confusion_counts(const std::vector<ApVerdict>& verdicts,
                                 std::span<const ApId> truly_malicious) {
  std::set<std::string> truth;
  for (const auto& ap : truly_malicious) truth.insert(ap.name);
  std::set<std::string> judged;
  for (const auto& v : verdicts) judged.insert(v.ap.name);
  for (const auto& name : truth)
    if (!judged.contains(name)) throw SchemaError("malicious AP '" + name + "' has no verdict");

  ConfusionCounts c;
  for (const auto& v : verdicts) {
    const bool bad = truth.contains(v.ap.name);
    if (v.malicious && bad) ++c.tp;
    else if (v.malicious) ++c.fp;
    else if (bad) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {
std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

DetectionMetrics detection_metrics(const ConfusionCounts& c) {
  DetectionMetrics m;
  m.fpr = ratio(c.fp, c.fp + c.tn);
  m.fnr = ratio(c.fn, c.fn + c.tp);
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  m.accuracy = ratio(c.tp + c.tn, c.total());
  if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
    m.f1 = 2.0 * (*m.precision * *m.recall) / (*m.precision + *m.recall);
  return m;
}

std::vector<double> localization_errors(std::span<const RpLocation> predicted,
                                        std::span<const RpLocation> truth) {
  if (predicted.size() != truth.size())
    throw Error("localization_errors: " + std::to_string(predicted.size()) + " predictions vs " +
                std::to_string(truth.size()) + " ground-truth locations");
  std::vector<double> out;
  out.reserve(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    out.push_back(std::hypot(predicted[i].x - truth[i].x, predicted[i].y - truth[i].y));
  return out;
}

double mean_localization_error(std::span<const RpLocation> predicted,
                               std::span<const RpLocation> truth) {
  const auto errors = localization_errors(predicted, truth);
  if (errors.empty()) throw Error("mean_localization_error: no queries");
  double s = 0.0;
  for (double e : errors) s += e;
  return s / static_cast<double>(errors.size());
}

std::vector<CdfPoint> error_cdf(std::span<const double> errors) {
  if (errors.empty()) throw Error("error_cdf: no errors");
  std::vector<double> sorted(errors.begin(), errors.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<CdfPoint> out;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    out.push_back({sorted[i], i + 1 == sorted.size() ? 1.0 : static_cast<double>(i + 1) / n});
  }
  return out;
}

}  // namespace apguard
