#include "apguard/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apguard/rng.hpp"

namespace apguard {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 (0-based) share rank mean of (i+1 .. j)
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman_rcc(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw Error("spearman_rcc: length mismatch (" + std::to_string(x.size()) + " vs " +
                std::to_string(y.size()) + ")");
  if (x.size() < 2) throw Error("spearman_rcc: need at least two points");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;  // ranks always average to (n+1)/2
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double a = rx[i] - mean, b = ry[i] - mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

std::vector<std::string> ApSelection::kept_names() const {
  std::vector<std::string> names;
  names.reserve(kept.size());
  for (const auto& ap : kept) names.push_back(ap.name);
  return names;
}

ApSelection select_correlated_aps(const FingerprintDatabase& survey, double threshold) {
  if (survey.empty()) throw Error("select_correlated_aps: empty database");
  if (!(threshold >= 0.0)) throw ConfigError("SRCC threshold must be >= 0");
  std::vector<double> xs, ys;
  xs.reserve(survey.size());
  ys.reserve(survey.size());
  for (std::size_t r = 0; r < survey.size(); ++r) {
    const auto& loc = survey.records()[r].location;
    if (!loc)
      throw MalformedDatabaseError("select_correlated_aps: record " + std::to_string(r) +
                                   " has no location");
    xs.push_back(loc->x);
    ys.push_back(loc->y);
  }
  ApSelection sel;
  sel.threshold = threshold;
  sel.candidates = survey.schema();
  std::vector<std::string> kept;
  for (const auto& ap : survey.schema()) {
    const auto col = column(survey, ap);
    double score = 0.0;
    if (col.size() >= 2)
      score = std::max(std::fabs(spearman_rcc(col, xs)), std::fabs(spearman_rcc(col, ys)));
    sel.scores.push_back(score);
    if (score >= threshold) kept.push_back(ap.name);
  }
  sel.kept = make_schema(kept);
  return sel;
}

FingerprintDatabase apply_selection(const FingerprintDatabase& db, const ApSelection& selection) {
  const auto names = selection.kept_names();
  return db.project(names);
}

double normalize_value(double raw, const NormalizationParams& params) {
  if (raw == kNoSignal) return params.sentinel_out;
  if (!(raw >= params.min && raw <= params.max))
    throw DomainError("raw RSSI " + std::to_string(raw) + " is outside [" +
                      std::to_string(params.min) + ", " + std::to_string(params.max) + "]");
  return ((raw - params.min) / (params.max - params.min)) * (1.0 - params.floor_out) +
         params.floor_out;
}

std::vector<double> normalize_values(std::span<const double> raw, const NormalizationParams& params) {
  std::vector<double> out;
  out.reserve(raw.size());
  for (double v : raw) out.push_back(normalize_value(v, params));
  return out;
}

FingerprintDatabase normalize_database(const FingerprintDatabase& db, DbKind out_kind,
                                       const NormalizationParams& params) {
  if (db.domain() != Domain::raw)
    throw DomainError("normalize_database: database is already normalized");
  std::vector<FingerprintRecord> out;
  out.reserve(db.size());
  for (std::size_t r = 0; r < db.size(); ++r) {
    const auto& rec = db.records()[r];
    FingerprintRecord n;
    n.location = rec.location;
    try {
      n.rssi = normalize_values(rec.rssi, params);
    } catch (const DomainError& e) {
      throw DomainError("record " + std::to_string(r) + ": " + e.what());
    }
    out.push_back(std::move(n));
  }
  return FingerprintDatabase(db.schema(), std::move(out), Domain::normalized, out_kind);
}

void NoiseConfig::validate() const {
  if (!(fraction_per_rp >= 0.0 && fraction_per_rp <= 1.0))
    throw ConfigError("noise fraction_per_rp must be in [0, 1]");
  if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
}

double NoiseConfig::normalized_sigma(const NormalizationParams& params) const {
  if (domain == NoiseDomain::normalized) return sigma;
  return sigma * (1.0 - params.floor_out) / (params.max - params.min);
}

std::size_t augmented_count(double fraction, std::size_t group_size) {
  // The epsilon keeps exact products such as 90 * (1/9) from rounding up.
  const double want = fraction * static_cast<double>(group_size);
  const auto n = static_cast<std::size_t>(std::ceil(want - 1e-9));
  return std::min(n, group_size);
}

FingerprintDatabase augment_with_noise(const FingerprintDatabase& offline, const NoiseConfig& config) {
  config.validate();
  if (offline.kind() != DbKind::offline || offline.domain() != Domain::normalized)
    throw DomainError("augment_with_noise expects a normalized offline database");
  const double sigma = config.normalized_sigma();
  std::vector<FingerprintRecord> records = offline.records();
  for (const auto& group : group_by_rp(offline)) {
    const std::size_t want = augmented_count(config.fraction_per_rp, group.size());
    if (want == 0) continue;
    Rng rng(derive_seed(config.rng_seed, "augment-rp", static_cast<std::uint64_t>(
                                                           static_cast<std::int64_t>(group.rp_id))));
    // Partial Fisher-Yates over the group's rows.
    std::vector<std::size_t> rows = group.rows;
    for (std::size_t k = 0; k < want; ++k) {
      const std::size_t j = k + static_cast<std::size_t>(rng.below(rows.size() - k));
      std::swap(rows[k], rows[j]);
    }
    std::sort(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(want));
    for (std::size_t k = 0; k < want; ++k) {
      FingerprintRecord copy = offline.records()[rows[k]];
      for (double& v : copy.rssi) {
        if (v == 0.0) continue;
        const double noise = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
        v = std::clamp(v + noise, kNormFloor, 1.0);
      }
      records.push_back(std::move(copy));
    }
  }
  return FingerprintDatabase(offline.schema(), std::move(records), Domain::normalized,
                             DbKind::offline);
}

}  // namespace apguard
