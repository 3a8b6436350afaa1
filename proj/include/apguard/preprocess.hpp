#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "apguard/core.hpp"

namespace apguard {

// Average ranks (1-based); tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of average ranks. Returns 0 when either input is
// constant. Throws on length mismatch or fewer than two points.
double spearman_rcc(std::span<const double> x, std::span<const double> y);

inline constexpr double kDefaultSrccThreshold = 0.1;

struct ApSelection {
  std::vector<ApId> candidates;  // input schema
  std::vector<double> scores;    // one per candidate
  std::vector<ApId> kept;        // reindexed to their position in the kept schema
  double threshold = kDefaultSrccThreshold;

  std::vector<std::string> kept_names() const;
};

// score = max(|srcc(ap, x)|, |srcc(ap, y)|) over the labeled survey; the
// sentinel takes part in ranking as the number 100.
ApSelection select_correlated_aps(const FingerprintDatabase& survey,
                                  double threshold = kDefaultSrccThreshold);

FingerprintDatabase apply_selection(const FingerprintDatabase& db, const ApSelection& selection);

struct NormalizationParams {
  double min = kRawMin;
  double max = kRawMax;
  double floor_out = kNormFloor;
  double sentinel_out = 0.0;
};

// sentinel -> 0, otherwise ((r - min) / (max - min)) * 0.75 + 0.25
double normalize_value(double raw, const NormalizationParams& params = {});
std::vector<double> normalize_values(std::span<const double> raw, const NormalizationParams& params = {});

// Result kind defaults to offline; pass the input kind to keep it.
FingerprintDatabase normalize_database(const FingerprintDatabase& db,
                                       DbKind out_kind = DbKind::offline,
                                       const NormalizationParams& params = {});

enum class NoiseDomain { raw_db, normalized };

struct NoiseConfig {
  double fraction_per_rp = 0.10;
  double sigma = 0.5;
  NoiseDomain domain = NoiseDomain::raw_db;
  std::uint64_t rng_seed = 0;

  void validate() const;
  // Standard deviation in normalized units.
  double normalized_sigma(const NormalizationParams& params = {}) const;
};

// Number of copies drawn from an RP group: ceil(fraction * size).
std::size_t augmented_count(double fraction, std::size_t group_size);

// Appends noisy copies of ceil(fraction * n_j) records per RP group (chosen
// without replacement). Zero entries are left untouched; perturbed entries
// are clamped to [0.25, 1]. Copies follow the originals, grouped by rp_id.
FingerprintDatabase augment_with_noise(const FingerprintDatabase& offline, const NoiseConfig& config);

}  // namespace apguard
