#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "apguard/core.hpp"

namespace apguard {

// Declarative column mapping for fingerprint CSV files.
struct CsvSchema {
  // When unset, rp ids are assigned 1..R over the distinct (x, y) pairs in
  // lexicographic order.
  std::optional<std::string> rp_id_column = "rp_id";
  std::string x_column = "x";
  std::string y_column = "y";
  // Explicit AP columns; when empty, every column whose name starts with
  // ap_prefix is an AP column, in file order.
  std::vector<std::string> ap_columns;
  std::string ap_prefix = "AP";
  // Rows are kept only when every (column, value) pair matches.
  std::vector<std::pair<std::string, double>> filters;
  // Rows with empty rp_id/x/y cells become unlabeled records.
  bool allow_unlabeled = true;

  // rp_id,x,y,AP001..APn
  static CsvSchema compact();
  // UJIIndoorLoc: WAP001..WAP520, LONGITUDE, LATITUDE, FLOOR, ...
  static CsvSchema uji(std::optional<int> floor = std::nullopt);
};

FingerprintDatabase parse_fingerprint_csv(std::istream& in, const CsvSchema& schema = CsvSchema::compact(),
                                          Domain domain = Domain::raw,
                                          DbKind kind = DbKind::raw_survey);

// Long-term UJI layout: a header-less RSS file (one column per AP) plus a
// header-less coordinate file (x, y, floor). Rows whose floor differs from
// `floor` are dropped.
FingerprintDatabase parse_split_csv(std::istream& rss, std::istream& coords,
                                    std::optional<int> floor = std::nullopt);

// Compact layout, LF endings, shortest round-trip decimals. Unlabeled records
// leave rp_id, x and y empty.
void write_fingerprint_csv(std::ostream& out, const FingerprintDatabase& db);

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

struct SyntheticWorldConfig {
  std::size_t n_rps = 25;
  std::size_t n_aps = 40;
  double width_m = 50.0;
  double height_m = 50.0;
  std::size_t samples_per_rp = 50;
  double tx_power_dbm = -30.0;
  double path_loss_exponent = 3.0;
  double shadowing_sigma_db = 2.0;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

struct WorldGroundTruth {
  std::vector<Point> ap_positions;
  std::vector<RpLocation> rp_locations;
  // noiseless_rssi[rp][ap] in dBm, before clipping.
  std::vector<std::vector<double>> noiseless_rssi;
  double shadowing_sigma_db = 0.0;
  std::vector<ApId> schema;
};

struct SyntheticWorld {
  FingerprintDatabase survey;
  WorldGroundTruth truth;
};

inline constexpr double kMinDistanceM = 0.1;

// Log-distance path loss: tx - 10 * exponent * log10(max(d, 0.1 m) / 1 m).
double path_loss_rssi(double tx_power_dbm, double exponent, double distance_m);

// Maps a noisy dBm value to a legal raw value: above 0 clips to 0, below -100
// becomes the no-signal sentinel.
double quantize_raw(double dbm);

// RPs sit at cell centres of a ceil(sqrt(n)) column grid, numbered 1..n
// row-major; AP positions are uniform over the area.
SyntheticWorld generate_world(const SyntheticWorldConfig& config);

struct OnlineQuery {
  FingerprintRecord record;  // raw, unlabeled
  RpLocation truth;
};

// Environmental drift applied on top of the world's shadowing.
struct QueryDrift {
  double bias_db = 0.0;
  double extra_sigma_db = 0.0;
};

std::vector<OnlineQuery> sample_online_queries(const WorldGroundTruth& truth, std::size_t n,
                                               std::uint64_t seed, QueryDrift drift = {});

// Queries as a raw-survey database whose labels are the ground truth.
FingerprintDatabase queries_as_database(const WorldGroundTruth& truth,
                                        const std::vector<OnlineQuery>& queries);

}  // namespace apguard
