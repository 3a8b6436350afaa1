#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apguard/errors.hpp"

namespace apguard {

// Raw-domain encoding of "AP not heard" (UJI convention).
inline constexpr double kNoSignal = 100.0;
inline constexpr double kRawMin = -100.0;
inline constexpr double kRawMax = 0.0;
// Normalized domain: 0 for no signal, otherwise [kNormFloor, 1].
inline constexpr double kNormFloor = 0.25;

enum class Domain { raw, normalized };
enum class DbKind { raw_survey, offline, online };

std::string_view to_string(Domain d);
std::string_view to_string(DbKind k);

// One access point column. Within a schema, index equals column position.
struct ApId {
  std::size_t index = 0;
  std::string name;

  friend bool operator==(const ApId&, const ApId&) = default;
};

struct RpLocation {
  int rp_id = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const RpLocation&, const RpLocation&) = default;
};

struct FingerprintRecord {
  std::vector<double> rssi;
  std::optional<RpLocation> location;

  friend bool operator==(const FingerprintRecord&, const FingerprintRecord&) = default;
};

bool is_legal_value(double v, Domain domain);

// Builds a schema with index == position from a list of names.
std::vector<ApId> make_schema(std::span<const std::string> names);
// AP001 .. APn
std::vector<ApId> numbered_schema(std::size_t n, std::string_view prefix = "AP");

// Immutable, validated collection of fingerprints sharing a schema and a domain.
class FingerprintDatabase {
 public:
  FingerprintDatabase(std::vector<ApId> schema, std::vector<FingerprintRecord> records,
                      Domain domain, DbKind kind);

  // Inverse of column(): columns[ap][row].
  static FingerprintDatabase from_columns(std::vector<ApId> schema,
                                          const std::vector<std::vector<double>>& columns,
                                          std::vector<std::optional<RpLocation>> locations,
                                          Domain domain, DbKind kind);

  const std::vector<ApId>& schema() const noexcept { return schema_; }
  const std::vector<FingerprintRecord>& records() const noexcept { return records_; }
  const FingerprintRecord& record(std::size_t i) const { return records_.at(i); }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  std::size_t ap_count() const noexcept { return schema_.size(); }
  Domain domain() const noexcept { return domain_; }
  DbKind kind() const noexcept { return kind_; }

  std::optional<std::size_t> find_ap(std::string_view name) const;
  // Position of `ap` in this schema, matched by name and index. Throws SchemaError.
  std::size_t position_of(const ApId& ap) const;
  std::vector<std::string> ap_names() const;
  bool fully_labeled() const;

  // Keeps the named APs in the given order; indices are renumbered.
  FingerprintDatabase project(std::span<const std::string> ap_names) const;
  FingerprintDatabase with_kind(DbKind kind) const;

  friend bool operator==(const FingerprintDatabase&, const FingerprintDatabase&) = default;

 private:
  std::vector<ApId> schema_;
  std::vector<FingerprintRecord> records_;
  Domain domain_;
  DbKind kind_;
};

// Records of one reference point, split into per-AP value collections.
struct RpGroupView {
  int rp_id = 0;
  std::vector<std::size_t> rows;            // record indices in the source database
  std::vector<std::vector<double>> values;  // values[ap][k] belongs to rows[k]

  std::size_t size() const noexcept { return rows.size(); }
};

// One view per distinct rp_id, ascending. Throws MalformedDatabaseError on an
// unlabeled record.
std::vector<RpGroupView> group_by_rp(const FingerprintDatabase& db);

std::vector<double> column(const FingerprintDatabase& db, const ApId& ap);

// Row-major copy of every record's values, for model training.
std::vector<double> flatten_rows(const FingerprintDatabase& db);
std::vector<int> rp_labels(const FingerprintDatabase& db);

}  // namespace apguard
