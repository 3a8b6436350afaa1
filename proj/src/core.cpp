#include "apguard/core.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace apguard {

std::string_view to_string(Domain d) {
  return d == Domain::raw ? "raw" : "normalized";
}

std::string_view to_string(DbKind k) {
  switch (k) {
    case DbKind::raw_survey: return "raw-survey";
    case DbKind::offline: return "offline";
    case DbKind::online: return "online";
  }
  return "?";
}

bool is_legal_value(double v, Domain domain) {
  if (!std::isfinite(v)) return false;
  if (domain == Domain::raw) return v == kNoSignal || (v >= kRawMin && v <= kRawMax);
  return v == 0.0 || (v >= kNormFloor && v <= 1.0);
}

std::vector<ApId> make_schema(std::span<const std::string> names) {
  std::vector<ApId> schema;
  schema.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) schema.push_back({i, names[i]});
  return schema;
}

std::vector<ApId> numbered_schema(std::size_t n, std::string_view prefix) {
  std::vector<ApId> schema;
  schema.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::string num = std::to_string(i + 1);
    if (num.size() < 3) num.insert(0, 3 - num.size(), '0');
    schema.push_back({i, std::string(prefix) + num});
  }
  return schema;
}

FingerprintDatabase::FingerprintDatabase(std::vector<ApId> schema,
                                         std::vector<FingerprintRecord> records, Domain domain,
                                         DbKind kind)
    : schema_(std::move(schema)), records_(std::move(records)), domain_(domain), kind_(kind) {
  std::set<std::string_view> names;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].index != i)
      throw SchemaError("AP '" + schema_[i].name + "' has index " +
                        std::to_string(schema_[i].index) + " at position " + std::to_string(i));
    if (schema_[i].name.empty()) throw SchemaError("empty AP name at position " + std::to_string(i));
    if (!names.insert(schema_[i].name).second)
      throw SchemaError("duplicate AP name '" + schema_[i].name + "'");
  }
  for (std::size_t r = 0; r < records_.size(); ++r) {
    const auto& rec = records_[r];
    if (rec.rssi.size() != schema_.size())
      throw MalformedDatabaseError("record " + std::to_string(r) + " has " +
                                   std::to_string(rec.rssi.size()) + " values, schema has " +
                                   std::to_string(schema_.size()));
    for (std::size_t i = 0; i < rec.rssi.size(); ++i) {
      if (!is_legal_value(rec.rssi[i], domain_))
        throw DomainError("record " + std::to_string(r) + ", AP '" + schema_[i].name +
                          "': value " + std::to_string(rec.rssi[i]) + " is not a legal " +
                          std::string(to_string(domain_)) + " value");
    }
    if (rec.location) {
      if (!std::isfinite(rec.location->x) || !std::isfinite(rec.location->y))
        throw MalformedDatabaseError("record " + std::to_string(r) + " has a non-finite location");
    } else if (kind_ != DbKind::raw_survey) {
      throw MalformedDatabaseError("record " + std::to_string(r) + " of an " +
                                   std::string(to_string(kind_)) +
                                   " database has no location");
    }
  }
}

FingerprintDatabase FingerprintDatabase::from_columns(
    std::vector<ApId> schema, const std::vector<std::vector<double>>& columns,
    std::vector<std::optional<RpLocation>> locations, Domain domain, DbKind kind) {
  if (columns.size() != schema.size())
    throw SchemaError("column count " + std::to_string(columns.size()) +
                      " does not match schema size " + std::to_string(schema.size()));
  for (const auto& col : columns)
    if (col.size() != locations.size())
      throw MalformedDatabaseError("column length does not match the number of locations");
  std::vector<FingerprintRecord> records(locations.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    records[r].rssi.resize(columns.size());
    for (std::size_t i = 0; i < columns.size(); ++i) records[r].rssi[i] = columns[i][r];
    records[r].location = locations[r];
  }
  return FingerprintDatabase(std::move(schema), std::move(records), domain, kind);
}

std::optional<std::size_t> FingerprintDatabase::find_ap(std::string_view name) const {
  for (const auto& ap : schema_)
    if (ap.name == name) return ap.index;
  return std::nullopt;
}

std::size_t FingerprintDatabase::position_of(const ApId& ap) const {
  if (ap.index < schema_.size() && schema_[ap.index].name == ap.name) return ap.index;
  throw SchemaError("AP '" + ap.name + "' (index " + std::to_string(ap.index) +
                    ") is not in the schema");
}

std::vector<std::string> FingerprintDatabase::ap_names() const {
  std::vector<std::string> names;
  names.reserve(schema_.size());
  for (const auto& ap : schema_) names.push_back(ap.name);
  return names;
}

bool FingerprintDatabase::fully_labeled() const {
  return std::all_of(records_.begin(), records_.end(),
                     [](const FingerprintRecord& r) { return r.location.has_value(); });
}

FingerprintDatabase FingerprintDatabase::project(std::span<const std::string> ap_names) const {
  std::vector<std::size_t> src;
  src.reserve(ap_names.size());
  for (const auto& name : ap_names) {
    auto pos = find_ap(name);
    if (!pos) throw SchemaError("AP '" + name + "' is not in the schema");
    src.push_back(*pos);
  }
  std::vector<FingerprintRecord> out(records_.size());
  for (std::size_t r = 0; r < records_.size(); ++r) {
    out[r].rssi.reserve(src.size());
    for (auto s : src) out[r].rssi.push_back(records_[r].rssi[s]);
    out[r].location = records_[r].location;
  }
  return FingerprintDatabase(make_schema(ap_names), std::move(out), domain_, kind_);
}

FingerprintDatabase FingerprintDatabase::with_kind(DbKind kind) const {
  return FingerprintDatabase(schema_, records_, domain_, kind);
}

std::vector<RpGroupView> group_by_rp(const FingerprintDatabase& db) {
  std::map<int, std::vector<std::size_t>> rows_by_rp;
  for (std::size_t r = 0; r < db.size(); ++r) {
    const auto& loc = db.records()[r].location;
    if (!loc) throw MalformedDatabaseError("record " + std::to_string(r) + " has no location");
    rows_by_rp[loc->rp_id].push_back(r);
  }
  std::vector<RpGroupView> groups;
  groups.reserve(rows_by_rp.size());
  for (auto& [rp, rows] : rows_by_rp) {
    RpGroupView g;
    g.rp_id = rp;
    g.values.assign(db.ap_count(), {});
    for (auto& col : g.values) col.reserve(rows.size());
    for (auto r : rows) {
      const auto& rssi = db.records()[r].rssi;
      for (std::size_t i = 0; i < rssi.size(); ++i) g.values[i].push_back(rssi[i]);
    }
    g.rows = std::move(rows);
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<double> column(const FingerprintDatabase& db, const ApId& ap) {
  const std::size_t pos = db.position_of(ap);
  std::vector<double> out;
  out.reserve(db.size());
  for (const auto& rec : db.records()) out.push_back(rec.rssi[pos]);
  return out;
}

std::vector<double> flatten_rows(const FingerprintDatabase& db) {
  std::vector<double> out;
  out.reserve(db.size() * db.ap_count());
  for (const auto& rec : db.records()) out.insert(out.end(), rec.rssi.begin(), rec.rssi.end());
  return out;
}

std::vector<int> rp_labels(const FingerprintDatabase& db) {
  std::vector<int> out;
  out.reserve(db.size());
  for (std::size_t r = 0; r < db.size(); ++r) {
    const auto& loc = db.records()[r].location;
    if (!loc) throw MalformedDatabaseError("record " + std::to_string(r) + " has no location");
    out.push_back(loc->rp_id);
  }
  return out;
}

}  // namespace apguard
