#include "apguard/datasource.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "apguard/csv.hpp"
#include "apguard/rng.hpp"

namespace apguard {

CsvSchema CsvSchema::compact() { return CsvSchema{}; }

CsvSchema CsvSchema::uji(std::optional<int> floor) {
  CsvSchema s;
  s.rp_id_column.reset();
  s.x_column = "LONGITUDE";
  s.y_column = "LATITUDE";
  s.ap_prefix = "WAP";
  if (floor) s.filters.emplace_back("FLOOR", *floor);
  s.allow_unlabeled = false;
  return s;
}

namespace {

std::vector<std::optional<RpLocation>> assign_rp_ids_from_coordinates(
    const std::vector<std::optional<Point>>& coords) {
  std::map<std::pair<double, double>, int> ids;
  for (const auto& c : coords)
    if (c) ids.emplace(std::pair{c->x, c->y}, 0);
  int next = 1;
  for (auto& [_, id] : ids) id = next++;
  std::vector<std::optional<RpLocation>> out;
  out.reserve(coords.size());
  for (const auto& c : coords) {
    if (c)
      out.push_back(RpLocation{ids.at({c->x, c->y}), c->x, c->y});
    else
      out.push_back(std::nullopt);
  }
  return out;
}

int parse_rp_id(std::string_view cell, std::size_t row, std::string_view column) {
  const double v = csv::parse_number(cell, row, column);
  if (v != std::floor(v) || std::fabs(v) > 2e9)
    throw ParseError(row, "column '" + std::string(column) + "': '" + std::string(cell) +
                              "' is not an integer rp id");
  return static_cast<int>(v);
}

}  // namespace

FingerprintDatabase parse_fingerprint_csv(std::istream& in, const CsvSchema& schema,
                                          Domain domain, DbKind kind) {
  const csv::Table table = csv::read_table(in);
  auto require = [&](const std::string& name) {
    auto idx = table.column_index(name);
    if (!idx) throw ParseError(1, "missing column '" + name + "'");
    return *idx;
  };

  std::optional<std::size_t> rp_col;
  if (schema.rp_id_column) rp_col = require(*schema.rp_id_column);
  const std::size_t x_col = require(schema.x_column);
  const std::size_t y_col = require(schema.y_column);

  std::vector<std::size_t> ap_cols;
  std::vector<std::string> ap_names;
  if (!schema.ap_columns.empty()) {
    for (const auto& name : schema.ap_columns) {
      ap_cols.push_back(require(name));
      ap_names.push_back(name);
    }
  } else {
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (table.header[c].starts_with(schema.ap_prefix)) {
        ap_cols.push_back(c);
        ap_names.push_back(table.header[c]);
      }
    }
  }
  std::vector<std::pair<std::size_t, double>> filters;
  for (const auto& [name, value] : schema.filters) filters.emplace_back(require(name), value);

  std::vector<FingerprintRecord> records;
  std::vector<std::optional<Point>> coords;
  std::vector<std::optional<int>> rp_ids;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    bool keep = true;
    for (const auto& [col, value] : filters)
      if (csv::parse_number(cells[col], line, table.header[col]) != value) keep = false;
    if (!keep) continue;

    FingerprintRecord rec;
    rec.rssi.reserve(ap_cols.size());
    for (std::size_t k = 0; k < ap_cols.size(); ++k) {
      const double v = csv::parse_number(cells[ap_cols[k]], line, ap_names[k]);
      if (!is_legal_value(v, domain))
        throw ParseError(line, "column '" + ap_names[k] + "': value " + cells[ap_cols[k]] +
                                   " is outside the legal " + std::string(to_string(domain)) +
                                   " range");
      rec.rssi.push_back(v);
    }

    const bool x_empty = cells[x_col].empty();
    const bool y_empty = cells[y_col].empty();
    const bool rp_empty = rp_col ? cells[*rp_col].empty() : x_empty;
    if (x_empty && y_empty && rp_empty) {
      if (!schema.allow_unlabeled) throw ParseError(line, "missing location");
      coords.push_back(std::nullopt);
      rp_ids.push_back(std::nullopt);
    } else {
      if (x_empty || y_empty || rp_empty) throw ParseError(line, "partially specified location");
      coords.push_back(Point{csv::parse_number(cells[x_col], line, schema.x_column),
                             csv::parse_number(cells[y_col], line, schema.y_column)});
      rp_ids.push_back(rp_col ? std::optional<int>(parse_rp_id(cells[*rp_col], line,
                                                               *schema.rp_id_column))
                              : std::nullopt);
    }
    records.push_back(std::move(rec));
  }

  if (rp_col) {
    for (std::size_t r = 0; r < records.size(); ++r)
      if (coords[r]) records[r].location = RpLocation{*rp_ids[r], coords[r]->x, coords[r]->y};
  } else {
    auto locs = assign_rp_ids_from_coordinates(coords);
    for (std::size_t r = 0; r < records.size(); ++r) records[r].location = locs[r];
  }
  return FingerprintDatabase(make_schema(ap_names), std::move(records), domain, kind);
}

FingerprintDatabase parse_split_csv(std::istream& rss, std::istream& coords_in,
                                    std::optional<int> floor) {
  const csv::Table values = csv::read_rows(rss);
  const csv::Table coords = csv::read_rows(coords_in);
  if (values.rows.size() != coords.rows.size())
    throw ParseError(0, "RSS file has " + std::to_string(values.rows.size()) +
                            " rows but coordinate file has " + std::to_string(coords.rows.size()));
  if (!coords.rows.empty() && coords.rows.front().size() < (floor ? 3u : 2u))
    throw ParseError(coords.line_numbers.front(), "coordinate rows need x, y and floor columns");
  const std::size_t n_aps = values.rows.empty() ? 0 : values.rows.front().size();
  auto schema = numbered_schema(n_aps);

  std::vector<FingerprintRecord> records;
  std::vector<std::optional<Point>> points;
  for (std::size_t r = 0; r < values.rows.size(); ++r) {
    const auto& c = coords.rows[r];
    const std::size_t cline = coords.line_numbers[r];
    if (floor && csv::parse_number(c[2], cline, "floor") != *floor) continue;
    FingerprintRecord rec;
    rec.rssi.reserve(n_aps);
    const std::size_t line = values.line_numbers[r];
    for (std::size_t k = 0; k < n_aps; ++k) {
      const double v = csv::parse_number(values.rows[r][k], line, schema[k].name);
      if (!is_legal_value(v, Domain::raw))
        throw ParseError(line, "column '" + schema[k].name + "': value " + values.rows[r][k] +
                                   " is outside the legal raw range");
      rec.rssi.push_back(v);
    }
    points.push_back(Point{csv::parse_number(c[0], cline, "x"), csv::parse_number(c[1], cline, "y")});
    records.push_back(std::move(rec));
  }
  auto locs = assign_rp_ids_from_coordinates(points);
  for (std::size_t r = 0; r < records.size(); ++r) records[r].location = locs[r];
  return FingerprintDatabase(std::move(schema), std::move(records), Domain::raw,
                             DbKind::raw_survey);
}

void write_fingerprint_csv(std::ostream& out, const FingerprintDatabase& db) {
  std::string buf = "rp_id,x,y";
  for (const auto& ap : db.schema()) {
    buf += ',';
    buf += ap.name;
  }
  buf += '\n';
  out << buf;
  for (const auto& rec : db.records()) {
    buf.clear();
    if (rec.location) {
      buf += std::to_string(rec.location->rp_id);
      buf += ',';
      buf += csv::format_number(rec.location->x);
      buf += ',';
      buf += csv::format_number(rec.location->y);
    } else {
      buf += ",,";
    }
    for (double v : rec.rssi) {
      buf += ',';
      buf += csv::format_number(v);
    }
    buf += '\n';
    out << buf;
  }
}

void SyntheticWorldConfig::validate() const {
  if (n_rps < 1 || n_aps < 1 || samples_per_rp < 1)
    throw ConfigError("synthetic world counts must be at least 1");
  if (!(width_m > 0.0) || !(height_m > 0.0)) throw ConfigError("world area must be positive");
  if (!(path_loss_exponent > 0.0)) throw ConfigError("path_loss_exponent must be > 0");
  if (!(shadowing_sigma_db >= 0.0)) throw ConfigError("shadowing_sigma_db must be >= 0");
  if (!std::isfinite(tx_power_dbm)) throw ConfigError("tx_power_dbm must be finite");
}

double path_loss_rssi(double tx_power_dbm, double exponent, double distance_m) {
  const double d = std::max(distance_m, kMinDistanceM);
  return tx_power_dbm - 10.0 * exponent * std::log10(d);
}

double quantize_raw(double dbm) {
  if (dbm < kRawMin) return kNoSignal;
  return std::min(dbm, kRawMax);
}

SyntheticWorld generate_world(const SyntheticWorldConfig& config) {
  config.validate();
  WorldGroundTruth truth;
  truth.shadowing_sigma_db = config.shadowing_sigma_db;
  truth.schema = numbered_schema(config.n_aps);

  const auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(config.n_rps))));
  const std::size_t rows = (config.n_rps + cols - 1) / cols;
  const double dx = config.width_m / static_cast<double>(cols);
  const double dy = config.height_m / static_cast<double>(rows);
  for (std::size_t k = 0; k < config.n_rps; ++k) {
    const std::size_t r = k / cols, c = k % cols;
    truth.rp_locations.push_back(RpLocation{static_cast<int>(k + 1),
                                            (static_cast<double>(c) + 0.5) * dx,
                                            (static_cast<double>(r) + 0.5) * dy});
  }

  Rng ap_rng(derive_seed(config.rng_seed, "ap-positions"));
  for (std::size_t a = 0; a < config.n_aps; ++a) {
    const double x = ap_rng.uniform(0.0, config.width_m);
    const double y = ap_rng.uniform(0.0, config.height_m);
    truth.ap_positions.push_back({x, y});
  }

  truth.noiseless_rssi.assign(config.n_rps, std::vector<double>(config.n_aps));
  for (std::size_t k = 0; k < config.n_rps; ++k) {
    for (std::size_t a = 0; a < config.n_aps; ++a) {
      const double d = std::hypot(truth.rp_locations[k].x - truth.ap_positions[a].x,
                                  truth.rp_locations[k].y - truth.ap_positions[a].y);
      truth.noiseless_rssi[k][a] =
          path_loss_rssi(config.tx_power_dbm, config.path_loss_exponent, d);
    }
  }

  Rng noise(derive_seed(config.rng_seed, "survey-shadowing"));
  std::vector<FingerprintRecord> records;
  records.reserve(config.n_rps * config.samples_per_rp);
  for (std::size_t k = 0; k < config.n_rps; ++k) {
    for (std::size_t s = 0; s < config.samples_per_rp; ++s) {
      FingerprintRecord rec;
      rec.rssi.reserve(config.n_aps);
      for (std::size_t a = 0; a < config.n_aps; ++a) {
        double v = truth.noiseless_rssi[k][a];
        if (config.shadowing_sigma_db > 0.0) v += noise.normal(0.0, config.shadowing_sigma_db);
        rec.rssi.push_back(quantize_raw(v));
      }
      rec.location = truth.rp_locations[k];
      records.push_back(std::move(rec));
    }
  }
  FingerprintDatabase survey(truth.schema, std::move(records), Domain::raw, DbKind::raw_survey);
  return SyntheticWorld{std::move(survey), std::move(truth)};
}

std::vector<OnlineQuery> sample_online_queries(const WorldGroundTruth& truth, std::size_t n,
                                               std::uint64_t seed, QueryDrift drift) {
  if (n == 0) throw Error("sample_online_queries: n must be at least 1");
  if (truth.rp_locations.empty()) throw Error("sample_online_queries: world has no RPs");
  Rng rng(seed);
  const double sigma = std::sqrt(truth.shadowing_sigma_db * truth.shadowing_sigma_db +
                                 drift.extra_sigma_db * drift.extra_sigma_db);
  std::vector<OnlineQuery> out;
  out.reserve(n);
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t k = rng.below(truth.rp_locations.size());
    OnlineQuery query;
    query.truth = truth.rp_locations[k];
    const auto& row = truth.noiseless_rssi[k];
    query.record.rssi.reserve(row.size());
    for (double mean : row) {
      double v = mean + drift.bias_db;
      if (sigma > 0.0) v += rng.normal(0.0, sigma);
      query.record.rssi.push_back(quantize_raw(v));
    }
    out.push_back(std::move(query));
  }
  return out;
}

FingerprintDatabase queries_as_database(const WorldGroundTruth& truth,
                                        const std::vector<OnlineQuery>& queries) {
  std::vector<FingerprintRecord> records;
  records.reserve(queries.size());
  for (const auto& q : queries) records.push_back(FingerprintRecord{q.record.rssi, q.truth});
  return FingerprintDatabase(truth.schema, std::move(records), Domain::raw, DbKind::raw_survey);
}

}  // namespace apguard
