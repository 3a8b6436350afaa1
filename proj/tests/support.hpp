#pragma once

// Builders, random generators and brute-force oracles shared by the tests.
// The oracles are deliberately naive and independent of the library code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "apguard/core.hpp"
#include "apguard/rng.hpp"

namespace testsupport {

using apguard::DbKind;
using apguard::Domain;
using apguard::FingerprintDatabase;
using apguard::FingerprintRecord;
using apguard::RpLocation;

inline RpLocation rp(int id) { return RpLocation{id, static_cast<double>(id), 0.0}; }

// One record per row; labels[i] == 0 means unlabeled.
inline FingerprintDatabase make_db(const std::vector<std::vector<double>>& rows,
                                   const std::vector<int>& labels, Domain domain, DbKind kind) {
  const std::size_t n_aps = rows.empty() ? 1 : rows.front().size();
  std::vector<FingerprintRecord> records;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    FingerprintRecord r;
    r.rssi = rows[i];
    if (labels[i] != 0) r.location = rp(labels[i]);
    records.push_back(std::move(r));
  }
  return FingerprintDatabase(apguard::numbered_schema(n_aps), std::move(records), domain, kind);
}

// Random normalized database: values drawn from {0} U [0.25, 1] with a small
// set of repeated levels so ties occur.
inline FingerprintDatabase random_normalized_db(apguard::Rng& rng, std::size_t n_aps,
                                                std::size_t n_rps, std::size_t max_per_rp,
                                                DbKind kind) {
  std::vector<FingerprintRecord> records;
  for (std::size_t r = 1; r <= n_rps; ++r) {
    const std::size_t count = 1 + rng.below(max_per_rp);
    for (std::size_t k = 0; k < count; ++k) {
      FingerprintRecord rec;
      for (std::size_t a = 0; a < n_aps; ++a) {
        const auto pick = rng.below(10);
        if (pick == 0) rec.rssi.push_back(0.0);
        else if (pick < 3) rec.rssi.push_back(0.25 + 0.05 * static_cast<double>(rng.below(16)));
        else rec.rssi.push_back(rng.uniform(0.25, 1.0));
      }
      rec.location = RpLocation{static_cast<int>(r), static_cast<double>(r), 1.0};
      records.push_back(std::move(rec));
    }
  }
  // Shuffle so groups are interleaved.
  for (std::size_t i = records.size(); i > 1; --i) std::swap(records[i - 1], records[rng.below(i)]);
  return FingerprintDatabase(apguard::numbered_schema(n_aps), std::move(records), Domain::normalized, kind);
}

inline std::vector<double> random_tied_vector(apguard::Rng& rng, std::size_t n) {
  std::vector<double> v;
  const std::size_t levels = 1 + rng.below(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(static_cast<double>(rng.below(levels)) - 3.0);
  return v;
}

// Spearman by direct O(n^2) rank counting: rank = #less + (#equal + 1) / 2,
// then Pearson correlation of the ranks.
inline double srcc_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
      double less = 0, equal = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (v[j] < v[i]) less += 1;
        else if (v[j] == v[i]) equal += 1;
      }
      r[i] = less + (equal + 1.0) / 2.0;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Values of AP `ap` over records labeled `rp_id`, in record order.
inline std::vector<double> values_at(const FingerprintDatabase& db, std::size_t ap, int rp_id) {
  std::vector<double> out;
  for (const auto& rec : db.records())
    if (rec.location && rec.location->rp_id == rp_id) out.push_back(rec.rssi[ap]);
  return out;
}

inline std::vector<int> distinct_rps(const FingerprintDatabase& db) {
  std::vector<int> out;
  for (const auto& rec : db.records())
    if (rec.location && std::find(out.begin(), out.end(), rec.location->rp_id) == out.end())
      out.push_back(rec.location->rp_id);
  std::sort(out.begin(), out.end());
  return out;
}

inline double naive_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double naive_variance(const std::vector<double>& v) {
  const double m = naive_mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

// max over qualifying RPs of the population variance of one AP.
inline std::optional<double> oracle_max_variance(const FingerprintDatabase& online, std::size_t ap,
                                                 std::size_t min_group) {
  std::optional<double> best;
  for (int r : distinct_rps(online)) {
    const auto v = values_at(online, ap, r);
    if (v.size() < min_group) continue;
    const double var = naive_variance(v);
    if (!best || var > *best) best = var;
  }
  return best;
}

inline std::optional<double> oracle_min_mean_diff(const FingerprintDatabase& offline,
                                                  const FingerprintDatabase& online, std::size_t ap,
                                                  std::size_t min_group) {
  std::optional<double> best;
  for (int r : distinct_rps(online)) {
    const auto on = values_at(online, ap, r);
    const auto off = values_at(offline, ap, r);
    if (on.size() < min_group || off.size() < min_group) continue;
    const double d = naive_mean(off) - naive_mean(on);
    if (!best || d < *best) best = d;
  }
  return best;
}

}  // namespace testsupport
