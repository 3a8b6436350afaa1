#include "apguard/knn.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace apguard {

int knn_oracle(const FingerprintDatabase& train, std::span<const double> query, std::size_t k) {
  if (train.empty()) throw Error("knn_oracle: empty training database");
  if (k < 1 || k > train.size())
    throw Error("knn_oracle: k must be in [1, " + std::to_string(train.size()) + "]");
  if (query.size() != train.ap_count())
    throw SchemaError("knn_oracle: query has " + std::to_string(query.size()) +
                      " values, database has " + std::to_string(train.ap_count()) + " APs");
  const auto labels = rp_labels(train);

  std::vector<double> dist(train.size());
  for (std::size_t r = 0; r < train.size(); ++r) {
    const auto& rssi = train.records()[r].rssi;
    double d = 0.0;
    for (std::size_t i = 0; i < rssi.size(); ++i) d += (rssi[i] - query[i]) * (rssi[i] - query[i]);
    dist[r] = d;
  }
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

  std::map<int, std::size_t> votes;
  for (std::size_t i = 0; i < k; ++i) ++votes[labels[order[i]]];
  int best = votes.begin()->first;
  std::size_t best_votes = 0;
  for (const auto& [label, n] : votes) {
    if (n > best_votes) {
      best = label;
      best_votes = n;
    }
  }
  return best;
}

}  // namespace apguard
