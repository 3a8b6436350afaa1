#pragma once

#include <span>

#include "apguard/core.hpp"

namespace apguard {

// Majority rp_id among the k records nearest to `query` (Euclidean distance,
// ties in distance broken by record order); label ties go to the lowest rp_id.
int knn_oracle(const FingerprintDatabase& train, std::span<const double> query, std::size_t k);

}  // namespace apguard
