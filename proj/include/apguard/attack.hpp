#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "apguard/core.hpp"

namespace apguard {

// CV: constant no-signal value. RV: random value. ARCO: actual + fixed
// offset. ARRO: actual + random offset.
enum class AttackKind { CV, RV, ARCO, ARRO };

inline constexpr AttackKind kAllAttackKinds[] = {AttackKind::CV, AttackKind::RV, AttackKind::ARCO,
                                                 AttackKind::ARRO};

std::string_view to_string(AttackKind kind);
// Case-insensitive; throws ConfigError on an unknown name.
AttackKind parse_attack_kind(std::string_view name);

struct AttackPlan {
  AttackKind kind = AttackKind::CV;
  std::vector<ApId> malicious_aps;
  // ARCO only, keyed by AP name; APs without an entry get an offset drawn
  // uniformly from [-100, 0] dB.
  std::map<std::string, double> arco_offsets;
  std::uint64_t rng_seed = 0;
};

// floor(fraction * |schema|) distinct APs, uniformly chosen, sorted by index.
std::vector<ApId> choose_malicious_aps(std::span<const ApId> schema, double fraction,
                                       std::uint64_t seed);

// Offsets actually used by an ARCO plan, including drawn ones.
std::map<std::string, double> resolve_arco_offsets(const AttackPlan& plan);

// Corrupts the malicious columns of raw-domain records; every other value is
// copied bit for bit. ARCO/ARRO leave no-signal entries alone and clamp at
// -100 dBm.
FingerprintDatabase apply_attack(const FingerprintDatabase& queries, const AttackPlan& plan);

}  // namespace apguard
