#include "apguard/attack.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "apguard/rng.hpp"

namespace apguard {

std::string_view to_string(AttackKind kind) {
  switch (kind) {
    case AttackKind::CV: return "CV";
    case AttackKind::RV: return "RV";
    case AttackKind::ARCO: return "ARCO";
    case AttackKind::ARRO: return "ARRO";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto kind : kAllAttackKinds)
    if (to_string(kind) == upper) return kind;
  throw ConfigError("unknown attack kind '" + std::string(name) + "' (expected CV, RV, ARCO or ARRO)");
}

std::vector<ApId> choose_malicious_aps(std::span<const ApId> schema, double fraction,
                                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ConfigError("malicious fraction must be in (0, 1]");
  const auto count = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(schema.size()) + 1e-9));
  if (count == 0)
    throw ConfigError("malicious fraction " + std::to_string(fraction) + " of " +
                      std::to_string(schema.size()) + " APs selects no AP");
  std::vector<ApId> pool(schema.begin(), schema.end());
  Rng rng(seed);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(rng.below(pool.size() - k));
    std::swap(pool[k], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end(),
            [](const ApId& a, const ApId& b) { return a.index < b.index; });
  return pool;
}

std::map<std::string, double> resolve_arco_offsets(const AttackPlan& plan) {
  std::map<std::string, double> out;
  if (plan.kind != AttackKind::ARCO) return out;
  Rng rng(derive_seed(plan.rng_seed, "arco-offsets"));
  for (const auto& ap : plan.malicious_aps) {
    const double drawn = rng.uniform(kRawMin, kRawMax);
    auto it = plan.arco_offsets.find(ap.name);
    const double offset = it != plan.arco_offsets.end() ? it->second : drawn;
    if (!(offset >= kRawMin && offset <= kRawMax))
      throw ConfigError("ARCO offset for '" + ap.name + "' must be in [-100, 0]");
    out[ap.name] = offset;
  }
  return out;
}

FingerprintDatabase apply_attack(const FingerprintDatabase& queries, const AttackPlan& plan) {
  if (queries.domain() != Domain::raw) throw DomainError("apply_attack expects raw-domain records");
  std::vector<std::size_t> cols;
  cols.reserve(plan.malicious_aps.size());
  for (const auto& ap : plan.malicious_aps) cols.push_back(queries.position_of(ap));
  const auto offsets = resolve_arco_offsets(plan);

  std::vector<FingerprintRecord> out = queries.records();
  for (std::size_t r = 0; r < out.size(); ++r) {
    Rng rng(derive_seed(plan.rng_seed, "attack-record", r));
    auto& rssi = out[r].rssi;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      double& v = rssi[cols[k]];
      switch (plan.kind) {
        case AttackKind::CV:
          v = kNoSignal;
          break;
        case AttackKind::RV:
          v = rng.uniform(kRawMin, kRawMax);
          break;
        case AttackKind::ARCO:
          if (v != kNoSignal) v = std::max(v + offsets.at(plan.malicious_aps[k].name), kRawMin);
          break;
        case AttackKind::ARRO: {
          const double offset = rng.uniform(kRawMin, kRawMax);
          if (v != kNoSignal) v = std::max(v + offset, kRawMin);
          break;
        }
      }
    }
  }
  return FingerprintDatabase(queries.schema(), std::move(out), Domain::raw, queries.kind());
}

}  // namespace apguard
