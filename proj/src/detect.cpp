#include "apguard/detect.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "apguard/csv.hpp"

namespace apguard {

void DetectorConfig::validate() const {
  if (!(th1_variance > 0.0)) throw ConfigError("th1_variance must be > 0");
  if (!(th2_mean_diff > 0.0)) throw ConfigError("th2_mean_diff must be > 0");
  if (min_group_size < 1) throw ConfigError("min_group_size must be >= 1");
}

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_variance(const std::vector<double>& v) {
  const double mu = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

void require_normalized_labeled(const FingerprintDatabase& db, const char* what) {
  if (db.domain() != Domain::normalized)
    throw DomainError(std::string(what) + " database must be normalized");
  if (!db.fully_labeled())
    throw MalformedDatabaseError(std::string(what) + " database has unlabeled records");
}

}  // namespace

RpStatistics rp_variances(const FingerprintDatabase& online, const DetectorConfig& config) {
  config.validate();
  require_normalized_labeled(online, "online");
  RpStatistics out;
  out.values.assign(online.ap_count(), {});
  for (const auto& group : group_by_rp(online)) {
    if (group.size() < config.min_group_size) continue;
    out.rp_ids.push_back(group.rp_id);
    for (std::size_t i = 0; i < online.ap_count(); ++i)
      out.values[i].push_back(population_variance(group.values[i]));
  }
  return out;
}

RpStatistics rp_mean_differences(const FingerprintDatabase& offline,
                                 const FingerprintDatabase& online, const DetectorConfig& config) {
  config.validate();
  require_normalized_labeled(offline, "offline");
  require_normalized_labeled(online, "online");
  if (offline.ap_names() != online.ap_names())
    throw SchemaError("offline and online databases have different AP schemas");
  std::map<int, RpGroupView> offline_groups;
  for (auto& g : group_by_rp(offline)) offline_groups.emplace(g.rp_id, std::move(g));

  RpStatistics out;
  out.values.assign(online.ap_count(), {});
  for (const auto& on : group_by_rp(online)) {
    auto it = offline_groups.find(on.rp_id);
    if (it == offline_groups.end()) continue;
    const auto& off = it->second;
    if (on.size() < config.min_group_size || off.size() < config.min_group_size) continue;
    out.rp_ids.push_back(on.rp_id);
    for (std::size_t i = 0; i < online.ap_count(); ++i)
      out.values[i].push_back(mean_of(off.values[i]) - mean_of(on.values[i]));
  }
  return out;
}

VarianceTestResult variance_test(const FingerprintDatabase& online, const DetectorConfig& config) {
  const auto stats = rp_variances(online, config);
  if (stats.rp_ids.empty())
    throw InsufficientDataError("variance test: no RP group has at least " +
                                std::to_string(config.min_group_size) + " online samples");
  VarianceTestResult out;
  for (const auto& per_rp : stats.values) {
    const double m = *std::max_element(per_rp.begin(), per_rp.end());
    out.max_variance.push_back(m);
    out.flagged.push_back(m >= config.th1_variance);
  }
  return out;
}

MeanDifferenceTestResult mean_difference_test(const FingerprintDatabase& offline,
                                              const FingerprintDatabase& online,
                                              const DetectorConfig& config) {
  const auto stats = rp_mean_differences(offline, online, config);
  if (stats.rp_ids.empty())
    throw InsufficientDataError("mean difference test: no RP is shared with at least " +
                                std::to_string(config.min_group_size) + " samples on both sides");
  MeanDifferenceTestResult out;
  for (const auto& per_rp : stats.values) {
    const double m = *std::min_element(per_rp.begin(), per_rp.end());
    out.min_mean_diff.push_back(m);
    out.flagged.push_back(m > config.th2_mean_diff);
  }
  return out;
}

std::vector<ApVerdict> detect_malicious_aps(const FingerprintDatabase& offline,
                                            const FingerprintDatabase& online,
                                            const DetectorConfig& config) {
  if (offline.ap_names() != online.ap_names())
    throw SchemaError("offline and online databases have different AP schemas");
  std::optional<VarianceTestResult> var;
  std::optional<MeanDifferenceTestResult> mean;
  std::optional<InsufficientDataError> var_error;
  try {
    var = variance_test(online, config);
  } catch (const InsufficientDataError& e) {
    var_error = e;
  }
  try {
    mean = mean_difference_test(offline, online, config);
  } catch (const InsufficientDataError& e) {
    if (var_error)
      throw InsufficientDataError(std::string(var_error->what()) + "; " + e.what());
  }

  std::vector<ApVerdict> verdicts;
  verdicts.reserve(online.ap_count());
  for (std::size_t i = 0; i < online.ap_count(); ++i) {
    ApVerdict v;
    v.ap = online.schema()[i];
    if (var) {
      v.max_variance = var->max_variance[i];
      v.flagged_by_variance = var->flagged[i];
    }
    if (mean) {
      v.min_mean_diff = mean->min_mean_diff[i];
      v.flagged_by_mean = mean->flagged[i];
    }
    v.malicious = v.flagged_by_variance || v.flagged_by_mean;
    verdicts.push_back(std::move(v));
  }
  return verdicts;
}

std::vector<ApId> malicious_aps(const std::vector<ApVerdict>& verdicts) {
  std::vector<ApId> out;
  for (const auto& v : verdicts)
    if (v.malicious) out.push_back(v.ap);
  return out;
}

void write_verdicts_csv(std::ostream& out, const std::vector<ApVerdict>& verdicts) {
  out << "ap,name,max_variance,min_mean_diff,flag_var,flag_mean,malicious\n";
  for (const auto& v : verdicts) {
    out << v.ap.index << ',' << v.ap.name << ','
        << (v.max_variance ? csv::format_number(*v.max_variance) : "") << ','
        << (v.min_mean_diff ? csv::format_number(*v.min_mean_diff) : "") << ','
        << (v.flagged_by_variance ? 1 : 0) << ',' << (v.flagged_by_mean ? 1 : 0) << ','
        << (v.malicious ? 1 : 0) << '\n';
  }
}

std::vector<ApVerdict> read_verdicts_csv(std::istream& in) {
  const auto table = csv::read_table(in);
  const char* names[] = {"ap", "name", "max_variance", "min_mean_diff", "flag_var", "flag_mean",
                         "malicious"};
  std::size_t col[7];
  for (std::size_t k = 0; k < 7; ++k) {
    auto idx = table.column_index(names[k]);
    if (!idx) throw ParseError(1, std::string("missing column '") + names[k] + "'");
    col[k] = *idx;
  }
  auto flag = [&](const std::string& cell, std::size_t line, const char* name) {
    if (cell == "0") return false;
    if (cell == "1") return true;
    throw ParseError(line, std::string("column '") + name + "' must be 0 or 1");
  };
  std::vector<ApVerdict> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& c = table.rows[r];
    const auto line = table.line_numbers[r];
    ApVerdict v;
    v.ap.index = static_cast<std::size_t>(csv::parse_number(c[col[0]], line, "ap"));
    v.ap.name = c[col[1]];
    if (!c[col[2]].empty()) v.max_variance = csv::parse_number(c[col[2]], line, "max_variance");
    if (!c[col[3]].empty()) v.min_mean_diff = csv::parse_number(c[col[3]], line, "min_mean_diff");
    v.flagged_by_variance = flag(c[col[4]], line, "flag_var");
    v.flagged_by_mean = flag(c[col[5]], line, "flag_mean");
    v.malicious = flag(c[col[6]], line, "malicious");
    if (v.malicious != (v.flagged_by_variance || v.flagged_by_mean))
      throw ParseError(line, "malicious must equal flag_var OR flag_mean");
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace apguard
