#include "apguard/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "apguard/csv.hpp"

namespace apguard::cli {

namespace pt = boost::property_tree;

std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::detection: return "detection";
    case Protocol::cdf: return "cdf";
    case Protocol::both: return "both";
  }
  return "?";
}

void RunConfig::validate() const {
  pipeline.validate();
  if (data.source == DataSource::csv && (data.survey_csv.empty() || data.queries_csv.empty()))
    throw ConfigError("data.source = csv needs survey_csv and queries_csv");
  if (!(attack.fraction > 0.0 && attack.fraction <= 1.0))
    throw ConfigError("attack.fraction must be in (0, 1]");
  for (const auto& [name, offset] : attack.arco_offsets)
    if (!(offset >= -100.0 && offset <= 0.0))
      throw ConfigError("arco offset for " + name + " must be in [-100, 0]");
  if (experiment.kinds.empty()) throw ConfigError("experiment.kinds is empty");
  if (experiment.fractions.empty()) throw ConfigError("experiment.fractions is empty");
  for (double f : experiment.fractions)
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("experiment fractions must be in (0, 1]");
  if (experiment.trials < 1) throw ConfigError("experiment.trials must be >= 1");
  if (!(experiment.cdf_fraction > 0.0 && experiment.cdf_fraction <= 1.0))
    throw ConfigError("experiment.cdf_fraction must be in (0, 1]");
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"seed", "out"}},
      {"data", {"source", "survey_csv", "queries_csv"}},
      {"world",
       {"n_rps", "n_aps", "width_m", "height_m", "samples_per_rp", "tx_power_dbm",
        "path_loss_exponent", "shadowing_sigma_db", "n_queries"}},
      {"preprocess", {"srcc_threshold", "augment", "noise_fraction", "noise_sigma", "noise_domain"}},
      {"detector", {"th1_variance", "th2_mean_diff", "min_group_size"}},
      {"model",
       {"n_trees", "learning_rate", "max_leaves", "min_samples_per_leaf", "max_bins", "l2_reg",
        "subsample"}},
      {"attack", {"kind", "fraction", "malicious", "arco_offsets", "trial"}},
      {"experiment", {"protocol", "kinds", "fractions", "trials", "cdf_fraction", "external_baseline"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::filesystem::path base) : tree_(tree), base_(std::move(base)) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void real(const std::string& s, const std::string& k, double& out) const {
    if (auto v = raw(s, k)) {
      auto d = csv::try_parse_number(*v);
      if (!d) throw ConfigError(s + "." + k + ": not a number: '" + *v + "'");
      out = *d;
    }
  }

  template <class T>
  void count(const std::string& s, const std::string& k, T& out) const {
    if (auto v = raw(s, k)) {
      T parsed{};
      auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
      if (ec != std::errc() || p != v->data() + v->size() || v->empty())
        throw ConfigError(s + "." + k + ": not a non-negative integer: '" + *v + "'");
      out = parsed;
    }
  }

  void flag(const std::string& s, const std::string& k, bool& out) const {
    if (auto v = raw(s, k)) {
      if (*v == "true" || *v == "1") out = true;
      else if (*v == "false" || *v == "0") out = false;
      else throw ConfigError(s + "." + k + ": expected true or false, got '" + *v + "'");
    }
  }

  void path(const std::string& s, const std::string& k, std::filesystem::path& out) const {
    if (auto v = raw(s, k)) {
      std::filesystem::path p(*v);
      out = (p.is_relative() && !base_.empty()) ? base_ / p : p;
    }
  }

 private:
  const pt::ptree& tree_;
  std::filesystem::path base_;
};

void check_keys(const pt::ptree& tree) {
  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    auto it = known.find(section);
    if (it == known.end()) {
      if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside any section");
      throw ConfigError("unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : body)
      if (!it->second.contains(key))
        throw ConfigError("unknown config key '" + key + "' in [" + section + "]");
  }
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }
  check_keys(tree);
  const Reader r(tree, base_dir);
  RunConfig c;

  r.count("run", "seed", c.pipeline.master_seed);
  if (auto v = r.raw("run", "out")) {
    std::filesystem::path p;
    r.path("run", "out", p);
    c.out = p;
  }

  if (auto v = r.raw("data", "source")) {
    if (*v == "synthetic") c.data.source = DataSource::synthetic;
    else if (*v == "csv") c.data.source = DataSource::csv;
    else throw ConfigError("data.source must be synthetic or csv, got '" + *v + "'");
  }
  r.path("data", "survey_csv", c.data.survey_csv);
  r.path("data", "queries_csv", c.data.queries_csv);

  auto& w = c.pipeline.world;
  r.count("world", "n_rps", w.n_rps);
  r.count("world", "n_aps", w.n_aps);
  r.real("world", "width_m", w.width_m);
  r.real("world", "height_m", w.height_m);
  r.count("world", "samples_per_rp", w.samples_per_rp);
  r.real("world", "tx_power_dbm", w.tx_power_dbm);
  r.real("world", "path_loss_exponent", w.path_loss_exponent);
  r.real("world", "shadowing_sigma_db", w.shadowing_sigma_db);
  r.count("world", "n_queries", c.pipeline.n_queries);

  r.real("preprocess", "srcc_threshold", c.pipeline.srcc_threshold);
  r.flag("preprocess", "augment", c.pipeline.augment);
  r.real("preprocess", "noise_fraction", c.pipeline.noise.fraction_per_rp);
  r.real("preprocess", "noise_sigma", c.pipeline.noise.sigma);
  if (auto v = r.raw("preprocess", "noise_domain")) {
    if (*v == "raw_db") c.pipeline.noise.domain = NoiseDomain::raw_db;
    else if (*v == "normalized") c.pipeline.noise.domain = NoiseDomain::normalized;
    else throw ConfigError("preprocess.noise_domain must be raw_db or normalized");
  }

  r.real("detector", "th1_variance", c.pipeline.detector.th1_variance);
  r.real("detector", "th2_mean_diff", c.pipeline.detector.th2_mean_diff);
  r.count("detector", "min_group_size", c.pipeline.detector.min_group_size);

  auto& m = c.pipeline.model;
  r.count("model", "n_trees", m.n_trees);
  r.real("model", "learning_rate", m.learning_rate);
  r.count("model", "max_leaves", m.max_leaves);
  r.count("model", "min_samples_per_leaf", m.min_samples_per_leaf);
  r.count("model", "max_bins", m.max_bins);
  r.real("model", "l2_reg", m.l2_reg);
  r.real("model", "subsample", m.subsample);

  if (auto v = r.raw("attack", "kind")) c.attack.kind = parse_attack_kind(*v);
  r.real("attack", "fraction", c.attack.fraction);
  if (auto v = r.raw("attack", "malicious")) c.attack.malicious = split_list(*v);
  if (auto v = r.raw("attack", "arco_offsets")) {
    for (const auto& item : split_list(*v)) {
      const auto colon = item.find(':');
      if (colon == std::string::npos)
        throw ConfigError("attack.arco_offsets entries look like AP001:-20, got '" + item + "'");
      auto offset = csv::try_parse_number(trim(item.substr(colon + 1)));
      if (!offset) throw ConfigError("attack.arco_offsets: bad offset in '" + item + "'");
      c.attack.arco_offsets[trim(item.substr(0, colon))] = *offset;
    }
  }
  r.count("attack", "trial", c.attack.trial);

  if (auto v = r.raw("experiment", "protocol")) {
    if (*v == "detection") c.experiment.protocol = Protocol::detection;
    else if (*v == "cdf") c.experiment.protocol = Protocol::cdf;
    else if (*v == "both") c.experiment.protocol = Protocol::both;
    else throw ConfigError("experiment.protocol must be detection, cdf or both");
  }
  if (auto v = r.raw("experiment", "kinds")) {
    c.experiment.kinds.clear();
    for (const auto& k : split_list(*v)) c.experiment.kinds.push_back(parse_attack_kind(k));
  }
  if (auto v = r.raw("experiment", "fractions")) {
    c.experiment.fractions.clear();
    for (const auto& f : split_list(*v)) {
      auto d = csv::try_parse_number(f);
      if (!d) throw ConfigError("experiment.fractions: not a number: '" + f + "'");
      c.experiment.fractions.push_back(*d);
    }
  }
  r.count("experiment", "trials", c.experiment.trials);
  r.real("experiment", "cdf_fraction", c.experiment.cdf_fraction);
  if (r.raw("experiment", "external_baseline")) {
    std::filesystem::path p;
    r.path("experiment", "external_baseline", p);
    c.experiment.external_baseline = p;
  }

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

std::string render_config(const RunConfig& c) {
  using csv::format_number;
  std::ostringstream o;
  const auto& p = c.pipeline;
  o << "[run]\nseed = " << p.master_seed << "\n";
  if (c.out) o << "out = " << c.out->string() << "\n";
  o << "\n[data]\nsource = " << (c.data.source == DataSource::csv ? "csv" : "synthetic") << "\n";
  if (!c.data.survey_csv.empty()) o << "survey_csv = " << c.data.survey_csv.string() << "\n";
  if (!c.data.queries_csv.empty()) o << "queries_csv = " << c.data.queries_csv.string() << "\n";
  const auto& w = p.world;
  o << "\n[world]\nn_rps = " << w.n_rps << "\nn_aps = " << w.n_aps
    << "\nwidth_m = " << format_number(w.width_m) << "\nheight_m = " << format_number(w.height_m)
    << "\nsamples_per_rp = " << w.samples_per_rp
    << "\ntx_power_dbm = " << format_number(w.tx_power_dbm)
    << "\npath_loss_exponent = " << format_number(w.path_loss_exponent)
    << "\nshadowing_sigma_db = " << format_number(w.shadowing_sigma_db)
    << "\nn_queries = " << p.n_queries << "\n";
  o << "\n[preprocess]\nsrcc_threshold = " << format_number(p.srcc_threshold)
    << "\naugment = " << (p.augment ? "true" : "false")
    << "\nnoise_fraction = " << format_number(p.noise.fraction_per_rp)
    << "\nnoise_sigma = " << format_number(p.noise.sigma)
    << "\nnoise_domain = " << (p.noise.domain == NoiseDomain::raw_db ? "raw_db" : "normalized") << "\n";
  o << "\n[detector]\nth1_variance = " << format_number(p.detector.th1_variance)
    << "\nth2_mean_diff = " << format_number(p.detector.th2_mean_diff)
    << "\nmin_group_size = " << p.detector.min_group_size << "\n";
  const auto& m = p.model;
  o << "\n[model]\nn_trees = " << m.n_trees << "\nlearning_rate = " << format_number(m.learning_rate)
    << "\nmax_leaves = " << m.max_leaves << "\nmin_samples_per_leaf = " << m.min_samples_per_leaf
    << "\nmax_bins = " << m.max_bins << "\nl2_reg = " << format_number(m.l2_reg)
    << "\nsubsample = " << format_number(m.subsample) << "\n";
  o << "\n[attack]\nkind = " << to_string(c.attack.kind)
    << "\nfraction = " << format_number(c.attack.fraction) << "\ntrial = " << c.attack.trial << "\n";
  if (!c.attack.malicious.empty()) {
    o << "malicious = ";
    for (std::size_t i = 0; i < c.attack.malicious.size(); ++i)
      o << (i ? "," : "") << c.attack.malicious[i];
    o << "\n";
  }
  if (!c.attack.arco_offsets.empty()) {
    o << "arco_offsets = ";
    bool first = true;
    for (const auto& [name, offset] : c.attack.arco_offsets) {
      o << (first ? "" : ",") << name << ":" << format_number(offset);
      first = false;
    }
    o << "\n";
  }
  const auto& e = c.experiment;
  o << "\n[experiment]\nprotocol = " << to_string(e.protocol) << "\nkinds = ";
  for (std::size_t i = 0; i < e.kinds.size(); ++i) o << (i ? "," : "") << to_string(e.kinds[i]);
  o << "\nfractions = ";
  for (std::size_t i = 0; i < e.fractions.size(); ++i)
    o << (i ? "," : "") << format_number(e.fractions[i]);
  o << "\ntrials = " << e.trials << "\ncdf_fraction = " << format_number(e.cdf_fraction) << "\n";
  if (e.external_baseline) o << "external_baseline = " << e.external_baseline->string() << "\n";
  return o.str();
}

}  // namespace apguard::cli
