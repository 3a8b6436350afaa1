#include "apguard/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "apguard/cli/config.hpp"
#include "apguard/cli/run_dir.hpp"
#include "apguard/csv.hpp"
#include "apguard/experiment.hpp"
#include "apguard/rng.hpp"
#include "json.hpp"

namespace apguard::cli {

namespace fs = std::filesystem;

namespace {

// Missing or unreadable inputs are usage errors (exit code 2).
class InputError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

struct Context {
  RunConfig config;
  bool quiet = false;
  std::ostream& log;

  void note(const std::string& line) const {
    if (!quiet) log << line << '\n';
  }
  std::uint64_t seed() const { return config.pipeline.master_seed; }
};

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--config", c.config, "INI configuration file");
  sub->add_option("--seed", c.seed, "Master seed (overrides [run] seed)");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_flag("--quiet", c.quiet, "Suppress progress output");
}

fs::path require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " file not found: " + path);
  return fs::path(path);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

FingerprintDatabase read_db(const fs::path& path, Domain domain, DbKind kind) {
  auto in = open_input(path);
  try {
    return parse_fingerprint_csv(in, CsvSchema::compact(), domain, kind);
  } catch (const ParseError& e) {
    throw ParseError(e.row(), path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

void write_db(const fs::path& path, const FingerprintDatabase& db) {
  write_file(path, [&](std::ostream& o) { write_fingerprint_csv(o, db); });
}

fs::path resolve_out(const CommonOptions& opts, const RunConfig& config, const std::string& command) {
  if (!opts.out.empty()) return opts.out;
  if (config.out) return *config.out;
  const char* root = std::getenv(kOutputRootEnv);
  return fs::path(root && *root ? root : kDefaultOutputRoot) / command;
}

std::vector<std::string> read_selection(const fs::path& path) {
  auto in = open_input(path);
  const auto table = csv::read_table(in);
  const auto name = table.column_index("name");
  const auto kept = table.column_index("kept");
  if (!name || !kept) throw ParseError(1, path.string() + ": needs name and kept columns");
  std::vector<std::string> out;
  for (const auto& row : table.rows)
    if (row[*kept] == "1") out.push_back(row[*name]);
  if (out.empty()) throw Error(path.string() + ": no kept AP");
  return out;
}

// --- model and imputation persistence -------------------------------------

void save_imputation(RunDir& dir, const ImputationModel& model) {
  write_file(dir.stage("imputation/imputation.csv"), [&](std::ostream& o) {
    o << "index,name,role,model\n";
    std::set<std::string> bad;
    for (const auto& ap : model.malicious_aps) bad.insert(ap.name);
    for (const auto& ap : model.schema) {
      const bool m = bad.contains(ap.name);
      o << ap.index << ',' << ap.name << ',' << (m ? "malicious" : "honest") << ','
        << (m ? ap.name + ".bin" : "") << '\n';
    }
  });
  for (std::size_t k = 0; k < model.malicious_aps.size(); ++k)
    save_model(model.regressors[k], dir.stage("imputation/" + model.malicious_aps[k].name + ".bin"));
}

ImputationModel load_imputation(const fs::path& dir) {
  const fs::path index = dir / "imputation.csv";
  if (!fs::is_regular_file(index)) throw InputError("imputation index not found: " + index.string());
  auto in = open_input(index);
  const auto table = csv::read_table(in);
  const auto name = table.column_index("name");
  const auto role = table.column_index("role");
  const auto file = table.column_index("model");
  if (!name || !role || !file) throw ParseError(1, index.string() + ": needs name, role, model columns");
  ImputationModel model;
  std::vector<std::string> names;
  for (const auto& row : table.rows) names.push_back(row[*name]);
  model.schema = make_schema(names);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row[*role] == "honest") {
      model.honest_aps.push_back(model.schema[r]);
    } else if (row[*role] == "malicious") {
      model.malicious_aps.push_back(model.schema[r]);
      model.regressors.push_back(load_model(dir / row[*file]));
    } else {
      throw ParseError(table.line_numbers[r], "role must be honest or malicious");
    }
  }
  return model;
}

// --- attack plan file -------------------------------------------------------

void write_plan(std::ostream& o, const AttackPlan& plan, double fraction, std::size_t trial) {
  o << "[attack]\nkind = " << to_string(plan.kind) << "\nfraction = " << csv::format_number(fraction)
    << "\ntrial = " << trial << "\nseed = " << plan.rng_seed << "\nmalicious = ";
  for (std::size_t i = 0; i < plan.malicious_aps.size(); ++i)
    o << (i ? "," : "") << plan.malicious_aps[i].name;
  o << '\n';
  if (plan.kind == AttackKind::ARCO) {
    o << "arco_offsets = ";
    bool first = true;
    for (const auto& [name, offset] : resolve_arco_offsets(plan)) {
      o << (first ? "" : ",") << name << ':' << csv::format_number(offset);
      first = false;
    }
    o << '\n';
  }
}

std::vector<std::string> read_plan_malicious(const fs::path& path) {
  auto in = open_input(path);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(path.string() + ": " + e.message());
  }
  const auto list = tree.get_optional<std::string>("attack.malicious");
  if (!list) throw ConfigError(path.string() + ": missing [attack] malicious");
  std::vector<std::string> out;
  std::istringstream s(*list);
  std::string item;
  while (std::getline(s, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

// --- prediction files -------------------------------------------------------

void write_predictions(std::ostream& o, const FingerprintDatabase& queries,
                       const FingerprintDatabase& online, std::size_t first_index) {
  using csv::format_number;
  o << "index,pred_rp_id,pred_x,pred_y,true_rp_id,true_x,true_y\n";
  for (std::size_t i = 0; i < online.size(); ++i) {
    const auto& p = *online.records()[i].location;
    o << first_index + i << ',' << p.rp_id << ',' << format_number(p.x) << ',' << format_number(p.y);
    if (const auto& t = queries.records()[i].location)
      o << ',' << t->rp_id << ',' << format_number(t->x) << ',' << format_number(t->y) << '\n';
    else
      o << ",,,\n";
  }
}

std::vector<double> read_prediction_errors(const fs::path& path) {
  auto in = open_input(path);
  const auto table = csv::read_table(in);
  const char* cols[] = {"pred_rp_id", "pred_x", "pred_y", "true_rp_id", "true_x", "true_y"};
  std::size_t idx[6];
  for (std::size_t k = 0; k < 6; ++k) {
    auto c = table.column_index(cols[k]);
    if (!c) throw ParseError(1, path.string() + ": missing column '" + cols[k] + "'");
    idx[k] = *c;
  }
  std::vector<RpLocation> pred, truth;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto line = table.line_numbers[r];
    if (row[idx[3]].empty())
      throw ParseError(line, path.string() + ": query without ground truth cannot be scored");
    pred.push_back({static_cast<int>(csv::parse_number(row[idx[0]], line, cols[0])),
                    csv::parse_number(row[idx[1]], line, cols[1]),
                    csv::parse_number(row[idx[2]], line, cols[2])});
    truth.push_back({static_cast<int>(csv::parse_number(row[idx[3]], line, cols[3])),
                     csv::parse_number(row[idx[4]], line, cols[4]),
                     csv::parse_number(row[idx[5]], line, cols[5])});
  }
  if (pred.empty()) throw Error(path.string() + ": no predictions");
  return localization_errors(pred, truth);
}

std::string cell(const std::optional<double>& v) {
  return v ? csv::format_number(*v) : "undefined";
}

// --- commands ---------------------------------------------------------------

void cmd_generate(const Context& ctx, RunDir& dir) {
  const auto data = make_synthetic_data(ctx.config.pipeline);
  write_db(dir.stage("survey.csv"), data.world.survey);
  write_db(dir.stage("queries.csv"), data.queries);
  const auto& truth = data.world.truth;
  const auto& w = ctx.config.pipeline.world;
  nlohmann::ordered_json j;
  j["world_seed"] = derive_seed(ctx.seed(), stage::kWorld);
  j["queries_seed"] = derive_seed(ctx.seed(), stage::kQueries);
  j["width_m"] = w.width_m;
  j["height_m"] = w.height_m;
  j["tx_power_dbm"] = w.tx_power_dbm;
  j["path_loss_exponent"] = w.path_loss_exponent;
  j["shadowing_sigma_db"] = w.shadowing_sigma_db;
  j["aps"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < truth.schema.size(); ++i)
    j["aps"].push_back({{"name", truth.schema[i].name},
                        {"x", truth.ap_positions[i].x},
                        {"y", truth.ap_positions[i].y}});
  j["rps"] = nlohmann::ordered_json::array();
  for (const auto& rp : truth.rp_locations) j["rps"].push_back({{"rp_id", rp.rp_id}, {"x", rp.x}, {"y", rp.y}});
  write_file(dir.stage("world.json"), [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  ctx.note("generated " + std::to_string(data.world.survey.size()) + " survey records, " +
           std::to_string(data.queries.size()) + " queries");
}

void cmd_preprocess(const Context& ctx, RunDir& dir, const std::string& survey_path) {
  const auto path = require_file(survey_path, "survey");
  dir.record_input("survey", path);
  const auto survey = read_db(path, Domain::raw, DbKind::raw_survey);
  const auto build = build_offline(survey, ctx.config.pipeline);
  write_db(dir.stage("offline.csv"), build.offline);
  write_file(dir.stage("selection.csv"), [&](std::ostream& o) {
    const auto kept = build.selection.kept_names();
    const std::set<std::string> keep(kept.begin(), kept.end());
    o << "index,name,score,kept\n";
    for (std::size_t i = 0; i < build.selection.candidates.size(); ++i) {
      const auto& ap = build.selection.candidates[i];
      o << ap.index << ',' << ap.name << ',' << csv::format_number(build.selection.scores[i]) << ','
        << (keep.contains(ap.name) ? 1 : 0) << '\n';
    }
  });
  ctx.note("kept " + std::to_string(build.selection.kept.size()) + " of " +
           std::to_string(build.selection.candidates.size()) + " APs; offline database has " +
           std::to_string(build.offline.size()) + " records");
}

void cmd_train(const Context& ctx, RunDir& dir, const std::string& offline_path) {
  const auto path = require_file(offline_path, "offline");
  dir.record_input("offline", path);
  const auto offline = read_db(path, Domain::normalized, DbKind::offline);
  const auto model = train_offline_classifier(offline, ctx.config.pipeline);
  save_model(model, dir.stage("model.bin"));
  ctx.note("trained classifier over " + std::to_string(model.class_labels().size()) + " RPs");
}

void cmd_attack(const Context& ctx, RunDir& dir, const std::string& queries_path,
                const std::string& selection_path) {
  const auto path = require_file(queries_path, "queries");
  dir.record_input("queries", path);
  auto queries = read_db(path, Domain::raw, DbKind::raw_survey);
  if (!selection_path.empty()) {
    const auto sel = require_file(selection_path, "selection");
    dir.record_input("selection", sel);
    queries = queries.project(read_selection(sel));
  }
  const auto& a = ctx.config.attack;
  AttackPlan plan;
  if (a.malicious.empty()) {
    plan = make_attack_plan(queries.schema(), a.kind, a.fraction, ctx.seed(), a.trial);
  } else {
    plan.kind = a.kind;
    plan.rng_seed = attack_seed(ctx.seed(), a.kind, a.fraction, a.trial);
    for (const auto& name : a.malicious) {
      const auto pos = queries.find_ap(name);
      if (!pos) throw ConfigError("attack.malicious names unknown AP '" + name + "'");
      plan.malicious_aps.push_back(queries.schema()[*pos]);
    }
  }
  plan.arco_offsets = a.arco_offsets;
  const auto attacked = apply_attack(queries, plan);
  write_db(dir.stage("attacked_queries.csv"), attacked);
  write_file(dir.stage("attack_plan.ini"), [&](std::ostream& o) { write_plan(o, plan, a.fraction, a.trial); });
  ctx.note(std::string(to_string(plan.kind)) + " attack on " + std::to_string(plan.malicious_aps.size()) +
           " of " + std::to_string(queries.ap_count()) + " APs");
}

void cmd_serve(const Context& ctx, RunDir& dir, const std::string& model_path,
               const std::string& offline_path, const std::string& queries_path,
               const std::string& online_path, const std::string& imputation_dir) {
  const auto mp = require_file(model_path, "model");
  const auto op = require_file(offline_path, "offline");
  const auto qp = require_file(queries_path, "queries");
  dir.record_input("model", mp);
  dir.record_input("offline", op);
  dir.record_input("queries", qp);
  const auto classifier = load_model(mp);
  const auto offline = read_db(op, Domain::normalized, DbKind::offline);
  const auto names = offline.ap_names();
  const auto raw = read_db(qp, Domain::raw, DbKind::raw_survey).project(names);
  auto normalized = normalize_database(raw, DbKind::raw_survey);
  if (!imputation_dir.empty()) {
    if (!fs::is_directory(imputation_dir))
      throw InputError("imputation directory not found: " + imputation_dir);
    dir.record_input("imputation", fs::path(imputation_dir) / "imputation.csv");
    normalized = impute_queries(normalized, load_imputation(imputation_dir));
  }
  const auto batch = serve_queries(classifier, rp_location_index(offline), normalized);

  std::vector<FingerprintRecord> records;
  if (!online_path.empty()) {
    const auto prev_path = require_file(online_path, "online");
    dir.record_input("online", prev_path);
    const auto prev = read_db(prev_path, Domain::normalized, DbKind::online);
    if (prev.ap_names() != names) throw SchemaError("existing online database has a different schema");
    records = prev.records();
  }
  const std::size_t first = records.size();
  records.insert(records.end(), batch.records().begin(), batch.records().end());
  const FingerprintDatabase online(batch.schema(), std::move(records), Domain::normalized, DbKind::online);
  write_db(dir.stage("online.csv"), online);
  write_file(dir.stage("predictions.csv"),
             [&](std::ostream& o) { write_predictions(o, normalized, batch, first); });
  ctx.note("served " + std::to_string(batch.size()) + " queries; online database has " +
           std::to_string(online.size()) + " records");
}

void cmd_detect(const Context& ctx, RunDir& dir, const std::string& offline_path,
                const std::string& online_path) {
  const auto op = require_file(offline_path, "offline");
  const auto np = require_file(online_path, "online");
  dir.record_input("offline", op);
  dir.record_input("online", np);
  const auto offline = read_db(op, Domain::normalized, DbKind::offline);
  const auto online = read_db(np, Domain::normalized, DbKind::online);
  const auto verdicts = detect_malicious_aps(offline, online, ctx.config.pipeline.detector);
  write_file(dir.stage("verdicts.csv"), [&](std::ostream& o) { write_verdicts_csv(o, verdicts); });
  ctx.note("flagged " + std::to_string(malicious_aps(verdicts).size()) + " of " +
           std::to_string(verdicts.size()) + " APs");
}

void cmd_mitigate(const Context& ctx, RunDir& dir, const std::string& offline_path,
                  const std::string& online_path, const std::string& verdicts_path) {
  const auto op = require_file(offline_path, "offline");
  const auto np = require_file(online_path, "online");
  const auto vp = require_file(verdicts_path, "verdicts");
  dir.record_input("offline", op);
  dir.record_input("online", np);
  dir.record_input("verdicts", vp);
  const auto offline = read_db(op, Domain::normalized, DbKind::offline);
  const auto online = read_db(np, Domain::normalized, DbKind::online);
  auto vin = open_input(vp);
  const auto verdicts = read_verdicts_csv(vin);
  TreeHyperparams hp = ctx.config.pipeline.model;
  hp.rng_seed = derive_seed(ctx.seed(), stage::kMitigate);
  const auto state = mitigation_cycle(offline, online, verdicts, hp);
  write_db(dir.stage("offline_mitigated.csv"), state.updated_offline);
  save_model(state.retrained_classifier, dir.stage("model_mitigated.bin"));
  save_imputation(dir, state.imputation);
  ctx.note("imputed " + std::to_string(state.imputation.malicious_aps.size()) + " APs from " +
           std::to_string(state.imputation.honest_aps.size()) + " honest ones; classifier retrained");
}

void cmd_evaluate(const Context& ctx, RunDir& dir, const std::string& predictions_path,
                  const std::string& verdicts_path, const std::string& plan_path) {
  const auto pp = require_file(predictions_path, "predictions");
  dir.record_input("predictions", pp);
  const auto errors = read_prediction_errors(pp);
  double sum = 0.0;
  for (double e : errors) sum += e;
  const double mle = sum / static_cast<double>(errors.size());

  std::optional<ConfusionCounts> counts;
  if (!verdicts_path.empty() || !plan_path.empty()) {
    const auto vp = require_file(verdicts_path, "verdicts");
    const auto ap = require_file(plan_path, "plan");
    dir.record_input("verdicts", vp);
    dir.record_input("plan", ap);
    auto vin = open_input(vp);
    const auto verdicts = read_verdicts_csv(vin);
    std::vector<ApId> truth;
    for (const auto& name : read_plan_malicious(ap)) truth.push_back(ApId{0, name});
    counts = confusion_counts(verdicts, truth);
  }
  write_file(dir.stage("metrics.csv"), [&](std::ostream& o) {
    o << "queries,mle";
    if (counts) o << ",tp,tn,fp,fn,fpr,fnr,precision,recall,accuracy,f1";
    o << '\n' << errors.size() << ',' << csv::format_number(mle);
    if (counts) {
      const auto m = detection_metrics(*counts);
      o << ',' << counts->tp << ',' << counts->tn << ',' << counts->fp << ',' << counts->fn << ','
        << cell(m.fpr) << ',' << cell(m.fnr) << ',' << cell(m.precision) << ',' << cell(m.recall)
        << ',' << cell(m.accuracy) << ',' << cell(m.f1);
    }
    o << '\n';
  });
  write_file(dir.stage("cdf.csv"), [&](std::ostream& o) { write_cdf_csv(o, error_cdf(errors)); });
  ctx.note("MLE " + csv::format_number(mle) + " m over " + std::to_string(errors.size()) + " queries");
}

void cmd_experiment(const Context& ctx, RunDir& dir) {
  const auto& cfg = ctx.config;
  std::optional<PreparedWorld> world;
  if (cfg.data.source == DataSource::csv) {
    const auto sp = require_file(cfg.data.survey_csv.string(), "survey");
    const auto qp = require_file(cfg.data.queries_csv.string(), "queries");
    dir.record_input("survey", sp);
    dir.record_input("queries", qp);
    world.emplace(prepare_world(read_db(sp, Domain::raw, DbKind::raw_survey),
                                read_db(qp, Domain::raw, DbKind::raw_survey), cfg.pipeline));
  } else {
    const auto data = make_synthetic_data(cfg.pipeline);
    world.emplace(prepare_world(data.world.survey, data.queries, cfg.pipeline));
  }
  ctx.note("world ready: " + std::to_string(world->selection.kept.size()) + " APs kept, " +
           std::to_string(world->offline.size()) + " offline records, " +
           std::to_string(world->queries.size()) + " queries");

  const auto& e = cfg.experiment;
  if (e.protocol != Protocol::cdf) {
    std::vector<DetectionSummary> rows;
    for (auto kind : e.kinds) {
      for (double f : e.fractions) {
        rows.push_back(run_detection_experiment(*world, kind, f, e.trials, ctx.seed(), cfg.pipeline.detector));
        const auto& r = rows.back();
        ctx.note(std::string(to_string(kind)) + " @ " + csv::format_number(f) + ": recall " +
                 cell(r.recall.mean) + ", fpr " + cell(r.fpr.mean) + ", accuracy " + cell(r.accuracy.mean));
      }
    }
    write_file(dir.stage("detection_metrics.csv"), [&](std::ostream& o) { write_detection_csv(o, rows); });
  }
  if (e.protocol != Protocol::detection) {
    std::optional<std::vector<double>> external;
    if (e.external_baseline) {
      const auto bp = require_file(e.external_baseline->string(), "external_baseline");
      dir.record_input("external_baseline", bp);
      auto in = open_input(bp);
      external = read_errors_csv(in);
    }
    std::vector<CdfExperimentResult> results;
    for (auto kind : e.kinds) {
      results.push_back(run_cdf_experiment(*world, kind, e.cdf_fraction, cfg.pipeline, external));
      const auto& r = results.back();
      const std::string k(to_string(kind));
      for (const auto& c : r.curves)
        write_file(dir.stage("cdf_" + k + "_" + std::string(to_string(c.scenario)) + ".csv"),
                   [&](std::ostream& o) { write_cdf_csv(o, c.cdf); });
      write_file(dir.stage("verdicts_" + k + ".csv"),
                 [&](std::ostream& o) { write_verdicts_csv(o, r.verdicts); });
      std::string line = k + " @ " + csv::format_number(e.cdf_fraction) + ":";
      for (const auto& c : r.curves)
        line += " " + std::string(to_string(c.scenario)) + "=" + csv::format_number(c.mle);
      ctx.note(line);
    }
    write_file(dir.stage("cdf_summary.csv"), [&](std::ostream& o) { write_cdf_summary_csv(o, results); });
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rogue access point detection and mitigation for WiFi fingerprint localization", "apguard"};
  app.require_subcommand(1);
  CommonOptions common;
  std::string survey, offline, online, queries, selection, model, imputation, verdicts, predictions, plan;
  std::optional<std::string> kind;
  std::optional<double> fraction;
  std::optional<std::size_t> trial;

  auto* generate = app.add_subcommand("generate", "Generate a synthetic world (survey, queries, ground truth)");
  auto* preprocess = app.add_subcommand("preprocess", "Select APs, normalize and augment a raw survey");
  preprocess->add_option("--survey", survey, "Raw survey CSV")->required();
  auto* train = app.add_subcommand("train", "Train the localization classifier");
  train->add_option("--offline", offline, "Offline database CSV")->required();
  auto* serve = app.add_subcommand("serve-batch", "Localize a batch of raw queries");
  serve->add_option("--model", model, "Classifier model file")->required();
  serve->add_option("--offline", offline, "Offline database CSV")->required();
  serve->add_option("--queries", queries, "Raw query CSV")->required();
  serve->add_option("--online", online, "Existing online database to append to");
  serve->add_option("--imputation", imputation, "Imputation directory written by mitigate");
  auto* attack = app.add_subcommand("attack", "Corrupt raw queries with a rogue-AP attack");
  attack->add_option("--queries", queries, "Raw query CSV")->required();
  attack->add_option("--selection", selection, "selection.csv; restricts the queries to kept APs");
  attack->add_option("--kind", kind, "CV, RV, ARCO or ARRO (overrides [attack] kind)");
  attack->add_option("--fraction", fraction, "Malicious AP fraction (overrides [attack] fraction)");
  attack->add_option("--trial", trial, "Trial index for seed derivation (overrides [attack] trial)");
  auto* detect = app.add_subcommand("detect", "Run the variance and mean-difference tests");
  detect->add_option("--offline", offline, "Offline database CSV")->required();
  detect->add_option("--online", online, "Online database CSV")->required();
  auto* mitigate = app.add_subcommand("mitigate", "Impute flagged APs and retrain the classifier");
  mitigate->add_option("--offline", offline, "Offline database CSV")->required();
  mitigate->add_option("--online", online, "Online database CSV")->required();
  mitigate->add_option("--verdicts", verdicts, "verdicts.csv from detect")->required();
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions and, optionally, detection verdicts");
  evaluate->add_option("--predictions", predictions, "predictions.csv from serve-batch")->required();
  evaluate->add_option("--verdicts", verdicts, "verdicts.csv from detect");
  evaluate->add_option("--plan", plan, "attack_plan.ini from attack");
  auto* experiment = app.add_subcommand("experiment", "Run the detection sweep and CDF scenarios");
  for (auto* sub : {generate, preprocess, train, serve, attack, detect, mitigate, evaluate, experiment})
    add_common(sub, common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    RunConfig config = common.config.empty() ? RunConfig{} : load_config(common.config);
    if (common.seed) config.pipeline.master_seed = *common.seed;
    if (kind) config.attack.kind = parse_attack_kind(*kind);
    if (fraction) config.attack.fraction = *fraction;
    if (trial) config.attack.trial = *trial;
    config.validate();
    const Context ctx{config, common.quiet, out};
    RunDir dir(resolve_out(common, config, command), command);
    if (!common.config.empty()) dir.record_input("config", common.config);

    if (sub == generate) cmd_generate(ctx, dir);
    else if (sub == preprocess) cmd_preprocess(ctx, dir, survey);
    else if (sub == train) cmd_train(ctx, dir, offline);
    else if (sub == serve) cmd_serve(ctx, dir, model, offline, queries, online, imputation);
    else if (sub == attack) cmd_attack(ctx, dir, queries, selection);
    else if (sub == detect) cmd_detect(ctx, dir, offline, online);
    else if (sub == mitigate) cmd_mitigate(ctx, dir, offline, online, verdicts);
    else if (sub == evaluate) cmd_evaluate(ctx, dir, predictions, verdicts, plan);
    else cmd_experiment(ctx, dir);

    dir.commit(render_config(config), config.pipeline.master_seed);
    ctx.note("wrote " + dir.out().string());
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "apguard " << command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "apguard " << command << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace apguard::cli
