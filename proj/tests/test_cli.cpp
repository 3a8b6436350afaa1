#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "apguard/cli/commands.hpp"
#include "apguard/cli/config.hpp"
#include "apguard/cli/run_dir.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace apguard;
using namespace apguard::cli;
namespace fs = std::filesystem;

namespace {

// Small world so the full pipeline runs in a few seconds.
const char* kSmallConfig = R"(
[run]
seed = 11

[world]
n_aps = 16
samples_per_rp = 12
n_queries = 120

[model]
n_trees = 20

[attack]
kind = ARCO
fraction = 0.5

[experiment]
protocol = both
kinds = ARCO
fractions = 0.5
trials = 2
cdf_fraction = 0.5
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("apguard_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.push_back("--quiet");
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

fs::path write_text(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

// First data row of a CSV as column -> cell.
std::map<std::string, std::string> first_row(const fs::path& p) {
  std::ifstream in(p);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::map<std::string, std::string> out;
  std::istringstream h(header), r(row);
  std::string k, v;
  while (std::getline(h, k, ',') && std::getline(r, v, ',')) out[k] = v;
  return out;
}

double summary_mle(const fs::path& summary, const std::string& scenario) {
  std::ifstream in(summary);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream s(line);
    for (std::string c; std::getline(s, c, ',');) cells.push_back(c);
    if (cells.at(2) == scenario) return std::stod(cells.at(3));
  }
  FAIL("scenario missing from summary: " << scenario);
  return -1;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults and overrides") {
    std::istringstream in(kSmallConfig);
    const auto c = parse_config(in);
    CHECK(c.pipeline.master_seed == 11);
    CHECK(c.pipeline.world.n_aps == 16);
    CHECK(c.pipeline.model.n_trees == 20);
    CHECK(c.pipeline.model.learning_rate == 0.1);
    CHECK(c.attack.kind == AttackKind::ARCO);
    CHECK(c.experiment.kinds == std::vector<AttackKind>{AttackKind::ARCO});
    CHECK(c.experiment.trials == 2);
  }
  SUBCASE("unknown keys and sections are rejected") {
    std::istringstream key("[model]\nn_treez = 5\n");
    CHECK_THROWS_AS(parse_config(key), ConfigError);
    std::istringstream section("[modle]\nn_trees = 5\n");
    CHECK_THROWS_AS(parse_config(section), ConfigError);
    std::istringstream loose("n_trees = 5\n");
    CHECK_THROWS_AS(parse_config(loose), ConfigError);
  }
  SUBCASE("bad values are rejected") {
    for (const char* text : {"[model]\nn_trees = many\n", "[model]\nlearning_rate = 0\n",
                             "[attack]\nkind = XX\n", "[attack]\nfraction = 1.5\n",
                             "[preprocess]\nnoise_domain = dbm\n", "[experiment]\ntrials = 0\n",
                             "[data]\nsource = csv\n"}) {
      std::istringstream in(text);
      CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
  }
  SUBCASE("render round trip") {
    std::istringstream in(kSmallConfig);
    auto c = parse_config(in);
    c.attack.arco_offsets = {{"AP003", -12.5}, {"AP001", -40}};
    c.attack.malicious = {"AP001", "AP003"};
    c.pipeline.noise.domain = NoiseDomain::normalized;
    c.pipeline.noise.sigma = 0.004;
    const auto text = render_config(c);
    std::istringstream again(text);
    CHECK(render_config(parse_config(again)) == text);
    std::istringstream defaults_text(render_config(RunConfig{}));
    CHECK(render_config(parse_config(defaults_text)) == render_config(RunConfig{}));
  }
  SUBCASE("shipped desk config loads") {
    const auto c = load_config(fs::path(APGUARD_CONFIG_DIR) / "desk.ini");
    CHECK(c.pipeline.world.n_rps == 25);
    CHECK(c.pipeline.world.n_aps == 40);
    CHECK(c.experiment.trials == 20);
  }
}

TEST_CASE("usage errors") {
  TempDir tmp("usage");
  CHECK(call({}).code == kExitUsage);
  CHECK(call({"frobnicate"}).code == kExitUsage);
  CHECK(call({"train"}).code == kExitUsage);

  SUBCASE("missing input leaves nothing behind") {
    const auto out = tmp.path / "train_out";
    const auto r = call({"train", "--offline", (tmp.path / "nope.csv").string(), "--out", out.string()});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("nope.csv") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
  }
  SUBCASE("bad config") {
    const auto cfg = write_text(tmp.path / "bad.ini", "[model]\nn_treez = 3\n");
    const auto out = tmp.path / "gen";
    CHECK(call({"generate", "--config", cfg.string(), "--out", out.string()}).code == kExitUsage);
    CHECK_FALSE(fs::exists(out));
    CHECK(call({"generate", "--config", (tmp.path / "absent.ini").string(), "--out", out.string()}).code ==
          kExitUsage);
  }
  SUBCASE("runtime failure keeps an existing directory but adds nothing") {
    const auto out = tmp.path / "existing";
    fs::create_directories(out);
    const auto bad_csv = write_text(tmp.path / "bad.csv", "rp_id,x,y,AP1\n1,0,0,17\n");
    const auto r = call({"train", "--offline", bad_csv.string(), "--out", out.string()});
    CHECK(r.code != kExitOk);
    CHECK(fs::is_empty(out));
  }
}

TEST_CASE("staged pipeline") {
  TempDir tmp("pipeline");
  const auto cfg = write_text(tmp.path / "small.ini", kSmallConfig).string();
  const auto d = [&](const std::string& n) { return (tmp.path / n).string(); };
  auto ok = [&](std::vector<std::string> args) {
    args.push_back("--config");
    args.push_back(cfg);
    const auto r = call(args);
    INFO(r.err);
    REQUIRE(r.code == kExitOk);
  };

  ok({"generate", "--out", d("gen")});
  ok({"preprocess", "--survey", d("gen") + "/survey.csv", "--out", d("pre")});
  ok({"train", "--offline", d("pre") + "/offline.csv", "--out", d("train")});
  ok({"serve-batch", "--model", d("train") + "/model.bin", "--offline", d("pre") + "/offline.csv", "--queries",
      d("gen") + "/queries.csv", "--out", d("serve_clean")});
  ok({"evaluate", "--predictions", d("serve_clean") + "/predictions.csv", "--out", d("eval_clean")});
  ok({"attack", "--queries", d("gen") + "/queries.csv", "--selection", d("pre") + "/selection.csv", "--out",
      d("attack")});
  ok({"serve-batch", "--model", d("train") + "/model.bin", "--offline", d("pre") + "/offline.csv", "--queries",
      d("attack") + "/attacked_queries.csv", "--out", d("serve_attacked")});
  ok({"detect", "--offline", d("pre") + "/offline.csv", "--online", d("serve_attacked") + "/online.csv", "--out",
      d("detect")});
  ok({"mitigate", "--offline", d("pre") + "/offline.csv", "--online", d("serve_attacked") + "/online.csv",
      "--verdicts", d("detect") + "/verdicts.csv", "--out", d("mitigate")});
  ok({"serve-batch", "--model", d("mitigate") + "/model_mitigated.bin", "--offline",
      d("mitigate") + "/offline_mitigated.csv", "--queries", d("attack") + "/attacked_queries.csv",
      "--imputation", d("mitigate") + "/imputation", "--out", d("serve_full")});
  ok({"evaluate", "--predictions", d("serve_full") + "/predictions.csv", "--verdicts",
      d("detect") + "/verdicts.csv", "--plan", d("attack") + "/attack_plan.ini", "--out", d("eval_full")});
  ok({"experiment", "--out", d("exp")});

  SUBCASE("composition matches the in-process experiment") {
    const auto summary = tmp.path / "exp" / "cdf_summary.csv";
    const auto clean = first_row(tmp.path / "eval_clean" / "metrics.csv");
    const auto full = first_row(tmp.path / "eval_full" / "metrics.csv");
    CHECK(std::stod(clean.at("mle")) == doctest::Approx(summary_mle(summary, "clean")).epsilon(1e-12));
    CHECK(std::stod(full.at("mle")) == doctest::Approx(summary_mle(summary, "full-mitigation")).epsilon(1e-12));
    CHECK(std::stoul(full.at("tp")) + std::stoul(full.at("fn")) == 8);
    CHECK(fs::exists(tmp.path / "exp" / "detection_metrics.csv"));
    CHECK(fs::exists(tmp.path / "exp" / "cdf_ARCO_baseline-external.csv"));
  }
  SUBCASE("manifests describe every artifact") {
    for (const auto* dir : {"gen", "train", "mitigate", "exp"}) {
      const auto m = nlohmann::json::parse(slurp(tmp.path / dir / "manifest.json"));
      CHECK(m.at("seed") == 11);
      CHECK_FALSE(m.at("artifacts").empty());
      for (const auto& a : m.at("artifacts")) {
        const auto path = tmp.path / dir / a.at("name").get<std::string>();
        CHECK(sha256_file(path) == a.at("sha256").get<std::string>());
        CHECK(fs::file_size(path) == a.at("bytes").get<std::uintmax_t>());
      }
      for (const auto& in : m.at("inputs"))
        CHECK(sha256_file(in.at("path").get<std::string>()) == in.at("sha256").get<std::string>());
    }
    for (const auto& e : fs::directory_iterator(tmp.path / "gen"))
      CHECK(e.path().filename().string().rfind(".staging", 0) != 0);
  }
  SUBCASE("reruns are byte-identical") {
    ok({"train", "--offline", d("pre") + "/offline.csv", "--out", d("train2")});
    CHECK(slurp(tmp.path / "train" / "model.bin") == slurp(tmp.path / "train2" / "model.bin"));
    ok({"generate", "--out", d("gen2")});
    for (const auto* f : {"survey.csv", "queries.csv", "world.json", "manifest.json"})
      CHECK(slurp(tmp.path / "gen" / f) == slurp(tmp.path / "gen2" / f));
    ok({"generate", "--out", d("gen3"), "--seed", "12"});
    CHECK(slurp(tmp.path / "gen" / "survey.csv") != slurp(tmp.path / "gen3" / "survey.csv"));
  }
}

TEST_CASE("output root from the environment") {
  TempDir tmp("env");
  ::setenv(kOutputRootEnv, tmp.path.string().c_str(), 1);
  const auto cfg = write_text(tmp.path / "tiny.ini", "[world]\nn_aps = 4\nsamples_per_rp = 2\nn_queries = 5\n");
  const auto r = call({"generate", "--config", cfg.string()});
  ::unsetenv(kOutputRootEnv);
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(tmp.path / "generate" / "survey.csv"));
  CHECK(fs::exists(tmp.path / "generate" / "manifest.json"));
}

TEST_CASE("installed binary") {
  const std::string bin = APGUARD_BIN;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
  const int status = std::system((bin + " train > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(status) == kExitUsage);
}
