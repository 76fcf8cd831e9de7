#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "asymdex/commands.hpp"
#include "asymdex/config.hpp"
#include "asymdex/error.hpp"
#include "asymdex/manifest.hpp"
#include "asymdex/metrics.hpp"
#include "asymdex/plot.hpp"

using namespace asymdex;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("asymdex_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

std::string error_of(const std::string& yaml, const std::vector<config::Override>& ov = {}) {
  try {
    config::parse_run_config(yaml, "cfg.yaml", ov);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const fs::path kSmoke = fs::path(ASYMDEX_SOURCE_DIR) / "configs" / "smoke.yaml";

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = config::parse_run_config(
      "run:\n  task: BlockInCup\n  variant: Sym\n  phase: combined\n  seed: 12\nppo:\n  clip: 0.1\n"
      "network:\n  policy_hidden: [32, 16]\ntask:\n  alpha: 0.7\n  rewards:\n    task: [1, 2, 3, 4]\n",
      "cfg.yaml");
  CHECK(cfg.run.task == sim::TaskId::BlockInCup);
  CHECK(cfg.run.variant == spaces::PolicyVariant::Sym);
  CHECK(cfg.run.phase == train::PhaseMode::Combined);
  CHECK(cfg.run.seed == 12);
  CHECK(cfg.run.ppo.clip == 0.1);
  CHECK(cfg.run.net.policy_hidden == std::vector<int>{32, 16});
  CHECK(cfg.run.net.init_log_std == -0.5);
  CHECK(cfg.task.alpha == 0.7);
  CHECK(cfg.task.rewards.task[3] == 4.0);
  // BlockInCup defaults come through
  CHECK(cfg.task.dominant_sampling.x.lo == 0.3);
}

TEST_CASE("config errors carry the key path and line") {
  CHECK(error_of("run:\n  task: Switch\n  num_envs: lots\n") == "cfg.yaml:3: run.num_envs: expected an integer");
  const auto bad_enum = error_of("run:\n  variant: Asym\n");
  CHECK(bad_enum.find("cfg.yaml:2: run.variant: unknown value 'Asym'") == 0);
  CHECK(error_of("ppo:\n  gamma: 0.9\n  gama: 0.9\n") == "cfg.yaml:3: ppo.gama: unknown key");
  CHECK(error_of("task:\n  sampling:\n    dominant:\n      x: [1]\n").find("task.sampling.dominant.x") != std::string::npos);
  CHECK(error_of("run: [1, 2]\n").find("run: expected a mapping") != std::string::npos);
  CHECK(error_of("run:\n  task: [\n").find("YAML syntax error") != std::string::npos);
  CHECK(error_of("", {{"run.phase", "sideways"}}).find("override run.phase") == 0);
  CHECK(!error_of("ppo:\n  clip: -1\n").empty());
  CHECK(error_of("network:\n  init_log_std: .nan\n").find("network.init_log_std: must be finite") != std::string::npos);
}

TEST_CASE("overrides") {
  const auto o = config::parse_override("ppo.learning_rate=1e-4");
  CHECK(o.key == "ppo.learning_rate");
  CHECK(o.value == "1e-4");
  CHECK_THROWS_AS(config::parse_override("novalue"), ConfigError);
  const auto cfg = config::parse_run_config("run:\n  seed: 1\n", "x", {{"run.seed", "7"}, {"network.value_hidden", "[8]"}});
  CHECK(cfg.run.seed == 7);
  CHECK(cfg.run.net.value_hidden == std::vector<int>{8});
}

TEST_CASE("resolved config round trips") {
  auto cfg = config::desk_defaults(sim::TaskId::RwTwistLid, spaces::PolicyVariant::RelNoAsym);
  cfg.run.randomize = true;
  cfg.task.alpha = 0.25;
  const std::string text = config::dump_run_config(cfg);
  const auto back = config::parse_run_config(text, "resolved.yaml");
  CHECK(config::dump_run_config(back) == text);
  CHECK(back.task.randomization.friction.has_value());
}

TEST_CASE("git blob hash") {
  CHECK(cli::git_blob_sha1("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(cli::git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("train: missing config") {
  std::ostringstream out, err;
  cli::TrainArgs a;
  a.config = "/nonexistent/dir/cfg.yaml";
  CHECK(cli::run_train(a, out, err) == 2);
  CHECK(err.str().find("/nonexistent/dir/cfg.yaml") != std::string::npos);
}

TEST_CASE("train: smoke config with a seed override") {
  const auto root = scratch("smoke");
  std::ostringstream out, err;
  cli::TrainArgs a;
  a.config = kSmoke.string();
  a.seed = 7;
  a.output_root = root.string();
  REQUIRE(cli::run_train(a, out, err) == 0);
  const fs::path dir = out.str().substr(0, out.str().find('\n'));
  CHECK(train::read_metrics(dir / "metrics.csv").size() == 2);
  CHECK(slurp(dir / "config.yaml") == slurp(kSmoke));
  const auto m = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(m["seed"] == 7);
  CHECK(m["overrides"][0]["key"] == "run.seed");
  CHECK(m["overrides"][0]["value"] == "7");
  CHECK(m["config_sha1"] == cli::git_blob_sha1(slurp(kSmoke)));
  CHECK(fs::exists(dir / "checkpoints" / "interaction.ckpt"));
  CHECK(config::load_run_config(dir / "resolved.yaml").run.seed == 7);

  // a second run under the same root gets a fresh id
  std::ostringstream out2;
  REQUIRE(cli::run_train(a, out2, err) == 0);
  CHECK(out2.str() != out.str());
  // and the same metrics
  const fs::path dir2 = out2.str().substr(0, out2.str().find('\n'));
  CHECK(slurp(dir2 / "metrics.csv") == slurp(dir / "metrics.csv"));

  // evaluation of the written checkpoint
  std::ostringstream eo, ee;
  cli::EvalArgs ev;
  ev.checkpoint = (dir / "checkpoints" / "interaction.ckpt").string();
  ev.episodes = 2;
  ev.json = true;
  REQUIRE(cli::run_eval(ev, eo, ee) == 0);
  const auto rep = nlohmann::json::parse(eo.str());
  CHECK(rep["episodes"] == 2);
  CHECK(rep["variant"] == "AsymDex");
  fs::remove_all(root);
}

TEST_CASE("train: parse errors exit nonzero") {
  const auto root = scratch("bad");
  write(root / "bad.yaml", "run:\n  task: Swich\n");
  std::ostringstream out, err;
  cli::TrainArgs a;
  a.config = (root / "bad.yaml").string();
  a.output_root = root.string();
  CHECK(cli::run_train(a, out, err) == 1);
  CHECK(err.str().find(":2: run.task") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("combined runs append both phases with cumulative steps") {
  const auto root = scratch("combined");
  write(root / "c.yaml",
        "run:\n  task: BlockInCup\n  phase: combined\n  num_envs: 2\n  steps_per_rollout: 8\n  budget: 80\n"
        "  grasp_budget_fraction: 0.4\nppo:\n  minibatch: 8\n");
  std::ostringstream out, err;
  cli::TrainArgs a;
  a.config = (root / "c.yaml").string();
  a.output_root = root.string();
  REQUIRE(cli::run_train(a, out, err) == 0);
  const fs::path dir = out.str().substr(0, out.str().find('\n'));
  const auto rows = train::read_metrics(dir / "metrics.csv");
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].env_steps == 16 * static_cast<long long>(i + 1));
  CHECK(fs::exists(dir / "checkpoints" / "grasp.ckpt"));
  CHECK(fs::exists(dir / "checkpoints" / "interaction.ckpt"));
  cli::EvalArgs ev;
  ev.checkpoint = (dir / "checkpoints" / "interaction.ckpt").string();
  ev.grasp_checkpoint = (dir / "checkpoints" / "grasp.ckpt").string();
  ev.episodes = 2;
  std::ostringstream eo, ee;
  CHECK(cli::run_eval(ev, eo, ee) == 0);
  CHECK(eo.str().find("grasp_rate") != std::string::npos);
  fs::remove_all(root);
}

TEST_CASE("plot") {
  const auto root = scratch("plot");
  const std::string csv = "env_steps,success_rate,mean_return,approx_kl,lr\n100,0.1,1,0.01,0.0003\n200,0.5,2,0.01,0.0003\n";
  for (int i = 0; i < 5; ++i) write(root / ("run" + std::to_string(i) + ".csv"), csv);
  write(root / "other.csv", "env_steps,success_rate,mean_return,approx_kl,lr\n100,0.3,1,0.01,0.0003\n200,0.9,2,0.01,0.0003\n");
  write(root / "broken.csv", "env_steps,success,mean_return\n100,0.1,1\n");

  SUBCASE("single run collapses the band") {
    const auto c = cli::aggregate_curves({{"A", root / "run0.csv"}});
    REQUIRE(c.size() == 1);
    CHECK(c[0].std == std::vector<double>{0.0, 0.0});
    CHECK(c[0].mean == std::vector<double>{0.1, 0.5});
  }
  SUBCASE("identical runs have zero spread") {
    std::vector<cli::CurveInput> in;
    for (int i = 0; i < 5; ++i) in.push_back({"A", root / ("run" + std::to_string(i) + ".csv")});
    const auto c = cli::aggregate_curves(in);
    CHECK(c[0].runs == 5);
    CHECK(c[0].std == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("mean and std across runs") {
    const auto c = cli::aggregate_curves({{"A", root / "run0.csv"}, {"A", root / "other.csv"}});
    CHECK(c[0].mean[1] == doctest::Approx(0.7));
    CHECK(c[0].std[1] == doctest::Approx(0.2));
  }
  SUBCASE("two labels give two legend entries") {
    const auto c = cli::aggregate_curves({{"AsymDex", root / "run0.csv"}, {"Sym", root / "other.csv"}});
    const auto svg = cli::render_svg(c);
    std::size_t n = 0;
    for (auto p = svg.find("class=\"legend\""); p != std::string::npos; p = svg.find("class=\"legend\"", p + 1)) ++n;
    CHECK(n == 2);
    CHECK(svg.find("AsymDex (n=1)") != std::string::npos);
    CHECK(svg.find("Sym (n=1)") != std::string::npos);
  }
  SUBCASE("inconsistent columns name the file") {
    std::ostringstream err;
    const auto out = (root / "o.svg").string();
    CHECK(cli::run_plot(out, {(root / "run0.csv").string(), (root / "broken.csv").string()}, "t", err) != 0);
    CHECK(err.str().find("broken.csv") != std::string::npos);
  }
  SUBCASE("output is deterministic") {
    std::ostringstream err;
    const std::vector<std::string> in{"A=" + (root / "run0.csv").string(), "B=" + (root / "other.csv").string()};
    REQUIRE(cli::run_plot((root / "a.svg").string(), in, "t", err) == 0);
    REQUIRE(cli::run_plot((root / "b.svg").string(), in, "t", err) == 0);
    CHECK(slurp(root / "a.svg") == slurp(root / "b.svg"));
  }
  SUBCASE("labels from labelled args and manifests") {
    CHECK(cli::parse_curve_input("X=/a/b.csv").label == "X");
    fs::create_directories(root / "r1");
    write(root / "r1" / "manifest.json", R"({"variant": "RelNoAsym"})");
    CHECK(cli::parse_curve_input((root / "r1" / "metrics.csv").string()).label == "RelNoAsym");
  }
  fs::remove_all(root);
}

TEST_CASE("inspect-spaces") {
  std::ostringstream out;
  CHECK(cli::run_inspect_spaces(false, out) == 0);
  CHECK(out.str().find("AsymDex          88       26") != std::string::npos);
  CHECK(out.str().find("Sym              60       44") != std::string::npos);
  std::ostringstream js;
  CHECK(cli::run_inspect_spaces(true, js) == 0);
  const auto j = nlohmann::json::parse(js.str());
  CHECK(j.size() == 8);
  CHECK(j[3]["obs_layout"]["dim"] == 88);
}

TEST_CASE("checkpoint tags") {
  const auto t = cli::make_tag("Switch", "AsymDex", "interaction", "grasp");
  CHECK(cli::tag_field(t, "variant") == "AsymDex");
  CHECK(cli::tag_field(t, "role") == "grasp");
  CHECK(!cli::tag_field(t, "seed"));
}
