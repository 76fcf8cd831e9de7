#include "asymdex/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "asymdex/checkpoint.hpp"
#include "asymdex/config.hpp"
#include "asymdex/error.hpp"
#include "asymdex/evaluation.hpp"
#include "asymdex/manifest.hpp"
#include "asymdex/metrics.hpp"
#include "asymdex/plot.hpp"
#include "asymdex/spaces.hpp"
#include "asymdex/trainer.hpp"

namespace asymdex::cli {

namespace fs = std::filesystem;

std::string make_tag(const std::string& task, const std::string& variant, const std::string& phase,
                     const std::string& role) {
  return "task=" + task + ";variant=" + variant + ";phase=" + phase + ";role=" + role;
}

std::optional<std::string> tag_field(const std::string& tag, const std::string& key) {
  std::stringstream ss(tag);
  for (std::string item; std::getline(ss, item, ';');) {
    const auto eq = item.find('=');
    if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
  }
  return std::nullopt;
}

namespace {

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes checkpoints for one training phase.
train::Hooks phase_hooks(const RunManifest& m, const config::RunConfig& cfg, const std::string& role,
                         train::MetricsWriter& metrics, long long step_offset) {
  const std::string tag = make_tag(std::string(sim::to_string(cfg.run.task)),
                                   std::string(spaces::to_string(cfg.run.variant)),
                                   std::string(train::to_string(cfg.run.phase)), role);
  train::Hooks h;
  h.on_update = [&metrics, step_offset](const train::MetricsRow& row, const rl::ActorCritic&) {
    train::MetricsRow r = row;
    r.env_steps += step_offset;
    metrics.append(r);
    return true;
  };
  h.on_checkpoint = [dir = m.checkpoint_dir(), tag, role, cfg, step_offset](
                        const rl::ActorCritic& model, double lr, long long env_steps, int update) {
    rl::Checkpoint c;
    c.model = model;
    c.ppo = cfg.run.ppo;
    c.lr = lr;
    c.env_steps = env_steps + step_offset;
    c.rng.seed(cfg.run.seed);
    c.tag = tag;
    char name[64];
    std::snprintf(name, sizeof name, "%s-u%06d.ckpt", role.c_str(), update);
    rl::save_checkpoint(dir / name, c);
    rl::save_checkpoint(dir / (role + ".ckpt"), c);
  };
  return h;
}

}  // namespace

int run_train(const TrainArgs& args, std::ostream& out, std::ostream& err) {
  if (!fs::is_regular_file(args.config)) {
    err << "error: config file not found: " << args.config << "\n";
    return kExitMissingFile;
  }
  std::vector<config::Override> overrides;
  config::RunConfig cfg;
  try {
    for (const auto& s : args.sets) overrides.push_back(config::parse_override(s));
    if (args.seed) overrides.push_back({"run.seed", std::to_string(*args.seed)});
    if (args.budget) overrides.push_back({"run.budget", std::to_string(*args.budget)});
    cfg = config::parse_run_config(read_bytes(args.config), args.config, overrides);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  RunManifest m;
  try {
    const fs::path root = resolve_output_root(args.output_root, cfg);
    m = create_run(root, args.config, read_bytes(args.config), cfg, overrides);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  out << m.dir.string() << "\n";

  try {
    train::MetricsWriter metrics(m.metrics_file());
    const auto& rc = cfg.run;
    switch (rc.phase) {
      case train::PhaseMode::Interaction:
      case train::PhaseMode::Monolithic:
        train::train_interaction(rc, cfg.task, rc.budget, phase_hooks(m, cfg, "interaction", metrics, 0));
        break;
      case train::PhaseMode::Grasp:
        train::train_grasp(rc, cfg.task, rc.budget, phase_hooks(m, cfg, "grasp", metrics, 0));
        break;
      case train::PhaseMode::Combined: {
        const auto [g, i] = train::split_budget(rc);
        const auto go = train::train_grasp(rc, cfg.task, g, phase_hooks(m, cfg, "grasp", metrics, 0));
        train::train_interaction(rc, cfg.task, i, phase_hooks(m, cfg, "interaction", metrics, go.env_steps));
        break;
      }
    }
  } catch (const NumericFault& e) {
    err << "error: numeric fault: " << e.what() << "\n";
    return kExitFault;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

namespace {

struct LoadedPolicy {
  rl::Checkpoint ckpt;
  config::RunConfig cfg;
};

LoadedPolicy load_policy(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw std::runtime_error("checkpoint not found: " + path.string());
  LoadedPolicy p{rl::load_checkpoint(path), {}};
  const auto task = tag_field(p.ckpt.tag, "task");
  const auto variant = tag_field(p.ckpt.tag, "variant");
  const auto phase = tag_field(p.ckpt.tag, "phase");
  if (!task || !variant || !phase) throw std::runtime_error(path.string() + ": checkpoint tag lacks task/variant/phase");
  // the run's resolved config sits next to the checkpoints directory
  const fs::path resolved = path.parent_path().parent_path() / "resolved.yaml";
  if (fs::is_regular_file(resolved)) {
    p.cfg = config::load_run_config(resolved);
  } else {
    const auto t = sim::task_from_string(*task);
    const auto v = spaces::variant_from_string(*variant);
    if (!t || !v) throw std::runtime_error(path.string() + ": unknown task or variant in tag");
    p.cfg = config::desk_defaults(*t, *v);
  }
  const auto ph = train::phase_from_string(*phase);
  if (!ph) throw std::runtime_error(path.string() + ": unknown phase in tag");
  p.cfg.run.phase = *ph;
  return p;
}

}  // namespace

int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.episodes < 1) throw ConfigError("--episodes must be >= 1");
    LoadedPolicy inter = load_policy(args.checkpoint);
    if (tag_field(inter.ckpt.tag, "role") != "interaction")
      throw ConfigError(args.checkpoint + ": expected an interaction checkpoint");
    const auto& rc = inter.cfg.run;
    const sim::TaskSpec task = train::effective_task(inter.cfg.task, rc);
    nlohmann::ordered_json j;
    j["task"] = std::string(sim::to_string(rc.task));
    j["variant"] = std::string(spaces::to_string(rc.variant));
    j["episodes"] = args.episodes;
    j["seed"] = args.seed;
    if (!args.grasp_checkpoint.empty()) {
      LoadedPolicy grasp = load_policy(args.grasp_checkpoint);
      if (tag_field(grasp.ckpt.tag, "role") != "grasp")
        throw ConfigError(args.grasp_checkpoint + ": expected a grasp checkpoint");
      const auto r = train::evaluate_two_phase(grasp.ckpt.model, inter.ckpt.model, task, rc.variant, args.episodes,
                                               args.seed);
      j["mode"] = "two-phase";
      j["grasp_rate"] = r.grasp_rate;
      j["success_rate"] = r.success_rate;
    } else {
      const auto start = rc.phase == train::PhaseMode::Monolithic ? sim::StartPhase::Acquisition
                                                                   : sim::StartPhase::Interaction;
      const auto r = train::evaluate(inter.ckpt.model, task, rc.variant, args.episodes, args.seed, start);
      j["mode"] = rc.phase == train::PhaseMode::Monolithic ? "monolithic" : "interaction";
      j["success_rate"] = r.success_rate;
      j["mean_length"] = r.mean_length;
      j["mean_return"] = r.mean_return;
    }
    if (args.json) {
      out << j.dump(2) << "\n";
    } else {
      for (const auto& [k, v] : j.items()) out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int run_plot(const std::string& out_path, const std::vector<std::string>& inputs, const std::string& title,
             std::ostream& err) {
  try {
    std::vector<CurveInput> in;
    for (const auto& s : inputs) in.push_back(parse_curve_input(s));
    const std::string svg = render_svg(aggregate_curves(in), title);
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    f << svg;
    if (!f) throw std::runtime_error("cannot write " + out_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

int run_inspect_spaces(bool json, std::ostream& out) {
  struct Config {
    const char* name;
    sim::HandModel hand;
    spaces::SpaceFlags flags;
  };
  const Config configs[] = {{"shadow (joint velocities, previous action)", sim::shadow_hand(), {true, true}},
                            {"allegro (joint positions only)", sim::allegro_hand(), {false, false}}};
  if (json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& c : configs) {
      for (auto v : spaces::kAllVariants) {
        nlohmann::ordered_json e;
        e["hand"] = c.hand.name;
        e["variant"] = std::string(spaces::to_string(v));
        e["obs_layout"] = nlohmann::json::parse(spaces::obs_layout(v, c.hand, c.hand, c.flags).to_json());
        e["action_layout"] = nlohmann::json::parse(spaces::action_layout(v, c.hand, c.hand).to_json());
        j.push_back(e);
      }
    }
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& c : configs) {
    out << c.name << "\n";
    char line[96];
    std::snprintf(line, sizeof line, "  %-10s %8s %8s\n", "variant", "obs", "action");
    out << line;
    for (auto v : spaces::kAllVariants) {
      const auto d = spaces::space_dims(v, c.hand, c.hand, c.flags);
      std::snprintf(line, sizeof line, "  %-10s %8d %8d\n", std::string(spaces::to_string(v)).c_str(), d.obs, d.act);
      out << line;
    }
    out << "\n";
  }
  return kExitOk;
}

}  // namespace asymdex::cli
