#include "asymdex/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "asymdex/error.hpp"

namespace asymdex::config {

namespace {

struct Context {
  std::string source;
  std::set<std::string> overridden;
};

std::string where(const Context& ctx, const YAML::Node& node, const std::string& path) {
  if (ctx.overridden.count(path)) return "override " + path;
  const YAML::Mark m = node.Mark();
  if (m.line < 0) return ctx.source + ": " + path;
  return ctx.source + ":" + std::to_string(m.line + 1) + ": " + path;
}

class Section {
 public:
  Section(YAML::Node node, std::string path, const Context& ctx) : node_(std::move(node)), path_(std::move(path)), ctx_(ctx) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError(where(ctx_, node_, path_) + ": expected a mapping");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return node_ && node_.IsMap() && node_[key] && !node_[key].IsNull();
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    try {
      if (!v.IsScalar()) throw YAML::BadConversion(v.Mark());
      out = v.as<T>();
    } catch (const YAML::BadConversion&) {
      throw ConfigError(where(ctx_, v, full(key)) + ": " + expected<T>());
    }
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (!v.IsSequence()) throw ConfigError(where(ctx_, v, full(key)) + ": expected a list");
    std::vector<T> r;
    for (std::size_t i = 0; i < v.size(); ++i) {
      try {
        r.push_back(v[i].as<T>());
      } catch (const YAML::BadConversion&) {
        throw ConfigError(where(ctx_, v[i], full(key) + "[" + std::to_string(i) + "]") + ": " + expected<T>());
      }
    }
    out = std::move(r);
  }

  void get_range(const std::string& key, sim::Range& out) {
    std::vector<double> v;
    get_list(key, v);
    if (!has(key)) return;
    if (v.size() != 2) throw ConfigError(where(ctx_, node_[key], full(key)) + ": expected [lo, hi]");
    out = {v[0], v[1]};
    if (!out.valid()) throw ConfigError(where(ctx_, node_[key], full(key)) + ": range must be finite with lo <= hi");
  }

  void get_vec3(const std::string& key, geom::Vec3& out) {
    std::vector<double> v;
    get_list(key, v);
    if (!has(key)) return;
    if (v.size() != 3) throw ConfigError(where(ctx_, node_[key], full(key)) + ": expected [x, y, z]");
    out = {v[0], v[1], v[2]};
  }

  template <class E, class Parse>
  void get_enum(const std::string& key, E& out, Parse parse, const char* choices) {
    std::string name;
    get(key, name);
    if (!has(key)) return;
    const auto e = parse(name);
    if (!e)
      throw ConfigError(where(ctx_, node_[key], full(key)) + ": unknown value '" + name + "' (expected one of " +
                        choices + ")");
    out = *e;
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(node_ && node_.IsMap() ? node_[key] : YAML::Node(), full(key), ctx_);
  }

  /// Rejects keys that were never looked up.
  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!seen_.count(k)) throw ConfigError(where(ctx_, kv.first, full(k)) + ": unknown key");
    }
  }

 private:
  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  static std::string expected() {
    if constexpr (std::is_same_v<T, bool>) return "expected true or false";
    else if constexpr (std::is_integral_v<T>) return "expected an integer";
    else if constexpr (std::is_floating_point_v<T>) return "expected a number";
    else return "expected a string";
  }

  YAML::Node node_;
  std::string path_;
  const Context& ctx_;
  std::set<std::string> seen_;
};

void read_sampling(Section s, sim::BaseSampling& b) {
  s.get_range("x", b.x);
  s.get_range("y", b.y);
  s.get_range("z", b.z);
  s.get_range("roll", b.roll);
  s.finish();
}

void read_task(Section s, sim::TaskSpec& t) {
  s.get("horizon", t.horizon);
  s.get("alpha", t.alpha);
  {
    Section r = s.sub("rewards");
    r.get("hand", t.rewards.hand);
    r.get("progress", t.rewards.progress);
    r.get("action", t.rewards.action);
    r.get("success", t.rewards.success);
    r.get("success_bonus", t.rewards.success_bonus);
    std::vector<double> beta(t.rewards.task.begin(), t.rewards.task.end());
    r.get_list("task", beta);
    if (beta.size() != 4) throw ConfigError("task.rewards.task: expected four coefficients");
    std::copy(beta.begin(), beta.end(), t.rewards.task.begin());
    r.get("grasp_alpha", t.rewards.grasp_alpha);
    r.get("grasp_beta", t.rewards.grasp_beta);
    r.finish();
  }
  {
    Section r = s.sub("success");
    r.get("block_in_cup", t.success.block_in_cup);
    r.get("stack", t.success.stack);
    r.get("cap_displacement", t.success.cap_displacement);
    r.get("switch_angle", t.success.switch_angle);
    r.get("pour_rim", t.success.pour_rim);
    r.get("upright_dot", t.success.upright_dot);
    r.get("twist_angle", t.success.twist_angle);
    r.finish();
  }
  {
    Section r = s.sub("sim");
    r.get("dt", t.sim.dt);
    r.get("grasp_radius", t.sim.grasp_radius);
    r.get("close_threshold", t.sim.close_threshold);
    r.get("release_closure", t.sim.release_closure);
    r.get("floor_z", t.sim.floor_z);
    r.finish();
  }
  {
    Section r = s.sub("action_scaling");
    r.get("translation", t.action_scaling.translation);
    r.get("rotation", t.action_scaling.rotation);
    r.finish();
  }
  {
    Section r = s.sub("acquisition");
    r.get("lift_height", t.acquisition.lift_height);
    r.get("grasp_horizon", t.acquisition.grasp_horizon);
    r.get_vec3("pregrasp_offset", t.acquisition.pregrasp_offset);
    r.finish();
  }
  {
    Section r = s.sub("geometry");
    r.get_vec3("cup_mouth", t.geometry.cup_mouth);
    r.get_vec3("cup_rim", t.geometry.cup_rim);
    r.get_vec3("bottle_top", t.geometry.bottle_top);
    r.get_vec3("button_offset", t.geometry.button_offset);
    r.get("button_radius", t.geometry.button_radius);
    r.get("button_travel", t.geometry.button_travel);
    r.get("button_full_depth", t.geometry.button_full_depth);
    r.get_vec3("lid_offset", t.geometry.lid_offset);
    r.get("lid_radius", t.geometry.lid_radius);
    r.finish();
  }
  {
    Section r = s.sub("randomization");
    r.get("enabled", t.randomization.enabled);
    Section n = r.sub("noise");
    n.get("object_pos", t.randomization.noise.object_pos);
    n.get("hand_joint", t.randomization.noise.hand_joint);
    n.get("hand_pos", t.randomization.noise.hand_pos);
    n.get("hand_orient", t.randomization.noise.hand_orient);
    n.get("action", t.randomization.noise.action);
    n.finish();
    if (r.has("friction")) {
      sim::Range f;
      r.get_range("friction", f);
      t.randomization.friction = f;
    }
    r.finish();
  }
  {
    Section r = s.sub("sampling");
    read_sampling(r.sub("facilitating"), t.facilitating_sampling);
    read_sampling(r.sub("dominant"), t.dominant_sampling);
    r.finish();
  }
  s.finish();
}

void apply_override(YAML::Node root, const Override& o, Context& ctx) {
  std::vector<std::string> parts;
  std::stringstream ss(o.key);
  for (std::string p; std::getline(ss, p, '.');) {
    if (p.empty()) throw ConfigError("override '" + o.key + "': empty key component");
    parts.push_back(p);
  }
  if (parts.empty()) throw ConfigError("override has an empty key");
  YAML::Node value;
  try {
    value = YAML::Load(o.value);
  } catch (const YAML::Exception& e) {
    throw ConfigError("override " + o.key + ": cannot parse value '" + o.value + "'");
  }
  std::vector<YAML::Node> chain{root};
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    YAML::Node next = chain.back()[parts[i]];
    if (!next || next.IsNull()) {
      chain.back()[parts[i]] = YAML::Node(YAML::NodeType::Map);
      next = chain.back()[parts[i]];
    }
    if (!next.IsMap()) throw ConfigError("override " + o.key + ": '" + parts[i] + "' is not a mapping");
    chain.push_back(next);
  }
  chain.back()[parts.back()] = value;
  ctx.overridden.insert(o.key);
}

template <class T>
std::string list_str(const std::vector<T>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace

Override parse_override(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + text + "' is not of the form key=value");
  return {text.substr(0, eq), text.substr(eq + 1)};
}

RunConfig parse_run_config(const std::string& yaml_text, const std::string& source_name,
                           const std::vector<Override>& overrides) {
  Context ctx{source_name, {}};
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": YAML syntax error: " + e.msg);
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError(source_name + ": top level must be a mapping");
  for (const Override& o : overrides) apply_override(root, o, ctx);

  Section top(root, "", ctx);
  Section run = top.sub("run");
  sim::TaskId task_id = sim::TaskId::Switch;
  run.get_enum("task", task_id, sim::task_from_string,
               "BlockInCup, Stack, BottleCap, Switch, RwBlockInCup, RwPour, RwTwistLid");
  spaces::PolicyVariant variant = spaces::PolicyVariant::AsymDex;
  run.get_enum("variant", variant, spaces::variant_from_string, "Sym, AsymNoRel, RelNoAsym, AsymDex");

  RunConfig cfg = desk_defaults(task_id, variant);
  train::TrainRunConfig& r = cfg.run;
  run.get_enum("phase", r.phase, train::phase_from_string, "interaction, grasp, combined, monolithic");
  run.get("num_envs", r.num_envs);
  run.get("steps_per_rollout", r.steps_per_rollout);
  run.get("budget", r.budget);
  run.get("seed", r.seed);
  if (run.has("randomize")) {
    bool b = false;
    run.get("randomize", b);
    r.randomize = b;
  }
  run.get("grasp_budget_fraction", r.grasp_budget_fraction);
  run.get("threads", r.threads);
  run.get("checkpoint_every", r.checkpoint_every);
  run.get("output_root", cfg.output_root);
  run.finish();

  Section ppo = top.sub("ppo");
  ppo.get("gamma", r.ppo.gamma);
  ppo.get("lambda", r.ppo.lambda);
  ppo.get("clip", r.ppo.clip);
  ppo.get("minibatch", r.ppo.minibatch);
  ppo.get("kl_threshold", r.ppo.kl_threshold);
  ppo.get("epochs", r.ppo.epochs);
  ppo.get("entropy_coef", r.ppo.entropy_coef);
  ppo.get("value_coef", r.ppo.value_coef);
  ppo.get("learning_rate", r.ppo.learning_rate);
  ppo.get("adaptive_lr", r.ppo.adaptive_lr);
  ppo.get("max_grad_norm", r.ppo.max_grad_norm);
  ppo.finish();

  Section net = top.sub("network");
  net.get_list("policy_hidden", r.net.policy_hidden);
  net.get_list("value_hidden", r.net.value_hidden);
  net.get("init_log_std", r.net.init_log_std);
  net.finish();
  for (int h : r.net.policy_hidden)
    if (h < 1) throw ConfigError(source_name + ": network.policy_hidden: sizes must be positive");
  for (int h : r.net.value_hidden)
    if (h < 1) throw ConfigError(source_name + ": network.value_hidden: sizes must be positive");
  if (!std::isfinite(r.net.init_log_std)) throw ConfigError(source_name + ": network.init_log_std: must be finite");

  read_task(top.sub("task"), cfg.task);
  top.finish();

  cfg.task.validate();
  r.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<Override>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.string(), overrides);
}

RunConfig desk_defaults(sim::TaskId task, spaces::PolicyVariant variant) {
  RunConfig c;
  c.task = sim::default_task(task);
  c.run.task = task;
  c.run.variant = variant;
  c.run.net.policy_hidden = {64, 64};
  c.run.net.value_hidden = {64, 64};
  c.run.ppo.minibatch = 512;
  return c;
}

std::string dump_run_config(const RunConfig& c) {
  const auto& r = c.run;
  const auto& t = c.task;
  std::ostringstream os;
  os.precision(17);
  auto range = [](const sim::Range& x) { return list_str(std::vector<double>{x.lo, x.hi}); };
  auto v3 = [](const geom::Vec3& v) { return list_str(std::vector<double>{v.x(), v.y(), v.z()}); };
  auto samp = [&](const char* name, const sim::BaseSampling& s) {
    os << "    " << name << ": {x: " << range(s.x) << ", y: " << range(s.y) << ", z: " << range(s.z)
       << ", roll: " << range(s.roll) << "}\n";
  };
  os << "run:\n"
     << "  task: " << sim::to_string(r.task) << "\n"
     << "  variant: " << spaces::to_string(r.variant) << "\n"
     << "  phase: " << train::to_string(r.phase) << "\n"
     << "  num_envs: " << r.num_envs << "\n"
     << "  steps_per_rollout: " << r.steps_per_rollout << "\n"
     << "  budget: " << r.budget << "\n"
     << "  seed: " << r.seed << "\n";
  if (r.randomize) os << "  randomize: " << (*r.randomize ? "true" : "false") << "\n";
  os << "  grasp_budget_fraction: " << r.grasp_budget_fraction << "\n"
     << "  threads: " << r.threads << "\n"
     << "  checkpoint_every: " << r.checkpoint_every << "\n";
  if (!c.output_root.empty()) os << "  output_root: \"" << c.output_root << "\"\n";
  os << "ppo:\n"
     << "  gamma: " << r.ppo.gamma << "\n  lambda: " << r.ppo.lambda << "\n  clip: " << r.ppo.clip
     << "\n  minibatch: " << r.ppo.minibatch << "\n  kl_threshold: " << r.ppo.kl_threshold
     << "\n  epochs: " << r.ppo.epochs << "\n  entropy_coef: " << r.ppo.entropy_coef
     << "\n  value_coef: " << r.ppo.value_coef << "\n  learning_rate: " << r.ppo.learning_rate
     << "\n  adaptive_lr: " << (r.ppo.adaptive_lr ? "true" : "false") << "\n  max_grad_norm: " << r.ppo.max_grad_norm
     << "\n";
  os << "network:\n  policy_hidden: " << list_str(r.net.policy_hidden)
     << "\n  value_hidden: " << list_str(r.net.value_hidden) << "\n  init_log_std: " << r.net.init_log_std << "\n";
  os << "task:\n  horizon: " << t.horizon << "\n  alpha: " << t.alpha << "\n"
     << "  rewards:\n    hand: " << t.rewards.hand << "\n    progress: " << t.rewards.progress
     << "\n    action: " << t.rewards.action << "\n    success: " << t.rewards.success
     << "\n    success_bonus: " << t.rewards.success_bonus
     << "\n    task: " << list_str(std::vector<double>(t.rewards.task.begin(), t.rewards.task.end()))
     << "\n    grasp_alpha: " << t.rewards.grasp_alpha << "\n    grasp_beta: " << t.rewards.grasp_beta << "\n"
     << "  success:\n    block_in_cup: " << t.success.block_in_cup << "\n    stack: " << t.success.stack
     << "\n    cap_displacement: " << t.success.cap_displacement << "\n    switch_angle: " << t.success.switch_angle
     << "\n    pour_rim: " << t.success.pour_rim << "\n    upright_dot: " << t.success.upright_dot
     << "\n    twist_angle: " << t.success.twist_angle << "\n"
     << "  sim:\n    dt: " << t.sim.dt << "\n    grasp_radius: " << t.sim.grasp_radius
     << "\n    close_threshold: " << t.sim.close_threshold << "\n    release_closure: " << t.sim.release_closure
     << "\n    floor_z: " << t.sim.floor_z << "\n"
     << "  action_scaling:\n    translation: " << t.action_scaling.translation
     << "\n    rotation: " << t.action_scaling.rotation << "\n"
     << "  acquisition:\n    lift_height: " << t.acquisition.lift_height
     << "\n    grasp_horizon: " << t.acquisition.grasp_horizon
     << "\n    pregrasp_offset: " << v3(t.acquisition.pregrasp_offset) << "\n"
     << "  geometry:\n    cup_mouth: " << v3(t.geometry.cup_mouth) << "\n    cup_rim: " << v3(t.geometry.cup_rim)
     << "\n    bottle_top: " << v3(t.geometry.bottle_top) << "\n    button_offset: " << v3(t.geometry.button_offset)
     << "\n    button_radius: " << t.geometry.button_radius << "\n    button_travel: " << t.geometry.button_travel
     << "\n    button_full_depth: " << t.geometry.button_full_depth
     << "\n    lid_offset: " << v3(t.geometry.lid_offset) << "\n    lid_radius: " << t.geometry.lid_radius << "\n"
     << "  randomization:\n    enabled: " << (t.randomization.enabled ? "true" : "false") << "\n"
     << "    noise: {object_pos: " << t.randomization.noise.object_pos
     << ", hand_joint: " << t.randomization.noise.hand_joint << ", hand_pos: " << t.randomization.noise.hand_pos
     << ", hand_orient: " << t.randomization.noise.hand_orient << ", action: " << t.randomization.noise.action
     << "}\n";
  if (t.randomization.friction) os << "    friction: " << range(*t.randomization.friction) << "\n";
  os << "  sampling:\n";
  samp("facilitating", t.facilitating_sampling);
  samp("dominant", t.dominant_sampling);
  return os.str();
}

}  // namespace asymdex::config
