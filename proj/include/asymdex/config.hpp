#pragma once
// YAML run configuration. Top-level sections: run, ppo, network, task.
// The task section overrides the built-in defaults of run.task. Unknown keys
// and wrong value types raise ConfigError with the key path and line.

#include <filesystem>
#include <string>
#include <vector>

#include "asymdex/task_spec.hpp"
#include "asymdex/trainer.hpp"

namespace asymdex::config {

struct RunConfig {
  train::TrainRunConfig run;
  sim::TaskSpec task;
  std::string output_root;  // empty: use ASYMDEX_OUTPUT_ROOT or ./runs
};

/// "a.b.c=value" with a YAML scalar or flow value.
struct Override {
  std::string key;
  std::string value;
};

Override parse_override(const std::string& text);

RunConfig parse_run_config(const std::string& yaml_text, const std::string& source_name,
                           const std::vector<Override>& overrides = {});

/// Throws ConfigError when the file cannot be read.
RunConfig load_run_config(const std::filesystem::path& path, const std::vector<Override>& overrides = {});

/// Fully resolved configuration as YAML (every key the loader understands).
std::string dump_run_config(const RunConfig& cfg);

/// Built-in task defaults adjusted for desk-scale training: reduced network
/// sizes and minibatch, used by the example configs and the acceptance suite.
RunConfig desk_defaults(sim::TaskId task, spaces::PolicyVariant variant);

}  // namespace asymdex::config
