#include <CLI11.hpp>

#include <iostream>

#include "asymdex/commands.hpp"

int main(int argc, char** argv) {
  using namespace asymdex::cli;
  CLI::App app{"Asymmetric bimanual dexterous manipulation: training and evaluation"};
  app.require_subcommand(1);

  TrainArgs train;
  unsigned long long seed = 0;
  long long budget = 0;
  auto* t = app.add_subcommand("train", "Train a policy from a YAML config");
  t->add_option("-c,--config", train.config, "Config file")->required();
  auto* seed_opt = t->add_option("--seed", seed, "Override run.seed");
  auto* budget_opt = t->add_option("--budget", budget, "Override run.budget (env steps)");
  t->add_option("--set", train.sets, "Override any key, e.g. --set ppo.learning_rate=1e-4");
  t->add_option("--output-root", train.output_root, "Output root (default: $ASYMDEX_OUTPUT_ROOT or ./runs)");

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Evaluate a checkpoint with the deterministic policy");
  e->add_option("--checkpoint", eval.checkpoint, "Interaction policy checkpoint")->required();
  e->add_option("--grasp-checkpoint", eval.grasp_checkpoint, "Grasp policy checkpoint (two-phase evaluation)");
  e->add_option("--episodes", eval.episodes, "Episodes")->capture_default_str();
  e->add_option("--seed", eval.seed, "Evaluation seed")->capture_default_str();
  e->add_flag("--json", eval.json, "JSON output");

  std::string plot_out;
  std::string title = "success rate";
  std::vector<std::string> plot_in;
  auto* p = app.add_subcommand("plot", "Render learning curves (mean and std over seeds) to SVG");
  p->add_option("out", plot_out, "Output SVG")->required();
  p->add_option("metrics", plot_in, "Metrics CSVs, optionally label=path")->required();
  p->add_option("--title", title, "Plot title");

  bool json = false;
  auto* s = app.add_subcommand("inspect-spaces", "Print observation and action dimensions per variant");
  s->add_flag("--json", json, "Print the full segment layouts as JSON");

  CLI11_PARSE(app, argc, argv);

  if (*t) {
    if (*seed_opt) train.seed = seed;
    if (*budget_opt) train.budget = budget;
    return run_train(train, std::cout, std::cerr);
  }
  if (*e) return run_eval(eval, std::cout, std::cerr);
  if (*p) return run_plot(plot_out, plot_in, title, std::cerr);
  return run_inspect_spaces(json, std::cout);
}
