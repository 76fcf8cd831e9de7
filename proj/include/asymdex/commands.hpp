#pragma once
// Subcommand implementations behind the `asymdex` executable. Each returns a
// process exit status and writes human-readable output to the given streams.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace asymdex::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMissingFile = 2;
inline constexpr int kExitFault = 3;

struct TrainArgs {
  std::string config;
  std::vector<std::string> sets;  // key=value overrides
  std::optional<unsigned long long> seed;
  std::optional<long long> budget;
  std::string output_root;
};

/// On success prints the run directory on the first line of `out`.
int run_train(const TrainArgs& args, std::ostream& out, std::ostream& err);

struct EvalArgs {
  std::string checkpoint;
  std::string grasp_checkpoint;
  int episodes = 100;
  unsigned long long seed = 0;
  bool json = false;
};

int run_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);

int run_plot(const std::string& out_path, const std::vector<std::string>& inputs, const std::string& title,
             std::ostream& err);

int run_inspect_spaces(bool json, std::ostream& out);

/// Checkpoint tag: "task=<T>;variant=<V>;phase=<P>;role=<interaction|grasp>".
std::string make_tag(const std::string& task, const std::string& variant, const std::string& phase,
                     const std::string& role);
std::optional<std::string> tag_field(const std::string& tag, const std::string& key);

}  // namespace asymdex::cli
