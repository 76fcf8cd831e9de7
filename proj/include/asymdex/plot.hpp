#pragma once
// Learning-curve rendering: success rate against env steps, one mean line
// with a shaded +-1 std band per label, as SVG.

#include <filesystem>
#include <string>
#include <vector>

namespace asymdex::cli {

struct CurveInput {
  std::string label;
  std::filesystem::path file;
};

struct Curve {
  std::string label;
  int runs = 0;
  std::vector<long long> steps;
  std::vector<double> mean;
  std::vector<double> std;  // population std across runs
};

/// Parses "label=path" or a bare path. A bare path takes its label from the
/// variant in a sibling manifest.json, else from the parent directory name.
CurveInput parse_curve_input(const std::string& arg);

/// Groups inputs by label (first-appearance order). Runs in one group must
/// share the env_steps column; longer runs are truncated to the shortest.
/// Errors name the offending file.
std::vector<Curve> aggregate_curves(const std::vector<CurveInput>& inputs);

std::string render_svg(const std::vector<Curve>& curves, const std::string& title = "success rate");

}  // namespace asymdex::cli
