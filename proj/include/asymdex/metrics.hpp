#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace asymdex::train {

struct MetricsRow {
  long long env_steps = 0;
  double success_rate = 0.0;
  double mean_return = 0.0;
  double approx_kl = 0.0;
  double lr = 0.0;
};

inline constexpr const char* kMetricsHeader = "env_steps,success_rate,mean_return,approx_kl,lr";

std::string format_metrics_row(const MetricsRow& r);

/// Append-only CSV; the header is written when the file is new or empty.
class MetricsWriter {
 public:
  explicit MetricsWriter(const std::filesystem::path& path);
  void append(const MetricsRow& r);

 private:
  std::ofstream out_;
};

/// Throws std::runtime_error naming the file on a wrong header or malformed row.
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

}  // namespace asymdex::train
