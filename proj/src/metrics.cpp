#include "asymdex/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace asymdex::train {

std::string format_metrics_row(const MetricsRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%lld,%.9g,%.9g,%.9g,%.9g", r.env_steps, r.success_rate, r.mean_return, r.approx_kl,
                r.lr);
  return buf;
}

MetricsWriter::MetricsWriter(const std::filesystem::path& path) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  out_.open(path, std::ios::app);
  if (!out_) throw std::runtime_error("cannot open metrics file " + path.string());
  if (fresh) out_ << kMetricsHeader << '\n' << std::flush;
}

void MetricsWriter::append(const MetricsRow& r) { out_ << format_metrics_row(r) << '\n' << std::flush; }

std::vector<MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw std::runtime_error(path.string() + ": unexpected columns (want '" + kMetricsHeader + "')");
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    MetricsRow r;
    char tail = 0;
    if (std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lf%c", &r.env_steps, &r.success_rate, &r.mean_return,
                    &r.approx_kl, &r.lr, &tail) != 5)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed metrics row");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace asymdex::train
