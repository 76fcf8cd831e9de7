#include "asymdex/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <stdexcept>

#include "asymdex/metrics.hpp"

namespace asymdex::cli {

namespace fs = std::filesystem;

CurveInput parse_curve_input(const std::string& arg) {
  if (const auto eq = arg.find('='); eq != std::string::npos && eq > 0) return {arg.substr(0, eq), arg.substr(eq + 1)};
  CurveInput in{"", arg};
  const fs::path manifest = fs::path(arg).parent_path() / "manifest.json";
  if (std::ifstream f(manifest); f) {
    try {
      const auto j = nlohmann::json::parse(f);
      if (j.contains("variant") && j["variant"].is_string()) in.label = j["variant"].get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw std::runtime_error(manifest.string() + ": malformed manifest");
    }
  }
  if (in.label.empty()) {
    const auto parent = fs::path(arg).parent_path().filename().string();
    in.label = parent.empty() ? fs::path(arg).stem().string() : parent;
  }
  return in;
}

std::vector<Curve> aggregate_curves(const std::vector<CurveInput>& inputs) {
  if (inputs.empty()) throw std::runtime_error("plot needs at least one metrics file");
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<fs::path, std::vector<train::MetricsRow>>>> groups;
  for (const auto& in : inputs) {
    auto rows = train::read_metrics(in.file);
    if (rows.empty()) throw std::runtime_error(in.file.string() + ": no metric rows");
    if (!groups.count(in.label)) order.push_back(in.label);
    groups[in.label].emplace_back(in.file, std::move(rows));
  }
  std::vector<Curve> out;
  for (const auto& label : order) {
    const auto& runs = groups[label];
    std::size_t n = runs.front().second.size();
    for (const auto& r : runs) n = std::min(n, r.second.size());
    Curve c;
    c.label = label;
    c.runs = static_cast<int>(runs.size());
    for (std::size_t i = 0; i < n; ++i) {
      const long long s = runs.front().second[i].env_steps;
      double sum = 0.0;
      for (const auto& r : runs) {
        if (r.second[i].env_steps != s)
          throw std::runtime_error(r.first.string() + ": env_steps column differs from " +
                                   runs.front().first.string() + " at row " + std::to_string(i + 1));
        sum += r.second[i].success_rate;
      }
      const double mean = sum / static_cast<double>(runs.size());
      double var = 0.0;
      for (const auto& r : runs) var += (r.second[i].success_rate - mean) * (r.second[i].success_rate - mean);
      c.steps.push_back(s);
      c.mean.push_back(mean);
      c.std.push_back(std::sqrt(var / static_cast<double>(runs.size())));
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string r;
  for (char ch : s) {
    switch (ch) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += ch;
    }
  }
  return r;
}

std::string step_label(double s) {
  char buf[32];
  if (s >= 1e6) std::snprintf(buf, sizeof buf, "%.3gM", s / 1e6);
  else if (s >= 1e3) std::snprintf(buf, sizeof buf, "%.3gk", s / 1e3);
  else std::snprintf(buf, sizeof buf, "%.0f", s);
  return buf;
}

}  // namespace

std::string render_svg(const std::vector<Curve>& curves, const std::string& title) {
  const double W = 720, H = 440, left = 70, right = 180, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  long long max_step = 1;
  for (const auto& c : curves)
    for (long long s : c.steps) max_step = std::max(max_step, s);
  auto X = [&](double s) { return left + pw * s / static_cast<double>(max_step); };
  auto Y = [&](double v) { return top + ph * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double v = i / 5.0, y = Y(v);
    os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(left + pw) << "\" y2=\"" << fmt(y)
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << fmt(v)
       << "</text>\n";
  }
  for (int i = 0; i <= 4; ++i) {
    const double s = max_step * i / 4.0, x = X(s);
    os << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(x) << "\" y2=\""
       << fmt(top + ph + 5) << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(top + ph + 20) << "\" text-anchor=\"middle\">" << step_label(s)
       << "</text>\n";
  }
  os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(H - 15) << "\" text-anchor=\"middle\">env steps</text>\n";
  os << "<text transform=\"translate(18 " << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">success rate</text>\n";

  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string band, line;
    for (std::size_t i = 0; i < c.steps.size(); ++i)
      band += fmt(X(c.steps[i])) + "," + fmt(Y(c.mean[i] + c.std[i])) + " ";
    for (std::size_t i = c.steps.size(); i-- > 0;)
      band += fmt(X(c.steps[i])) + "," + fmt(Y(c.mean[i] - c.std[i])) + " ";
    for (std::size_t i = 0; i < c.steps.size(); ++i)
      line += (i ? " " : "") + fmt(X(c.steps[i])) + "," + fmt(Y(c.mean[i]));
    if (!band.empty()) band.pop_back();
    os << "<polygon class=\"band\" data-label=\"" << escape(c.label) << "\" points=\"" << band << "\" fill=\"" << color
       << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    os << "<polyline class=\"mean\" data-label=\"" << escape(c.label) << "\" points=\"" << line
       << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    const double ly = top + 10 + 22.0 * static_cast<double>(k);
    os << "<g class=\"legend\"><line x1=\"" << fmt(left + pw + 15) << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << fmt(left + pw + 40) << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>"
       << "<text x=\"" << fmt(left + pw + 46) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(c.label) << " (n="
       << c.runs << ")</text></g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace asymdex::cli
