#include "asymdex/gaussian_policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asymdex/error.hpp"

namespace asymdex::rl {

namespace {
constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * ln(2 pi)

std::vector<int> chain(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> s{in};
  s.insert(s.end(), hidden.begin(), hidden.end());
  s.push_back(out);
  return s;
}
}  // namespace

void ObsNormalizer::update(std::span<const double> batch, int rows) {
  const int d = dim();
  if (rows <= 0) return;
  if (batch.size() != static_cast<std::size_t>(rows) * d) throw ShapeError("normalizer update: wrong batch size");
  std::vector<double> bm(d, 0.0);
  std::vector<double> bv(d, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < d; ++j) bm[j] += batch[static_cast<std::size_t>(r) * d + j];
  for (double& m : bm) m /= rows;
  for (int r = 0; r < rows; ++r)
    for (int j = 0; j < d; ++j) {
      const double e = batch[static_cast<std::size_t>(r) * d + j] - bm[j];
      bv[j] += e * e;
    }
  for (double& v : bv) v /= rows;
  // parallel-variance merge of (count, mean, var) with the batch moments
  const double total = count + rows;
  for (int j = 0; j < d; ++j) {
    const double delta = bm[j] - mean[j];
    const double m2 = var[j] * count + bv[j] * rows + delta * delta * count * rows / total;
    mean[j] += delta * rows / total;
    var[j] = m2 / total;
  }
  count = total;
}

void ObsNormalizer::apply(std::span<double> batch) const {
  const std::size_t d = mean.size();
  if (d == 0 || batch.size() % d != 0) throw ShapeError("normalizer apply: wrong batch size");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::size_t j = i % d;
    batch[i] = std::clamp((batch[i] - mean[j]) / std::sqrt(var[j] + eps), -clip, clip);
  }
}

ActorCritic::ActorCritic(int obs_dim, int act_dim, const NetworkShape& shape)
    : policy(chain(obs_dim, shape.policy_hidden, act_dim)),
      value(chain(obs_dim, shape.value_hidden, 1)),
      log_std(act_dim, 0.0),
      normalizer(obs_dim) {}

void ActorCritic::init(std::mt19937_64& rng, double init_log_std) {
  policy.init_orthogonal(rng, std::numbers::sqrt2, 0.01);
  value.init_orthogonal(rng, std::numbers::sqrt2, 1.0);
  std::fill(log_std.begin(), log_std.end(), init_log_std);
  clamp_log_std();
}

void ActorCritic::clamp_log_std() {
  for (double& s : log_std) s = std::clamp(s, kLogStdMin, kLogStdMax);
}

double log_prob(std::span<const double> mean, std::span<const double> log_std, std::span<const double> action) {
  if (mean.size() != action.size() || log_std.size() != action.size()) throw ShapeError("log_prob: size mismatch");
  double lp = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double z = (action[i] - mean[i]) * std::exp(-log_std[i]);
    lp += -0.5 * z * z - log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

double sample_action(std::span<const double> mean, std::span<const double> log_std, std::mt19937_64& rng,
                     std::span<double> action) {
  if (mean.size() != action.size() || log_std.size() != action.size()) throw ShapeError("sample: size mismatch");
  std::normal_distribution<double> gauss(0.0, 1.0);
  double lp = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double eps = gauss(rng);
    action[i] = mean[i] + std::exp(log_std[i]) * eps;
    lp += -0.5 * eps * eps - log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

double entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double s : log_std) h += s + kHalfLog2Pi + 0.5;
  return h;
}

}  // namespace asymdex::rl
