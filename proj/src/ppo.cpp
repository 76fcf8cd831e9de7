#include "asymdex/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "asymdex/error.hpp"
#include "asymdex/kernels.hpp"

namespace asymdex::rl {

void PpoConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("ppo gamma must lie in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("ppo lambda must lie in (0, 1]");
  if (!(clip > 0.0)) throw ConfigError("ppo clip must be positive");
  if (minibatch < 1) throw ConfigError("ppo minibatch must be >= 1");
  if (epochs < 1) throw ConfigError("ppo epochs must be >= 1");
  if (!(kl_threshold > 0.0)) throw ConfigError("ppo kl_threshold must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("ppo learning_rate must be >= 0");
  if (!std::isfinite(entropy_coef) || !std::isfinite(value_coef)) throw ConfigError("ppo coefficients must be finite");
}

PpoConfig full_scale_ppo_config() {
  PpoConfig c;
  c.minibatch = 8092;
  return c;
}

void AdamState::step(std::span<double> params, std::span<const double> grad, double lr, const PpoConfig& cfg) {
  if (params.size() != grad.size() || params.size() != m.size()) throw ShapeError("adam: size mismatch");
  ++t;
  const double bias1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(t));
  const double bias2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(t));
  kernels::active().adam(params.size(), params.data(), grad.data(), m.data(), v.data(), lr, cfg.adam_beta1,
                         cfg.adam_beta2, cfg.adam_eps, bias1, bias2);
}

void Gradients::zero() {
  std::fill(policy.begin(), policy.end(), 0.0);
  std::fill(value.begin(), value.end(), 0.0);
  std::fill(log_std.begin(), log_std.end(), 0.0);
}

LossValues ppo_loss(const ActorCritic& ac, const Minibatch& mb, const PpoConfig& cfg, Gradients* grads,
                    unsigned terms) {
  const int b = mb.rows;
  const int od = ac.obs_dim();
  const int ad = ac.act_dim();
  if (b < 1 || mb.obs.size() != static_cast<std::size_t>(b) * od ||
      mb.actions.size() != static_cast<std::size_t>(b) * ad || mb.old_log_probs.size() != static_cast<std::size_t>(b) ||
      mb.advantages.size() != static_cast<std::size_t>(b) || mb.returns.size() != static_cast<std::size_t>(b))
    throw ShapeError("ppo_loss: minibatch arrays disagree with the network shapes");
  if (grads) grads->zero();

  LossValues out;
  const double inv_b = 1.0 / b;
  const bool need_policy = (terms & kSurrogate) != 0 || grads == nullptr;

  if (need_policy) {
    Mlp::Workspace ws;
    const auto mean = ac.policy.forward(mb.obs, b, ws);
    std::vector<double> dmean(static_cast<std::size_t>(b) * ad, 0.0);
    std::vector<double> inv_var(ad);
    for (int j = 0; j < ad; ++j) inv_var[j] = std::exp(-2.0 * ac.log_std[j]);
    double clipped = 0.0;
    for (int i = 0; i < b; ++i) {
      const auto mu = mean.subspan(static_cast<std::size_t>(i) * ad, ad);
      const auto act = mb.actions.subspan(static_cast<std::size_t>(i) * ad, ad);
      const double lp = log_prob(mu, ac.log_std, act);
      const double log_ratio = lp - mb.old_log_probs[i];
      const double ratio = std::exp(log_ratio);
      const double a = mb.advantages[i];
      const double unclipped = ratio * a;
      const double clipped_obj = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * a;
      const bool active = unclipped <= clipped_obj;
      out.surrogate -= std::min(unclipped, clipped_obj) * inv_b;
      out.approx_kl += ((ratio - 1.0) - log_ratio) * inv_b;
      if (std::abs(ratio - 1.0) > cfg.clip) clipped += 1.0;
      if (grads && (terms & kSurrogate) && active) {
        const double dlp = -a * ratio * inv_b;
        for (int j = 0; j < ad; ++j) {
          const double diff = act[j] - mu[j];
          dmean[static_cast<std::size_t>(i) * ad + j] = dlp * diff * inv_var[j];
          grads->log_std[j] += dlp * (diff * diff * inv_var[j] - 1.0);
        }
      }
    }
    out.clip_fraction = clipped * inv_b;
    if (grads && (terms & kSurrogate)) ac.policy.backward(mb.obs, ws, dmean, grads->policy);
  }

  if ((terms & kValue) || grads == nullptr) {
    Mlp::Workspace ws;
    const auto v = ac.value.forward(mb.obs, b, ws);
    std::vector<double> dv(b);
    for (int i = 0; i < b; ++i) {
      const double e = v[i] - mb.returns[i];
      out.value += e * e * inv_b;
      dv[i] = cfg.value_coef * 2.0 * e * inv_b;
    }
    if (grads && (terms & kValue)) ac.value.backward(mb.obs, ws, dv, grads->value);
  }

  out.entropy = entropy(ac.log_std);
  if (grads && (terms & kEntropy))
    for (double& g : grads->log_std) g -= cfg.entropy_coef;

  if (terms & kSurrogate) out.total += out.surrogate;
  if (terms & kValue) out.total += cfg.value_coef * out.value;
  if (terms & kEntropy) out.total -= cfg.entropy_coef * out.entropy;
  return out;
}

namespace {

void clip_norm(std::span<double> g, double max_norm) {
  if (!(max_norm > 0.0)) return;
  const double n = std::sqrt(kernels::active().sum_squares(g.size(), g.data()));
  if (n > max_norm) {
    const double s = max_norm / n;
    for (double& x : g) x *= s;
  }
}

double clip_norm2(std::span<double> a, std::span<double> b, double max_norm) {
  const auto& k = kernels::active();
  const double n = std::sqrt(k.sum_squares(a.size(), a.data()) + k.sum_squares(b.size(), b.data()));
  if (max_norm > 0.0 && n > max_norm) {
    const double s = max_norm / n;
    for (double& x : a) x *= s;
    for (double& x : b) x *= s;
  }
  return n;
}

template <class T>
std::vector<T> gather_rows(std::span<const T> src, std::span<const int> idx, int width) {
  std::vector<T> out(idx.size() * width);
  for (std::size_t r = 0; r < idx.size(); ++r)
    std::copy_n(src.begin() + static_cast<std::size_t>(idx[r]) * width, width, out.begin() + r * width);
  return out;
}

}  // namespace

UpdateStats ppo_update(ActorCritic& ac, Optimizer& opt, RolloutBuffer& buf, const PpoConfig& cfg, double& lr,
                       std::mt19937_64& rng) {
  UpdateStats st;
  normalize_advantages(buf.advantages);

  const ActorCritic backup = ac;
  const Optimizer opt_backup = opt;
  const int n = buf.size();
  const int mbs = std::min(cfg.minibatch, n);
  std::vector<int> perm(n);
  Gradients g(ac);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int start = 0; start + mbs <= n; start += mbs) {
      const std::span<const int> idx(perm.data() + start, mbs);
      const auto obs = gather_rows<double>(buf.obs, idx, buf.obs_dim);
      const auto act = gather_rows<double>(buf.actions, idx, buf.act_dim);
      const auto olp = gather_rows<double>(buf.log_probs, idx, 1);
      const auto adv = gather_rows<double>(buf.advantages, idx, 1);
      const auto ret = gather_rows<double>(buf.returns, idx, 1);
      const Minibatch mb{obs, act, olp, adv, ret, mbs};

      const LossValues lv = ppo_loss(ac, mb, cfg, &g);
      if (!std::isfinite(lv.total)) {
        ac = backup;
        opt = opt_backup;
        st.fault = true;
        st.lr = lr;
        return st;
      }
      clip_norm2(g.policy, g.log_std, cfg.max_grad_norm);
      clip_norm(g.value, cfg.max_grad_norm);
      opt.policy.step(ac.policy.params(), g.policy, lr, cfg);
      opt.value.step(ac.value.params(), g.value, lr, cfg);
      opt.log_std.step(ac.log_std, g.log_std, lr, cfg);
      ac.clamp_log_std();

      st.approx_kl += lv.approx_kl;
      st.surrogate += lv.surrogate;
      st.value_loss += lv.value;
      st.entropy += lv.entropy;
      st.clip_fraction += lv.clip_fraction;
      ++st.minibatches;
    }
  }
  if (st.minibatches > 0) {
    const double k = 1.0 / st.minibatches;
    st.approx_kl *= k;
    st.surrogate *= k;
    st.value_loss *= k;
    st.entropy *= k;
    st.clip_fraction *= k;
  }
  if (cfg.adaptive_lr) lr = adaptive_lr(lr, st.approx_kl, cfg.kl_threshold);
  st.lr = lr;
  return st;
}

double adaptive_lr(double lr, double approx_kl, double threshold) {
  if (approx_kl > 2.0 * threshold) lr /= 1.5;
  else if (approx_kl < 0.5 * threshold) lr *= 1.5;
  return std::clamp(lr, 1e-6, 1e-2);
}

}  // namespace asymdex::rl
