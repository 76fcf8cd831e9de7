#pragma once
// Independent reference implementations used by the unit tests and the
// acceptance suite. None of these call into the library code they check.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "asymdex/envsim.hpp"
#include "asymdex/geom.hpp"

namespace oracle {

using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Rotation matrix of a (not necessarily unit) quaternion, scalar first.
inline Mat3 rotation(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  w /= n, x /= n, y /= n, z /= n;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),  //
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

inline Mat3 rotation(const asymdex::geom::Quat& q) { return rotation(q.w, q.x, q.y, q.z); }

inline Mat4 homogeneous(const asymdex::geom::Pose& p) {
  Mat4 h = Mat4::Identity();
  h.topLeftCorner<3, 3>() = rotation(p.orient);
  h.topRightCorner<3, 1>() = p.pos;
  return h;
}

/// Rodrigues formula.
inline Mat3 rodrigues(const Eigen::Vector3d& v) {
  const double th = v.norm();
  if (th == 0.0) return Mat3::Identity();
  const Eigen::Vector3d k = v / th;
  Mat3 kx;
  kx << 0, -k.z(), k.y(), k.z(), 0, -k.x(), -k.y(), k.x(), 0;
  return Mat3::Identity() + std::sin(th) * kx + (1 - std::cos(th)) * kx * kx;
}

/// Rotation angle between two rotation matrices.
inline double angle_between(const Mat3& a, const Mat3& b) {
  const double c = std::clamp(((a.transpose() * b).trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

inline asymdex::geom::Quat random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return asymdex::geom::canonical({g(rng), g(rng), g(rng), g(rng)});
}

inline asymdex::geom::Pose random_pose(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {{u(rng), u(rng), u(rng)}, random_quat(rng)};
}

/// A_t = sum_l (gamma lambda)^l delta_{t+l}, truncated at the first done at or after t.
/// Single environment; values has T + 1 entries.
inline std::vector<double> brute_force_gae(const std::vector<double>& r, const std::vector<double>& v,
                                           const std::vector<double>& done, double gamma, double lambda) {
  const std::size_t T = r.size();
  std::vector<double> delta(T), adv(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) delta[t] = r[t] + gamma * v[t + 1] * (1.0 - done[t]) - v[t];
  for (std::size_t t = 0; t < T; ++t) {
    double acc = 0.0, w = 1.0;
    for (std::size_t l = t; l < T; ++l) {
      acc += w * delta[l];
      if (done[l] != 0.0) break;
      w *= gamma * lambda;
    }
    adv[t] = acc;
  }
  return adv;
}

/// Dense MLP forward with ELU hidden layers, written against the documented
/// flat parameter layout (per layer: W out x in row-major, then b).
inline std::vector<double> mlp_forward(const std::vector<int>& sizes, const std::vector<double>& params,
                                       const std::vector<double>& x) {
  Eigen::VectorXd h = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<long>(x.size()));
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int in = sizes[l], out = sizes[l + 1];
    Eigen::MatrixXd W(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) W(i, j) = params[off + static_cast<std::size_t>(i * in + j)];
    off += static_cast<std::size_t>(in * out);
    Eigen::VectorXd b(out);
    for (int i = 0; i < out; ++i) b(i) = params[off + static_cast<std::size_t>(i)];
    off += static_cast<std::size_t>(out);
    Eigen::VectorXd z = W * h + b;
    if (l + 2 < sizes.size())
      for (int i = 0; i < out; ++i) z(i) = z(i) > 0 ? z(i) : std::expm1(z(i));
    h = z;
  }
  return {h.data(), h.data() + h.size()};
}

/// Central finite difference of f at x along coordinate i.
template <class F>
double central_diff(F&& f, std::vector<double>& x, std::size_t i, double h) {
  const double x0 = x[i];
  x[i] = x0 + h;
  const double fp = f();
  x[i] = x0 - h;
  const double fm = f();
  x[i] = x0;
  return (fp - fm) / (2.0 * h);
}

/// Relative error with a floor on the denominator for near-zero gradients.
inline double rel_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Applies one rigid world transform to every absolute pose and velocity of a state.
inline asymdex::sim::EnvState transform_state(const asymdex::sim::EnvState& s, const asymdex::geom::Pose& T) {
  using namespace asymdex;
  sim::EnvState out = s;
  for (auto& h : out.hands) h.base = geom::compose(T, h.base);
  for (auto& o : out.objects) {
    o.pose = geom::compose(T, o.pose);
    o.lin_vel = geom::rotate(T.orient, o.lin_vel);
    o.ang_vel = geom::rotate(T.orient, o.ang_vel);
  }
  return out;
}

}  // namespace oracle
