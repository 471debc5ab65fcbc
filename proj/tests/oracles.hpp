#pragma once

// Test-only reference computations. Nothing here calls into the library's
// quaternion or kinematics code, so the suites can check the library against
// an independent route (rotation matrices, Rodrigues' formula, brute force).

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "movi/recording.hpp"

namespace oracle {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Rotation matrix of a unit quaternion (x, y, z, w), textbook form.
inline Mat3 matrix_from_quat(double x, double y, double z, double w) {
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

/// Rodrigues' rotation formula for a unit axis.
inline Mat3 matrix_from_axis_angle(std::array<double, 3> k, double angle) {
  const double n = std::sqrt(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
  for (auto& c : k) c /= n;
  const double c = std::cos(angle), s = std::sin(angle), v = 1 - c;
  return {{{c + k[0] * k[0] * v, k[0] * k[1] * v - k[2] * s, k[0] * k[2] * v + k[1] * s},
           {k[1] * k[0] * v + k[2] * s, c + k[1] * k[1] * v, k[1] * k[2] * v - k[0] * s},
           {k[2] * k[0] * v - k[1] * s, k[2] * k[1] * v + k[0] * s, c + k[2] * k[2] * v}}};
}

/// Quaternion (x, y, z, w) with w >= 0 from a rotation matrix (Shepperd).
inline std::array<double, 4> quat_from_matrix(const Mat3& m) {
  const double tr = m[0][0] + m[1][1] + m[2][2];
  std::array<double, 4> q{};
  if (tr > 0) {
    const double s = std::sqrt(tr + 1.0) * 2;
    q = {(m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s, 0.25 * s};
  } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
    const double s = std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2;
    q = {0.25 * s, (m[0][1] + m[1][0]) / s, (m[0][2] + m[2][0]) / s, (m[2][1] - m[1][2]) / s};
  } else if (m[1][1] > m[2][2]) {
    const double s = std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2;
    q = {(m[0][1] + m[1][0]) / s, 0.25 * s, (m[1][2] + m[2][1]) / s, (m[0][2] - m[2][0]) / s};
  } else {
    const double s = std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2;
    q = {(m[0][2] + m[2][0]) / s, (m[1][2] + m[2][1]) / s, 0.25 * s, (m[1][0] - m[0][1]) / s};
  }
  if (q[3] < 0)
    for (auto& c : q) c = -c;
  return q;
}

/// Third column of the rotation matrix: where local +Z ends up.
inline std::array<double, 3> forward_from_matrix(const Mat3& m) { return {m[0][2], m[1][2], m[2][2]}; }

/// Great-circle angle between two unit 4-vectors after picking the nearer
/// sign, 2*atan2(|a-b|, |a+b|).
inline double sphere_angle(std::array<double, 4> a, std::array<double, 4> b) {
  double d = 0;
  for (int i = 0; i < 4; ++i) d += a[i] * b[i];
  if (d < 0)
    for (auto& c : b) c = -c;
  double diff = 0, sum = 0;
  for (int i = 0; i < 4; ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    sum += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return 2 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

/// Uniform random unit quaternion (Shoemake).
inline std::array<double, 4> random_unit_quat(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
  const double a = std::sqrt(1 - u1), b = std::sqrt(u1);
  const double pi2 = 2 * 3.14159265358979323846;
  return {a * std::sin(pi2 * u2), a * std::cos(pi2 * u2), b * std::sin(pi2 * u3), b * std::cos(pi2 * u3)};
}

/// Indices kept by stride down-sampling, enumerated one by one.
inline std::vector<std::size_t> kept_indices(std::size_t n, double d) {
  const std::size_t stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / d)));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (i % stride == 0) out.push_back(i);
  if (n > 0 && out.back() != n - 1) out.push_back(n - 1);
  return out;
}

/// Edge-truncated centered moving average, written out directly.
inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
  const int h = window / 2, n = static_cast<int>(x.size());
  std::vector<double> out(x.size());
  for (int i = 0; i < n; ++i) {
    double sum = 0;
    int count = 0;
    for (int j = i - h; j <= i + h; ++j) {
      if (j < 0 || j >= n) continue;
      sum += x[j];
      ++count;
    }
    out[i] = sum / count;
  }
  return out;
}

/// Ballistic flight integrated with velocity Verlet (exact for constant
/// acceleration up to rounding); returns (time of apex, height gain).
inline std::pair<double, double> integrate_apex(double vy, double g, double h = 1e-6) {
  double t = 0, y = 0, v = vy;
  while (true) {
    const double v_next = v - g * h;
    if (v_next <= 0) {
      // Finish the step to the exact zero of v inside it.
      const double dt = v / g;
      return {t + dt, y + v * dt - 0.5 * g * dt * dt};
    }
    y += v * h - 0.5 * g * h * h;
    v = v_next;
    t += h;
  }
}

inline const std::vector<std::string> kEntityPool = {"left_hand", "object:ball", "object:cup", "object:pen",
                                                     "right_hand"};

/// Random recording satisfying every invariant, tracks in canonical order.
inline movi::MotionRecording random_recording(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> exponent(-6, 3);
  auto wide = [&] { return (unit(rng) * 2 - 1) * std::pow(10.0, exponent(rng)); };

  movi::MotionRecording rec;
  std::vector<std::string> ids = kEntityPool;
  std::shuffle(ids.begin(), ids.end(), rng);
  const int tracks = std::uniform_int_distribution<int>(1, 3)(rng);
  ids.resize(tracks);
  std::sort(ids.begin(), ids.end());

  for (const auto& id : ids) {
    movi::EntityTrack track{id, id.starts_with("object:") ? movi::EntityKind::object : movi::EntityKind::hand, {}};
    const int n = std::uniform_int_distribution<int>(1, 25)(rng);
    double t = unit(rng) < 0.3 ? 0.0 : unit(rng) * 5;
    for (int k = 0; k < n; ++k) {
      const auto q = random_unit_quat(rng);
      track.samples.push_back({t, {wide(), wide(), wide()}, {q[0], q[1], q[2], q[3]}});
      t += unit(rng) < 0.5 ? 1.0 / 90.0 : (unit(rng) + 1e-3) * std::pow(10.0, exponent(rng) % 2);
    }
    rec.tracks.push_back(std::move(track));
  }

  static const std::string label_chars = "abcXYZ019 _-,.:;=#/";
  const int len = std::uniform_int_distribution<int>(0, 12)(rng);
  for (int i = 0; i < len; ++i)
    rec.meta.source += label_chars[std::uniform_int_distribution<std::size_t>(0, label_chars.size() - 1)(rng)];
  rec.meta.rate_hz = unit(rng) < 0.5 ? 90.0 : unit(rng) * 240;
  if (unit(rng) < 0.5) rec.meta.markers["release_time"] = unit(rng);
  if (unit(rng) < 0.3) rec.meta.markers["grasp_start"] = wide();
  return rec;
}

}  // namespace oracle
