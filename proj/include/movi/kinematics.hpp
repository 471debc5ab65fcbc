#pragma once

// Numerical processing of pose tracks: slerp, resampling, density
// down-sampling, smoothing and derived kinematics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "movi/error.hpp"
#include "movi/geometry.hpp"
#include "movi/recording.hpp"

namespace movi {

/// Fraction of samples to keep for display, in (0, 1].
class DensityFactor {
 public:
  explicit DensityFactor(double d = 1.0) : value_(d) {
    if (!(d > 0.0 && d <= 1.0))
      throw Error(ErrorCode::bad_density, "density must be in (0, 1], got " + detail::format_double(d));
  }

  double value() const noexcept { return value_; }

  /// max(1, round(1/d))
  std::size_t stride() const noexcept {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(1.0 / value_)));
  }

  friend bool operator==(const DensityFactor&, const DensityFactor&) = default;

 private:
  double value_;
};

struct KinematicSample {
  Pose pose;
  Vec3 velocity;
  double speed = 0.0;
  Vec3 forward;
};

/// Geodesic distance between the rotations' unit quaternions on S3, measured
/// after choosing the closer of q1 / -q1. Uses the atan2 form, which stays
/// accurate for nearly equal inputs where acos(dot) loses half the digits.
inline double quat_arc(const Quat& q0, Quat q1) {
  if (dot(q0, q1) < 0.0) q1 = negated(q1);
  const double dx = q0.x - q1.x, dy = q0.y - q1.y, dz = q0.z - q1.z, dw = q0.w - q1.w;
  const double sx = q0.x + q1.x, sy = q0.y + q1.y, sz = q0.z + q1.z, sw = q0.w + q1.w;
  const double diff = std::sqrt(dx * dx + dy * dy + dz * dz + dw * dw);
  const double sum = std::sqrt(sx * sx + sy * sy + sz * sz + sw * sw);
  return 2.0 * std::atan2(diff, sum);
}

/// Spherical linear interpolation along the shorter arc. u = 0 and u = 1
/// return the inputs exactly (q1 sign-flipped if it was in the far hemisphere).
inline Quat slerp(const Quat& q0, const Quat& q1_in, double u) {
  Quat q1 = q1_in;
  if (dot(q0, q1) < 0.0) q1 = negated(q1);
  if (u <= 0.0) return q0;
  if (u >= 1.0) return q1;

  const double theta = quat_arc(q0, q1);
  if (theta < 1e-12) {
    return normalized({q0.x + (q1.x - q0.x) * u, q0.y + (q1.y - q0.y) * u,
                       q0.z + (q1.z - q0.z) * u, q0.w + (q1.w - q0.w) * u});
  }
  const double s = std::sin(theta);
  const double a = std::sin((1.0 - u) * theta) / s;
  const double b = std::sin(u * theta) / s;
  return normalized({a * q0.x + b * q1.x, a * q0.y + b * q1.y, a * q0.z + b * q1.z,
                     a * q0.w + b * q1.w});
}

/// Local +Z axis of the orientation, in world coordinates.
inline Vec3 rotate_forward(const Quat& q_in) {
  const Quat q = normalized(q_in);
  const Vec3 f{2.0 * (q.x * q.z + q.w * q.y), 2.0 * (q.y * q.z - q.w * q.x),
               1.0 - 2.0 * (q.x * q.x + q.y * q.y)};
  return f / norm(f);
}

/// Pose at time t between two bracketing samples.
inline Pose interpolate(const Pose& a, const Pose& b, double t) {
  if (t <= a.t) return a;
  if (t >= b.t) return b;
  const double u = (t - a.t) / (b.t - a.t);
  return {t, lerp(a.position, b.position, u), slerp(a.orientation, b.orientation, u)};
}

/// Resamples onto t0 + k/rate, k = 0, 1, ..., ending exactly at the last
/// original timestamp (appended if the grid does not land on it).
inline EntityTrack resample_track(const EntityTrack& track, double rate) {
  if (track.samples.size() < 2)
    throw Error(ErrorCode::too_few_samples, "resample needs at least 2 samples in " + track.entity_id);
  if (!(rate > 0.0) || !std::isfinite(rate))
    throw Error(ErrorCode::bad_spec, "resample rate must be positive");

  const auto& src = track.samples;
  const double t0 = src.front().t;
  const double t_end = src.back().t;
  // Grid points this close to the end are treated as the end itself.
  const double snap = 1e-9 / rate;

  EntityTrack out{track.entity_id, track.kind, {}};
  out.samples.push_back(src.front());
  std::size_t seg = 0;
  for (std::size_t k = 1;; ++k) {
    const double t = t0 + static_cast<double>(k) / rate;
    if (t >= t_end - snap) break;
    while (src[seg + 1].t < t) ++seg;
    out.samples.push_back(interpolate(src[seg], src[seg + 1], t));
  }
  out.samples.push_back(src.back());
  return out;
}

/// Keeps every stride-th sample starting at index 0, plus the final sample.
inline EntityTrack downsample(const EntityTrack& track, DensityFactor d) {
  EntityTrack out{track.entity_id, track.kind, {}};
  const std::size_t n = track.samples.size();
  if (n == 0) return out;
  const std::size_t stride = d.stride();
  out.samples.reserve(n / stride + 2);
  for (std::size_t i = 0; i < n; i += stride) out.samples.push_back(track.samples[i]);
  if ((n - 1) % stride != 0) out.samples.push_back(track.samples.back());
  return out;
}

/// Number of samples downsample() keeps from an n-sample track.
inline std::size_t downsampled_count(std::size_t n, DensityFactor d) {
  if (n == 0) return 0;
  const std::size_t stride = d.stride();
  return (n - 1) / stride + 1 + ((n - 1) % stride != 0 ? 1 : 0);
}

/// Centered moving average of positions; the window is truncated at the ends.
inline EntityTrack smooth_positions(const EntityTrack& track, int window) {
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorCode::bad_window, "window must be odd and >= 1, got " + std::to_string(window));
  EntityTrack out = track;
  if (window == 1) return out;

  const auto& src = track.samples;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(src.size());
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    Vec3 sum;
    for (std::ptrdiff_t j = lo; j <= hi; ++j) sum += src[j].position;
    out.samples[i].position = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

/// Velocity by central differences (one-sided at the ends), speed, and the
/// forward axis of each pose.
inline std::vector<KinematicSample> derive_kinematics(const EntityTrack& track) {
  const auto& s = track.samples;
  if (s.size() < 2)
    throw Error(ErrorCode::too_few_samples, "kinematics need at least 2 samples in " + track.entity_id);
  const std::size_t n = s.size();
  std::vector<KinematicSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = i + 1 == n ? n - 1 : i + 1;
    const Vec3 v = (s[hi].position - s[lo].position) / (s[hi].t - s[lo].t);
    out[i] = {s[i], v, norm(v), rotate_forward(s[i].orientation)};
  }
  return out;
}

}  // namespace movi
