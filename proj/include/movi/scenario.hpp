#pragma once

// Synthetic hand-object recordings with closed-form ground truth: picking up
// an object, tossing it, and drawing with it.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "movi/error.hpp"
#include "movi/geometry.hpp"
#include "movi/kinematics.hpp"
#include "movi/recording.hpp"

namespace movi {

enum class ScenarioKind { pickup, toss, draw };

constexpr std::string_view to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::pickup: return "pickup";
    case ScenarioKind::toss: return "toss";
    case ScenarioKind::draw: return "draw";
  }
  return "pickup";
}

inline std::optional<ScenarioKind> parse_scenario_kind(std::string_view s) {
  if (s == "pickup") return ScenarioKind::pickup;
  if (s == "toss") return ScenarioKind::toss;
  if (s == "draw") return ScenarioKind::draw;
  return std::nullopt;
}

constexpr double default_duration(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::pickup: return 3.0;
    case ScenarioKind::toss: return 1.5;
    case ScenarioKind::draw: return 4.0;
  }
  return 3.0;
}

inline constexpr double kGravity = 9.81;
inline constexpr Vec3 kGravityVector{0.0, -kGravity, 0.0};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::pickup;
  double rate = 90.0;
  double duration = default_duration(ScenarioKind::pickup);
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;

  static ScenarioSpec with_defaults(ScenarioKind kind) {
    ScenarioSpec s;
    s.kind = kind;
    s.duration = default_duration(kind);
    return s;
  }
};

struct TossParams {
  Vec3 release_velocity{1.0, 3.0, 0.0};
  double release_time = 0.5;
  /// Hand decelerates to rest over this long after letting go.
  double follow_through = 0.3;
  /// Object spin about its local x axis during flight, rad/s.
  double spin_rate = 6.0;
};

/// Object pose in the holding hand's frame for the pickup and toss clips.
inline RigidTransform default_grip() {
  return {{0.0, -0.05, 0.09}, Quat::from_axis_angle({1.0, 0.0, 0.0}, 0.2)};
}

/// Pen pose in the drawing hand's frame: 10 cm ahead along the hand's +Z.
inline RigidTransform pen_grip() { return {{0.0, 0.0, 0.1}, Quat::identity()}; }

namespace detail {

inline void check_spec(const ScenarioSpec& spec, ScenarioKind expected) {
  if (spec.kind != expected)
    throw Error(ErrorCode::bad_spec, "spec kind is " + std::string(to_string(spec.kind)) +
                                         ", expected " + std::string(to_string(expected)));
  if (!(spec.rate > 0.0) || !std::isfinite(spec.rate)) throw Error(ErrorCode::bad_spec, "rate must be > 0");
  if (!(spec.duration > 0.0) || !std::isfinite(spec.duration))
    throw Error(ErrorCode::bad_spec, "duration must be > 0");
  if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma))
    throw Error(ErrorCode::bad_spec, "noise_sigma must be >= 0");
  if (spec.duration * spec.rate < 1.0)
    throw Error(ErrorCode::bad_spec, "duration too short for at least 2 samples");
}

/// k / rate for k = 0, 1, ... up to `duration`, which is always the last time.
inline std::vector<double> sample_times(double rate, double duration) {
  std::vector<double> times;
  const double snap = 1e-9 / rate;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / rate;
    if (t >= duration - snap) break;
    times.push_back(t);
  }
  times.push_back(duration);
  return times;
}

inline double smoothstep(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

inline Pose to_pose(double t, const RigidTransform& x) { return {t, x.position, x.orientation}; }

inline void add_noise(MotionRecording& rec, const ScenarioSpec& spec) {
  if (spec.noise_sigma == 0.0) return;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma);
  for (auto& track : rec.tracks)
    for (auto& s : track.samples) s.position += Vec3{noise(rng), noise(rng), noise(rng)};
}

inline MotionRecording finish(MotionRecording rec, const ScenarioSpec& spec) {
  rec.meta.source = "synthetic-" + std::string(to_string(spec.kind));
  rec.meta.rate_hz = spec.rate;
  sort_tracks(rec);
  add_noise(rec, spec);
  return rec;
}

}  // namespace detail

/// Approach (object at rest), grasp + lift (object rigidly follows the hand),
/// settle (hand holds the object while a small sway dies out). Phase start
/// times are stored as markers grasp_start and settle_start.
inline MotionRecording gen_pickup(const ScenarioSpec& spec) {
  detail::check_spec(spec, ScenarioKind::pickup);
  const double grasp_start = 0.4 * spec.duration;
  const double settle_start = 0.75 * spec.duration;

  const RigidTransform grip = default_grip();
  const RigidTransform object_rest{{0.35, 0.80, 0.30}, Quat::identity()};
  const RigidTransform hand_grasp = compose(object_rest, inverse(grip));
  const RigidTransform hand_start{{0.15, 1.00, 0.05}, Quat::from_axis_angle({0.0, 1.0, 0.0}, -0.4)};
  const Vec3 arc_control = lerp(hand_start.position, hand_grasp.position, 0.5) + Vec3{0.0, 0.15, 0.0};
  const Vec3 lift{0.0, 0.25, -0.10};
  const double lift_turn = 0.3;

  auto lifted = [&](double s) {
    const Quat turn = Quat::from_axis_angle({0.0, 1.0, 0.0}, lift_turn * s);
    return RigidTransform{hand_grasp.position + lift * s, turn * hand_grasp.orientation};
  };

  EntityTrack hand{"right_hand", EntityKind::hand, {}};
  EntityTrack idle{"left_hand", EntityKind::hand, {}};
  EntityTrack object{"object:cup", EntityKind::object, {}};
  const RigidTransform idle_pose{{-0.25, 0.90, 0.10}, Quat::from_axis_angle({0.0, 0.0, 1.0}, 0.1)};

  for (double t : detail::sample_times(spec.rate, spec.duration)) {
    RigidTransform h;
    if (t < grasp_start) {
      const double s = detail::smoothstep(t / grasp_start);
      // Quadratic Bezier arc over the table.
      const Vec3 p = (1 - s) * (1 - s) * hand_start.position + 2 * (1 - s) * s * arc_control +
                     s * s * hand_grasp.position;
      h = {p, slerp(hand_start.orientation, hand_grasp.orientation, s)};
      object.samples.push_back(detail::to_pose(t, object_rest));
    } else {
      if (t < settle_start) {
        h = lifted(detail::smoothstep((t - grasp_start) / (settle_start - grasp_start)));
      } else {
        const double tau = t - settle_start;
        h = lifted(1.0);
        h.position.y += 0.01 * std::exp(-4.0 * tau) * std::sin(12.0 * tau);
      }
      object.samples.push_back(detail::to_pose(t, compose(h, grip)));
    }
    hand.samples.push_back(detail::to_pose(t, h));
    idle.samples.push_back(detail::to_pose(t, idle_pose));
  }

  MotionRecording rec;
  rec.tracks = {std::move(hand), std::move(idle), std::move(object)};
  rec.meta.markers = {{"grasp_start", grasp_start}, {"settle_start", settle_start}};
  return detail::finish(std::move(rec), spec);
}

/// The hand accelerates uniformly from rest and lets go at release_time with
/// the object moving at release_velocity; the object then flies ballistically
/// under g = (0, -9.81, 0). Release time, position and velocity are stored
/// as markers.
inline MotionRecording gen_toss(const ScenarioSpec& spec, const TossParams& params = {}) {
  detail::check_spec(spec, ScenarioKind::toss);
  const double tr = params.release_time;
  if (!(tr > 0.0) || !(tr < spec.duration))
    throw Error(ErrorCode::bad_spec, "release time must lie inside the clip");
  if (!(params.follow_through > 0.0)) throw Error(ErrorCode::bad_spec, "follow_through must be > 0");

  const Vec3 v0 = params.release_velocity;
  const Vec3 accel = v0 / tr;
  const RigidTransform grip = default_grip();
  const Vec3 hand_start{0.0, 1.0, 0.3};
  const Quat hand_q = Quat::from_axis_angle({1.0, 0.0, 0.0}, -0.3);
  const Vec3 hand_release = hand_start + 0.5 * tr * tr * accel;
  const RigidTransform object_release = compose({hand_release, hand_q}, grip);
  const Vec3 p0 = object_release.position;

  EntityTrack hand{"right_hand", EntityKind::hand, {}};
  EntityTrack ball{"object:ball", EntityKind::object, {}};
  for (double t : detail::sample_times(spec.rate, spec.duration)) {
    if (t <= tr) {
      const RigidTransform h{hand_start + 0.5 * t * t * accel, hand_q};
      hand.samples.push_back(detail::to_pose(t, h));
      ball.samples.push_back(detail::to_pose(t, compose(h, grip)));
      continue;
    }
    const double tau = t - tr;
    const double tf = std::min(tau, params.follow_through);
    const Vec3 hp = hand_release + v0 * (tf - tf * tf / (2.0 * params.follow_through));
    hand.samples.push_back({t, hp, hand_q});

    const Vec3 bp = p0 + v0 * tau + 0.5 * tau * tau * kGravityVector;
    const Quat spin = Quat::from_axis_angle({1.0, 0.0, 0.0}, params.spin_rate * tau);
    ball.samples.push_back({t, bp, object_release.orientation * spin});
  }

  MotionRecording rec;
  rec.tracks = {std::move(hand), std::move(ball)};
  rec.meta.markers = {{"release_time", tr},   {"release_px", p0.x}, {"release_py", p0.y},
                      {"release_pz", p0.z},   {"release_vx", v0.x}, {"release_vy", v0.y},
                      {"release_vz", v0.z}};
  return detail::finish(std::move(rec), spec);
}

struct DrawParams {
  Vec3 center{0.0, 1.2, 0.45};
  double amplitude_x = 0.15;
  double amplitude_y = 0.10;
  int freq_x = 3;
  int freq_y = 2;
};

/// The pen traces a closed 3:2 Lissajous figure on the vertical plane
/// z = center.z over exactly one period; the hand holds it with a constant
/// grip and both point along the direction of travel.
inline MotionRecording gen_draw(const ScenarioSpec& spec, const DrawParams& params = {}) {
  detail::check_spec(spec, ScenarioKind::draw);
  const double omega = 2.0 * std::numbers::pi / spec.duration;
  const double ax = params.freq_x * omega, ay = params.freq_y * omega;
  const RigidTransform grip = pen_grip();
  const RigidTransform grip_inv = inverse(grip);
  const Quat z_to_x = Quat::from_axis_angle({0.0, 1.0, 0.0}, std::numbers::pi / 2);

  EntityTrack hand{"right_hand", EntityKind::hand, {}};
  EntityTrack pen{"object:pen", EntityKind::object, {}};
  std::optional<double> heading;
  for (double t : detail::sample_times(spec.rate, spec.duration)) {
    // x uses a quarter-period phase so the velocity never vanishes.
    const Vec3 p{params.center.x + params.amplitude_x * std::cos(ax * t),
                 params.center.y + params.amplitude_y * std::sin(ay * t), params.center.z};
    const double dx = -params.amplitude_x * ax * std::sin(ax * t);
    const double dy = params.amplitude_y * ay * std::cos(ay * t);
    const double raw = std::atan2(dy, dx);
    if (!heading) {
      heading = raw;
    } else {
      // Unwrap so consecutive orientations stay on the same quaternion branch.
      *heading += std::remainder(raw - *heading, 2.0 * std::numbers::pi);
    }
    const Quat q = Quat::from_axis_angle({0.0, 0.0, 1.0}, *heading) * z_to_x;
    const RigidTransform pen_pose{p, q};
    pen.samples.push_back(detail::to_pose(t, pen_pose));
    hand.samples.push_back(detail::to_pose(t, compose(pen_pose, grip_inv)));
  }

  MotionRecording rec;
  rec.tracks = {std::move(hand), std::move(pen)};
  rec.meta.markers = {{"plane_z", params.center.z}};
  return detail::finish(std::move(rec), spec);
}

inline MotionRecording generate(const ScenarioSpec& spec) {
  switch (spec.kind) {
    case ScenarioKind::pickup: return gen_pickup(spec);
    case ScenarioKind::toss: return gen_toss(spec);
    case ScenarioKind::draw: return gen_draw(spec);
  }
  throw Error(ErrorCode::bad_spec, "unknown scenario kind");
}

}  // namespace movi
