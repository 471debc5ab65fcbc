#pragma once

#include <array>
#include <cmath>

namespace movi {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  friend constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
  friend constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
  friend constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
  friend constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
  friend constexpr Vec3 operator/(Vec3 a, double s) { return a *= (1.0 / s); }
  friend constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
};

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::hypot(v.x, v.y, v.z); }
constexpr Vec3 lerp(const Vec3& a, const Vec3& b, double u) { return a + (b - a) * u; }

/// Rotation quaternion stored in (x, y, z, w) order, matching the recording
/// CSV column order. Hamilton convention: v' = q v q*.
struct Quat {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double w = 1.0;

  static constexpr Quat identity() { return {0.0, 0.0, 0.0, 1.0}; }

  static Quat from_axis_angle(const Vec3& axis, double angle) {
    const double n = norm(axis);
    const double s = std::sin(0.5 * angle) / n;
    return {axis.x * s, axis.y * s, axis.z * s, std::cos(0.5 * angle)};
  }

  friend constexpr bool operator==(const Quat&, const Quat&) = default;
};

constexpr double dot(const Quat& a, const Quat& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z + a.w * b.w;
}

inline double norm(const Quat& q) {
  return std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z + q.w * q.w);
}

inline Quat normalized(const Quat& q) {
  const double n = norm(q);
  return {q.x / n, q.y / n, q.z / n, q.w / n};
}

constexpr Quat conjugate(const Quat& q) { return {-q.x, -q.y, -q.z, q.w}; }
constexpr Quat negated(const Quat& q) { return {-q.x, -q.y, -q.z, -q.w}; }

constexpr Quat operator*(const Quat& a, const Quat& b) {
  return {
      a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
      a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
      a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
      a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
  };
}

/// Rotates v by unit quaternion q.
constexpr Vec3 rotate(const Quat& q, const Vec3& v) {
  // v + 2w (u x v) + 2 u x (u x v), u = vector part
  const Vec3 u{q.x, q.y, q.z};
  const Vec3 t = 2.0 * cross(u, v);
  return v + q.w * t + cross(u, t);
}

/// Rigid transform: position plus orientation.
struct RigidTransform {
  Vec3 position;
  Quat orientation;

  friend constexpr bool operator==(const RigidTransform&, const RigidTransform&) = default;
};

/// a * b: apply b in a's local frame.
constexpr RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {a.position + rotate(a.orientation, b.position), a.orientation * b.orientation};
}

constexpr RigidTransform inverse(const RigidTransform& a) {
  const Quat inv = conjugate(a.orientation);
  return {rotate(inv, -a.position), inv};
}

}  // namespace movi
