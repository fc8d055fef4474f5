#pragma once

#include <cmath>
#include <compare>

namespace axon {

// Coincidence tolerance for all "same point" tests, in model millimeters.
inline constexpr double kEpsilon = 1e-3;
inline constexpr double kPi = 3.14159265358979323846;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

// Same representation as Point3; used for displacements and directions.
using Vec3 = Point3;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Point3 operator-(Point3 a) { return {-a.x, -a.y, -a.z}; }
constexpr Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
constexpr Point3 operator*(Point3 a, double s) { return s * a; }

constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
constexpr Vec2 operator*(Vec2 a, double s) { return s * a; }

constexpr double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr Point3 cross(Point3 a, Point3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
inline double distance(Point3 a, Point3 b) { return norm(b - a); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

inline Point3 normalized(Point3 a) {
  const double n = norm(a);
  return n > 0.0 ? (1.0 / n) * a : a;
}
inline Vec2 normalized(Vec2 a) {
  const double n = norm(a);
  return n > 0.0 ? (1.0 / n) * a : a;
}

constexpr Point3 lerp(Point3 a, Point3 b, double t) { return a + t * (b - a); }
constexpr Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + t * (b - a); }

inline bool coincident(Point3 a, Point3 b, double eps = kEpsilon) { return distance(a, b) <= eps; }

inline bool is_finite(Point3 p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}
inline bool is_finite(Vec2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Angle between two nonzero vectors in radians, clamped against rounding.
inline double angle_between(Point3 a, Point3 b) {
  const double c = dot(a, b) / (norm(a) * norm(b));
  return std::acos(c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c));
}

// Parameter of the orthogonal projection of p onto the line a + t(b - a).
inline double project_parameter(Point3 a, Point3 b, Point3 p) {
  const Point3 d = b - a;
  const double len2 = dot(d, d);
  return len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
}

inline double point_segment_distance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot(p - a, d) / len2 : 0.0;
  t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
  return distance(a + t * d, p);
}

}  // namespace axon
