#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace vemf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 3D cross product of two in-plane vectors.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Squared distance from p to the closed segment [a, b].
double segment_distance2(Vec2 p, Vec2 a, Vec2 b);

/// Axis-aligned rectangle [0, lx] x [0, ly].
struct Domain {
  double lx = 1.0;
  double ly = 1.0;

  bool contains_strictly(Vec2 p) const { return p.x > 0.0 && p.x < lx && p.y > 0.0 && p.y < ly; }
};

/// Closed, simple polygon. Vertex order fixes the orientation
/// (counterclockwise positive). Validated on construction.
class PolyLoop {
 public:
  explicit PolyLoop(std::vector<Vec2> vertices);

  static PolyLoop rectangle(Vec2 lower_left, Vec2 upper_right);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  Vec2 vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  /// Edge i runs from vertex(i) to vertex(i + 1).
  std::pair<Vec2, Vec2> edge(std::size_t i) const { return {vertex(i), vertex(i + 1)}; }

  double signed_area() const { return signed_area_; }
  int orientation() const { return signed_area_ > 0.0 ? 1 : -1; }

  PolyLoop translated(Vec2 shift) const;
  PolyLoop reversed() const;

  /// Minimum distance from p to the boundary.
  double boundary_distance(Vec2 p) const;

  /// Even-odd ray casting; boundary points are not handled here.
  bool contains(Vec2 p) const;

  /// Triangle fan decomposition of the interior (ear clipping).
  std::vector<std::array<Vec2, 3>> triangulate() const;

 private:
  std::vector<Vec2> vertices_;
  double signed_area_ = 0.0;
};

}  // namespace vemf
