#include "vortexemf/geometry.hpp"

#include <algorithm>
#include <string>

#include "vortexemf/errors.hpp"

namespace vemf {

double segment_distance2(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double s = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  s = std::clamp(s, 0.0, 1.0);
  const Vec2 d = p - (a + s * ab);
  return dot(d, d);
}

namespace {

double polygon_signed_area(std::span<const Vec2> v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

int orient(Vec2 a, Vec2 b, Vec2 c) {
  const double v = cross(b - a, c - a);
  return (v > 0.0) - (v < 0.0);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

PolyLoop::PolyLoop(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw ValidationError("loop needs at least 3 vertices, got " + std::to_string(n));
  for (const Vec2& v : vertices_) {
    if (!std::isfinite(v.x) || !std::isfinite(v.y)) throw ValidationError("loop vertex is not finite");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (vertices_[i] == vertices_[j]) throw ValidationError("loop vertices must be distinct");
    }
  }
  // Non-adjacent edges must not touch.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1))) {
        throw ValidationError("loop is self-intersecting (edges " + std::to_string(i) + " and " +
                              std::to_string(j) + ")");
      }
    }
  }
  signed_area_ = polygon_signed_area(vertices_);
  if (signed_area_ == 0.0) throw ValidationError("loop has zero signed area");
}

PolyLoop PolyLoop::rectangle(Vec2 lo, Vec2 hi) {
  return PolyLoop({{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}});
}

PolyLoop PolyLoop::translated(Vec2 shift) const {
  std::vector<Vec2> v(vertices_);
  for (Vec2& p : v) p += shift;
  return PolyLoop(std::move(v));
}

PolyLoop PolyLoop::reversed() const {
  std::vector<Vec2> v(vertices_.rbegin(), vertices_.rend());
  return PolyLoop(std::move(v));
}

double PolyLoop::boundary_distance(Vec2 p) const {
  double best = INFINITY;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto [a, b] = edge(i);
    best = std::min(best, segment_distance2(p, a, b));
  }
  return std::sqrt(best);
}

bool PolyLoop::contains(Vec2 p) const {
  bool inside = false;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto [a, b] = edge(i);
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::vector<std::array<Vec2, 3>> PolyLoop::triangulate() const {
  std::vector<Vec2> ring(vertices_);
  if (signed_area_ < 0.0) std::reverse(ring.begin(), ring.end());
  std::vector<std::array<Vec2, 3>> out;
  out.reserve(ring.size() - 2);
  while (ring.size() > 3) {
    const std::size_t n = ring.size();
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2 a = ring[(i + n - 1) % n];
      const Vec2 b = ring[i];
      const Vec2 c = ring[(i + 1) % n];
      if (cross(b - a, c - b) <= 0.0) continue;  // reflex or degenerate
      bool ear = true;
      for (std::size_t k = 0; k < n && ear; ++k) {
        const Vec2 p = ring[k];
        if (p == a || p == b || p == c) continue;
        if (cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0) {
          ear = false;
        }
      }
      if (!ear) continue;
      out.push_back({a, b, c});
      ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(i));
      clipped = true;
      break;
    }
    if (!clipped) throw ComputationError("triangulation failed: no ear found");
  }
  out.push_back({ring[0], ring[1], ring[2]});
  return out;
}

}  // namespace vemf
