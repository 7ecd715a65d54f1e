#include "vortexemf/topology.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

#include "vortexemf/errors.hpp"

namespace vemf {

namespace {

// Gauss-Kronrod 7/15 nodes on [-1, 1] (non-negative half, descending).
constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd Kronrod nodes 1, 3, 5, 7.
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

class EdgeIntegrator {
 public:
  EdgeIntegrator(const VectorField2D& field, Vec2 a, Vec2 b, int max_depth)
      : field_(field), a_(a), d_(b - a), max_depth_(max_depth) {}

  double panel(double s0, double s1, double tol) const { return refine(s0, s1, tol, 0); }

 private:
  double f(double s) const { return dot(field_(a_ + s * d_), d_); }

  double refine(double s0, double s1, double tol, int depth) const {
    const double c = 0.5 * (s0 + s1);
    const double h = 0.5 * (s1 - s0);
    const double fc = f(c);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    double fmax = std::abs(fc);
    for (int k = 0; k < 7; ++k) {
      const double fl = f(c - h * kXgk[k]);
      const double fr = f(c + h * kXgk[k]);
      kronrod += kWgk[k] * (fl + fr);
      if (k % 2 == 1) gauss += kWg[k / 2] * (fl + fr);
      fmax = std::max({fmax, std::abs(fl), std::abs(fr)});
    }
    kronrod *= h;
    gauss *= h;
    const double diff = std::abs(kronrod - gauss);
    // Nodes are rounded to ulp(s), so a panel cannot resolve its integral
    // better than about |f| * ulp(s).
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                         (std::max(std::abs(s0), std::abs(s1)) + std::abs(h)) * fmax;
    if (diff <= std::max(tol, noise)) return kronrod;
    if (depth + 1 >= max_depth_) {
      throw QuadratureFailure("line integral did not reach tolerance at depth " +
                              std::to_string(max_depth_));
    }
    return refine(s0, c, 0.5 * tol, depth + 1) + refine(c, s1, 0.5 * tol, depth + 1);
  }

  const VectorField2D& field_;
  Vec2 a_;
  Vec2 d_;
  int max_depth_;
};

}  // namespace

double line_integral(const VectorField2D& field, const PolyLoop& loop, double tol) {
  return line_integral(field, loop, QuadratureOptions{tol});
}

double line_integral(const VectorField2D& field, const PolyLoop& loop,
                     const QuadratureOptions& options) {
  if (!(options.tol > 0.0)) throw ValidationError("quadrature tolerance must be positive");
  const double eps = field.eps_core();
  for (const Vec2& s : field.singular_points()) {
    if (loop.boundary_distance(s) <= eps) {
      throw SingularLoop("loop passes within eps_core of a singular point at (" +
                         std::to_string(s.x) + ", " + std::to_string(s.y) + ")");
    }
  }

  const double edge_tol = options.tol / static_cast<double>(loop.size());
  double total = 0.0;
  std::vector<double> breaks;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const auto [a, b] = loop.edge(i);
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    const double len = std::sqrt(len2);

    breaks.clear();
    for (int k = 0; k <= options.initial_panels; ++k) {
      breaks.push_back(static_cast<double>(k) / options.initial_panels);
    }
    // A singular point at distance r from the edge makes a peak of width r
    // at its foot. Grade the panels geometrically away from the foot so no
    // panel is longer than its distance to the peak; otherwise Simpson can
    // accept a panel squeezed between two peaks of opposite sign.
    for (const Vec2& s : field.singular_points()) {
      const double foot = std::clamp(dot(s - a, d) / len2, 0.0, 1.0);
      const double r = std::sqrt(segment_distance2(s, a, b)) / len;
      if (r >= 1.0 / 16.0) continue;
      if (foot > 0.0 && foot < 1.0) breaks.push_back(foot);
      for (double step = r; step < 1.0 / 8.0; step *= 2.0) {
        if (foot - step > 0.0) breaks.push_back(foot - step);
        if (foot + step < 1.0) breaks.push_back(foot + step);
      }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const EdgeIntegrator edge(field, a, b, options.max_depth);
    const double panel_tol = edge_tol / static_cast<double>(breaks.size() - 1);
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      total += edge.panel(breaks[k], breaks[k + 1], panel_tol);
    }
  }
  return total;
}

EnclosureCensus enclosure_census(const VortexConfig& config, const PolyLoop& loop) {
  const auto& arrays = *config.arrays();
  const std::size_t n = arrays.size();
  std::vector<double> vx, vy;
  vx.reserve(loop.size());
  vy.reserve(loop.size());
  for (const Vec2& v : loop.vertices()) {
    vx.push_back(v.x);
    vy.push_back(v.y);
  }
  EnclosureCensus out;
  out.inside.assign(n, 0);
  std::vector<std::uint8_t> near(n, 0);
  const double eps = config.eps_core();
  simd::active_kernels().polygon_parity(arrays.x, arrays.y, vx, vy, eps * eps, out.inside, near);

  int sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (near[j] != 0) {
      throw AmbiguousEnclosure("core " + std::to_string(j) + " at (" + std::to_string(arrays.x[j]) +
                               ", " + std::to_string(arrays.y[j]) +
                               ") lies within eps_core of the loop");
    }
    if (out.inside[j] == 0) continue;
    const int w = config.cores()[j].winding;
    sum += w;
    (w > 0 ? out.merons : out.antimerons) += 1;
  }
  out.winding = loop.orientation() * sum;
  return out;
}

int winding_number(const VortexConfig& config, const PolyLoop& loop) {
  return enclosure_census(config, loop).winding;
}

namespace {

QuantizationReport make_report(double numeric, double unit, long census_quantum) {
  QuantizationReport r;
  r.numeric_integral = numeric;
  r.quantum_unit = unit;
  r.nearest_quantum = std::lround(numeric / unit);
  r.deviation = std::abs(numeric - static_cast<double>(r.nearest_quantum) * unit);
  r.census_quantum = census_quantum;
  return r;
}

}  // namespace

QuantizationReport verify_quantization(const VortexConfig& config, const PolyLoop& loop, double tol) {
  const int w = winding_number(config, loop);
  const double numeric = line_integral(berry_connection_field(config), loop, tol);
  return make_report(numeric, std::numbers::pi, -w);
}

QuantizationReport verify_winding(const VortexConfig& config, const PolyLoop& loop, double tol) {
  const int w = winding_number(config, loop);
  const double numeric = line_integral(chi_gradient(config), loop, tol);
  return make_report(numeric, 2.0 * std::numbers::pi, w);
}

}  // namespace vemf
