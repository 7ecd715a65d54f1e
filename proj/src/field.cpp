#include "vortexemf/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "vortexemf/errors.hpp"

namespace vemf {

namespace {

std::string describe(Vec2 p) {
  std::ostringstream s;
  s.precision(17);
  s << "(" << p.x << ", " << p.y << ")";
  return s.str();
}

}  // namespace

VortexConfig::VortexConfig(Domain domain, std::vector<Core> cores, double eps_core)
    : domain_(domain), cores_(std::move(cores)) {
  if (!(domain_.lx > 0.0) || !(domain_.ly > 0.0) || !std::isfinite(domain_.lx) ||
      !std::isfinite(domain_.ly)) {
    throw ValidationError("domain extents must be positive and finite");
  }
  eps_core_ = eps_core > 0.0 ? eps_core : 1e-6 * std::min(domain_.lx, domain_.ly);
  for (const Core& c : cores_) {
    if (c.winding % 2 == 0) {
      throw ValidationError("winding numbers must be odd, got " + std::to_string(c.winding));
    }
    if (!domain_.contains_strictly(c.position)) {
      throw ValidationError("core " + describe(c.position) + " is not strictly inside the domain");
    }
  }
  std::vector<std::size_t> order(cores_.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [this](std::size_t i) { return std::pair{cores_[i].position.x, cores_[i].position.y}; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (key(order[k]) == key(order[k - 1])) {
      throw ValidationError("two cores coincide at " + describe(cores_[order[k]].position));
    }
  }
  auto arrays = std::make_shared<simd::CoreArrays>();
  arrays->x.reserve(cores_.size());
  arrays->y.reserve(cores_.size());
  arrays->w.reserve(cores_.size());
  for (const Core& c : cores_) {
    arrays->x.push_back(c.position.x);
    arrays->y.push_back(c.position.y);
    arrays->w.push_back(static_cast<double>(c.winding));
  }
  arrays_ = std::move(arrays);
}

int VortexConfig::total_winding() const {
  int total = 0;
  for (const Core& c : cores_) total += c.winding;
  return total;
}

VortexConfig VortexConfig::with_flipped_windings() const {
  std::vector<Core> flipped(cores_);
  for (Core& c : flipped) c.winding = -c.winding;
  return VortexConfig(domain_, std::move(flipped), eps_core_);
}

VortexConfig VortexConfig::merged(const VortexConfig& other) const {
  if (other.domain_.lx != domain_.lx || other.domain_.ly != domain_.ly) {
    throw ValidationError("cannot merge configs on different domains");
  }
  std::vector<Core> all(cores_);
  all.insert(all.end(), other.cores_.begin(), other.cores_.end());
  return VortexConfig(domain_, std::move(all), std::min(eps_core_, other.eps_core_));
}

// ---------------------------------------------------------------------------

VectorField2D::VectorField2D(Evaluator evaluator, std::vector<Vec2> singular_points, double eps_core)
    : state_(std::make_shared<State>(
          State{std::move(evaluator), std::move(singular_points), eps_core, false})) {}

VectorField2D::VectorField2D(SelfChecked, Evaluator evaluator, std::vector<Vec2> singular_points,
                             double eps_core)
    : state_(std::make_shared<State>(
          State{std::move(evaluator), std::move(singular_points), eps_core, true})) {}

VectorField2D VectorField2D::zero() { return constant({0.0, 0.0}); }

VectorField2D VectorField2D::constant(Vec2 value) {
  return VectorField2D([value](Vec2) { return value; });
}

Vec2 VectorField2D::operator()(Vec2 p) const {
  if (!state_->self_checked && !state_->singular.empty()) {
    const double eps2 = state_->eps_core * state_->eps_core;
    for (const Vec2& s : state_->singular) {
      const Vec2 d = p - s;
      if (dot(d, d) <= eps2) {
        throw SingularEvaluation("field evaluated at " + describe(p) + " within eps_core of " +
                                 describe(s));
      }
    }
  }
  return state_->eval(p);
}

VectorField2D VectorField2D::scaled(double scale) const {
  // The inner field already guards its singular points.
  return VectorField2D(SelfChecked{}, [inner = *this, scale](Vec2 p) { return scale * inner(p); },
                       state_->singular, state_->eps_core);
}

VectorField2D operator+(const VectorField2D& a, const VectorField2D& b) {
  std::vector<Vec2> singular(a.singular_points().begin(), a.singular_points().end());
  singular.insert(singular.end(), b.singular_points().begin(), b.singular_points().end());
  return VectorField2D(VectorField2D::SelfChecked{}, [a, b](Vec2 p) { return a(p) + b(p); },
                       std::move(singular), std::max(a.eps_core(), b.eps_core()));
}

VectorField2D chi_gradient(const VortexConfig& config) {
  std::vector<Vec2> singular;
  singular.reserve(config.size());
  for (const Core& c : config.cores()) singular.push_back(c.position);
  const double eps2 = config.eps_core() * config.eps_core();
  auto arrays = config.arrays();
  const simd::KernelTable* kernels = &simd::active_kernels();
  return VectorField2D(
      VectorField2D::SelfChecked{},
      [arrays, eps2, kernels](Vec2 p) {
        const simd::GradientSample g = kernels->vortex_gradient(*arrays, p.x, p.y);
        if (g.min_r2 <= eps2) {
          throw SingularEvaluation("chi gradient evaluated within eps_core of a core at " +
                                   describe(p));
        }
        return Vec2{g.gx, g.gy};
      },
      std::move(singular), config.eps_core());
}

VectorField2D berry_connection_field(const VortexConfig& config) {
  return chi_gradient(config).scaled(-0.5);
}

VectorField2D velocity_field(const VectorField2D& a_em, const VectorField2D& a_mb,
                             const UnitSystem& units) {
  return a_em.scaled(units.e / units.m_e) + a_mb.scaled(units.hbar / units.m_e);
}

VectorField2D current_density(ScalarField2D rho, const VectorField2D& velocity,
                              const UnitSystem& units) {
  const double charge = units.e;
  std::vector<Vec2> singular(velocity.singular_points().begin(), velocity.singular_points().end());
  return VectorField2D(
      [rho = std::move(rho), velocity, charge](Vec2 p) {
        const double density = rho(p);
        if (!(density >= 0.0)) {
          throw InvalidDensity("negative density " + std::to_string(density) + " at " + describe(p));
        }
        if (density == 0.0) return Vec2{};
        return (-charge * density) * velocity(p);
      },
      std::move(singular), velocity.eps_core());
}

// ---------------------------------------------------------------------------
// Text formats

namespace {

/// Next non-empty, comment-stripped line split into tokens; false at EOF.
bool next_record(std::istream& in, std::vector<std::string>& tokens, int& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    tokens.clear();
    for (std::string t; fields >> t;) tokens.push_back(t);
    if (!tokens.empty()) return true;
  }
  return false;
}

double parse_double(const std::string& text, int line_no) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ParseError("line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& text, int line_no) {
  int value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + text + "'");
  }
  return value;
}

void expect_arity(const std::vector<std::string>& tokens, std::size_t n, int line_no) {
  if (tokens.size() != n) {
    throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(n) +
                     " fields, got " + std::to_string(tokens.size()));
  }
}

}  // namespace

VortexConfig read_vortex_config(std::istream& in) {
  std::vector<std::string> tokens;
  int line_no = 0;
  if (!next_record(in, tokens, line_no)) throw ParseError("vortex file: missing 'Lx Ly' header");
  expect_arity(tokens, 2, line_no);
  const Domain domain{parse_double(tokens[0], line_no), parse_double(tokens[1], line_no)};
  std::vector<Core> cores;
  while (next_record(in, tokens, line_no)) {
    expect_arity(tokens, 3, line_no);
    cores.push_back({{parse_double(tokens[0], line_no), parse_double(tokens[1], line_no)},
                     parse_int(tokens[2], line_no)});
  }
  return VortexConfig(domain, std::move(cores));
}

void write_vortex_config(std::ostream& out, const VortexConfig& config) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# Lx Ly\n" << config.domain().lx << ' ' << config.domain().ly << "\n# x y w\n";
  for (const Core& c : config.cores()) {
    out << c.position.x << ' ' << c.position.y << ' ' << c.winding << '\n';
  }
  out.precision(old_precision);
}

PolyLoop read_loop(std::istream& in) {
  std::vector<std::string> tokens;
  int line_no = 0;
  std::vector<Vec2> vertices;
  while (next_record(in, tokens, line_no)) {
    expect_arity(tokens, 2, line_no);
    vertices.push_back({parse_double(tokens[0], line_no), parse_double(tokens[1], line_no)});
  }
  return PolyLoop(std::move(vertices));
}

void write_loop(std::ostream& out, const PolyLoop& loop) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "# x y\n";
  for (const Vec2& v : loop.vertices()) out << v.x << ' ' << v.y << '\n';
  out.precision(old_precision);
}

std::string_view to_string(UnitMode mode) { return mode == UnitMode::si ? "si" : "natural"; }

UnitMode parse_unit_mode(std::string_view text) {
  if (text == "natural") return UnitMode::natural;
  if (text == "si") return UnitMode::si;
  throw ValidationError("unknown unit system '" + std::string(text) + "' (expected natural or si)");
}

}  // namespace vemf
