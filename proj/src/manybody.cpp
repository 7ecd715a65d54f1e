#include "vortexemf/manybody.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "parallel.hpp"
#include "vortexemf/errors.hpp"
#include "vortexemf/simd/kernels.hpp"

namespace vemf {

namespace {

double volume_element(const Grid& grid, int electrons) {
  return std::pow(grid.h * grid.h, electrons);
}

void check_grid(const Grid& grid, int electrons, int spin_dim) {
  if (electrons != 1 && electrons != 2) {
    throw ValidationError("electron count must be 1 or 2, got " + std::to_string(electrons));
  }
  if (spin_dim < 1) throw ValidationError("spin dimension must be at least 1");
  if (!(grid.h > 0.0) || !std::isfinite(grid.h)) throw ValidationError("grid spacing must be positive");
  const std::size_t cap = electrons == 1 ? kMaxGridOneElectron : kMaxGridTwoElectrons;
  if (grid.nx < 3 || grid.ny < 3 || grid.nx > cap || grid.ny > cap) {
    throw ValidationError("grid " + std::to_string(grid.nx) + "x" + std::to_string(grid.ny) +
                          " outside [3, " + std::to_string(cap) + "] for N=" + std::to_string(electrons));
  }
}

std::size_t amplitude_count(const Grid& grid, int electrons, int spin_dim) {
  const std::size_t one = grid.points() * static_cast<std::size_t>(spin_dim);
  return electrons == 1 ? one : one * one;
}

}  // namespace

GridWaveFunction::GridWaveFunction(Grid grid, int electrons, int spin_dim,
                                   std::vector<std::complex<double>> amplitudes)
    : grid_(grid), electrons_(electrons), spin_dim_(spin_dim), amplitudes_(std::move(amplitudes)) {
  check_grid(grid_, electrons_, spin_dim_);
  if (amplitudes_.size() != amplitude_count(grid_, electrons_, spin_dim_)) {
    throw ValidationError("expected " + std::to_string(amplitude_count(grid_, electrons_, spin_dim_)) +
                          " amplitudes, got " + std::to_string(amplitudes_.size()));
  }
  const double n = norm();
  if (!(std::abs(n - 1.0) <= 1e-10)) {
    throw ValidationError("wave function is not normalized (norm " + std::to_string(n) + ")");
  }
  if (electrons_ == 2) {
    const std::size_t one = grid_.points() * static_cast<std::size_t>(spin_dim_);
    double scale = 0.0;
    for (const auto& z : amplitudes_) scale = std::max(scale, std::abs(z));
    for (std::size_t a = 0; a < one; ++a) {
      for (std::size_t b = a; b < one; ++b) {
        if (std::abs(amplitudes_[a * one + b] + amplitudes_[b * one + a]) > 1e-12 * scale) {
          throw ValidationError("two-electron wave function is not antisymmetric");
        }
      }
    }
  }
}

GridWaveFunction GridWaveFunction::sample(const Grid& grid, int spin_dim, const Amplitude1& f) {
  check_grid(grid, 1, spin_dim);
  std::vector<std::complex<double>> a;
  a.reserve(amplitude_count(grid, 1, spin_dim));
  for (std::size_t r = 0; r < grid.points(); ++r) {
    for (int s = 0; s < spin_dim; ++s) a.push_back(f(grid.point(r), s));
  }
  const double n = simd::active_kernels().abs2_sum(a) * volume_element(grid, 1);
  if (!(n > 0.0)) throw ValidationError("sampled wave function vanishes identically");
  for (auto& z : a) z /= std::sqrt(n);
  return GridWaveFunction(grid, 1, spin_dim, std::move(a));
}

GridWaveFunction GridWaveFunction::sample(const Grid& grid, int spin_dim, const Amplitude2& f) {
  check_grid(grid, 2, spin_dim);
  std::vector<std::complex<double>> a;
  a.reserve(amplitude_count(grid, 2, spin_dim));
  for (std::size_t r1 = 0; r1 < grid.points(); ++r1) {
    for (int s1 = 0; s1 < spin_dim; ++s1) {
      for (std::size_t r2 = 0; r2 < grid.points(); ++r2) {
        for (int s2 = 0; s2 < spin_dim; ++s2) a.push_back(f(grid.point(r1), s1, grid.point(r2), s2));
      }
    }
  }
  const double n = simd::active_kernels().abs2_sum(a) * volume_element(grid, 2);
  if (!(n > 0.0)) throw ValidationError("sampled wave function vanishes identically");
  for (auto& z : a) z /= std::sqrt(n);
  return GridWaveFunction(grid, 2, spin_dim, std::move(a));
}

double GridWaveFunction::norm() const {
  return simd::active_kernels().abs2_sum(amplitudes_) * volume_element(grid_, electrons_);
}

std::size_t GridWaveFunction::block_size() const {
  const std::size_t s = static_cast<std::size_t>(spin_dim_);
  return electrons_ == 1 ? s : s * grid_.points() * s;
}

GridWaveFunction GridWaveFunction::with_phase(std::span<const std::complex<double>> phase) const {
  if (phase.size() != grid_.points()) {
    throw ValidationError("phase needs one sample per grid point (" + std::to_string(grid_.points()) + ")");
  }
  for (const auto& z : phase) {
    if (!(std::abs(std::abs(z) - 1.0) <= 1e-12)) throw ValidationError("phase samples must have unit modulus");
  }
  std::vector<std::complex<double>> a(amplitudes_);
  const std::size_t s = static_cast<std::size_t>(spin_dim_);
  const std::size_t one = grid_.points() * s;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (electrons_ == 1) {
      a[k] *= phase[k / s];
    } else {
      a[k] *= phase[(k / one) / s] * phase[(k % one) / s];
    }
  }
  return GridWaveFunction(grid_, electrons_, spin_dim_, std::move(a));
}

// ---------------------------------------------------------------------------

double ConnectionGrid::max_deviation(const std::function<Vec2(Vec2)>& reference,
                                     const std::function<bool(Vec2)>& keep) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < grid.points(); ++r) {
    if (masked[r] != 0) continue;
    const Vec2 p = grid.point(r);
    if (keep && !keep(p)) continue;
    worst = std::max(worst, norm(connection[r] - reference(p)));
  }
  return worst;
}

VectorField2D ConnectionGrid::as_field() const {
  auto self = std::make_shared<const ConnectionGrid>(*this);
  return VectorField2D([self](Vec2 p) {
    const Grid& g = self->grid;
    const double fx = (p.x - g.origin.x) / g.h;
    const double fy = (p.y - g.origin.y) / g.h;
    const double max_x = static_cast<double>(g.nx - 1), max_y = static_cast<double>(g.ny - 1);
    if (!(fx >= 0.0 && fx <= max_x && fy >= 0.0 && fy <= max_y)) {
      throw ComputationError("grid field evaluated outside its mesh");
    }
    const std::size_t i = std::min(static_cast<std::size_t>(fx), g.nx - 2);
    const std::size_t j = std::min(static_cast<std::size_t>(fy), g.ny - 2);
    const double tx = fx - static_cast<double>(i), ty = fy - static_cast<double>(j);
    const std::array<std::size_t, 4> idx{g.index(i, j), g.index(i + 1, j), g.index(i, j + 1),
                                         g.index(i + 1, j + 1)};
    for (std::size_t k : idx) {
      if (self->masked[k] != 0) throw DensityFloor("grid field evaluated next to a density-floor point");
    }
    const auto& c = self->connection;
    return (1 - tx) * (1 - ty) * c[idx[0]] + tx * (1 - ty) * c[idx[1]] + (1 - tx) * ty * c[idx[2]] +
           tx * ty * c[idx[3]];
  });
}

namespace {

/// Im sum conj(B(p)) dB/dq along one axis, as a linear combination of
/// neighbour overlaps. `stride` is the flat-index step, `pos`/`n` the
/// coordinate along the axis.
double axis_current(const GridWaveFunction& psi, const simd::KernelTable& k, std::size_t p,
                    std::size_t stride, std::size_t pos, std::size_t n) {
  const auto center = psi.block(p);
  auto overlap = [&](std::ptrdiff_t offset) {
    const auto q = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + offset * static_cast<std::ptrdiff_t>(stride));
    return k.im_conj_dot(center, psi.block(q));
  };
  const double two_h = 2.0 * psi.grid().h;
  if (pos == 0) return (4.0 * overlap(1) - overlap(2)) / two_h;  // (-3f0 + 4f1 - f2) / 2h
  if (pos + 1 == n) return (-4.0 * overlap(-1) + overlap(-2)) / two_h;
  return (overlap(1) - overlap(-1)) / two_h;
}

}  // namespace

ConnectionGrid berry_connection_mb(const GridWaveFunction& psi, double floor_ratio, unsigned workers) {
  const Grid& g = psi.grid();
  const simd::KernelTable& k = simd::active_kernels();
  ConnectionGrid out;
  out.grid = g;
  out.connection.assign(g.points(), Vec2{});
  out.density.assign(g.points(), 0.0);
  out.masked.assign(g.points(), 0);

  // Integration over the other electron contributes h^2 per point to both
  // the current and the density; it cancels in the ratio but keeps rho a
  // proper reduced density.
  const double measure = psi.electrons() == 2 ? g.h * g.h : 1.0;
  detail::parallel_for(g.points(), workers, [&](std::size_t p) {
    out.density[p] = k.abs2_sum(psi.block(p)) * measure;
  });
  const double rho_max = *std::max_element(out.density.begin(), out.density.end());
  out.density_floor = floor_ratio * rho_max;

  detail::parallel_for(g.points(), workers, [&](std::size_t p) {
    if (out.density[p] <= out.density_floor) {
      out.masked[p] = 1;
      return;
    }
    const std::size_t i = p % g.nx, j = p / g.nx;
    const double jx = axis_current(psi, k, p, 1, i, g.nx) * measure;
    const double jy = axis_current(psi, k, p, g.nx, j, g.ny) * measure;
    out.connection[p] = Vec2{jx, jy} * (1.0 / out.density[p]);
  });
  out.masked_count = static_cast<std::size_t>(std::count(out.masked.begin(), out.masked.end(), 1));
  return out;
}

FactorizationReport factorization_check(const GridWaveFunction& psi,
                                        std::span<const std::complex<double>> phase,
                                        double floor_ratio) {
  std::vector<std::complex<double>> inverse(phase.begin(), phase.end());
  for (auto& z : inverse) z = std::conj(z);
  const ConnectionGrid a = berry_connection_mb(psi.with_phase(inverse), floor_ratio);
  FactorizationReport r;
  r.masked_points = a.masked_count;
  r.evaluated_points = a.grid.points() - a.masked_count;
  r.residual = a.max_deviation([](Vec2) { return Vec2{}; });
  return r;
}

std::vector<std::complex<double>> phase_samples(const Grid& grid, const std::function<double(Vec2)>& chi) {
  std::vector<std::complex<double>> out(grid.points());
  for (std::size_t r = 0; r < grid.points(); ++r) out[r] = std::polar(1.0, -0.5 * chi(grid.point(r)));
  return out;
}

// ---------------------------------------------------------------------------

MixtureMember MixtureMember::from_state(const GridWaveFunction& psi, double probability,
                                        std::optional<double> energy) {
  return {berry_connection_mb(psi).as_field(), probability, energy};
}

MixtureEnsemble::MixtureEnsemble(std::vector<MixtureMember> members) : members_(std::move(members)) {
  if (members_.empty()) throw InvalidEnsemble("mixture needs at least one member");
  double total = 0.0;
  for (const auto& m : members_) {
    if (!(m.probability >= 0.0) || !std::isfinite(m.probability)) {
      throw InvalidEnsemble("mixture probabilities must be non-negative (got " +
                            std::to_string(m.probability) + ")");
    }
    total += m.probability;
  }
  if (!(std::abs(total - 1.0) <= 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "mixture probabilities must sum to 1 within 1e-12 (sum = " << total << ")";
    throw InvalidEnsemble(msg.str());
  }
}

VectorField2D mixture_connection(const MixtureEnsemble& ensemble) {
  std::vector<std::pair<VectorField2D, double>> terms;
  std::vector<Vec2> singular;
  double eps = 0.0;
  for (const auto& m : ensemble.members()) {
    terms.emplace_back(m.connection, m.probability);
    singular.insert(singular.end(), m.connection.singular_points().begin(), m.connection.singular_points().end());
    eps = std::max(eps, m.connection.eps_core());
  }
  return VectorField2D(
      [terms = std::move(terms)](Vec2 p) {
        Vec2 sum{};
        for (const auto& [field, prob] : terms) {
          if (prob != 0.0) sum += prob * field(p);
        }
        return sum;
      },
      std::move(singular), eps);
}

std::vector<double> boltzmann_weights(std::span<const double> energies, double temperature,
                                      const UnitSystem& units) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidTemperature("temperature must be positive and finite (got " + std::to_string(temperature) + ")");
  }
  if (energies.empty()) throw InvalidEnsemble("no energies supplied");
  double e_min = INFINITY;
  for (double e : energies) {
    if (std::isnan(e) || e == -INFINITY) throw InvalidEnsemble("energies must be finite or +inf");
    e_min = std::min(e_min, e);
  }
  if (!std::isfinite(e_min)) throw InvalidEnsemble("at least one energy must be finite");
  const double kt = units.k_b * temperature;
  std::vector<double> p(energies.size());
  double z = 0.0;
  for (std::size_t j = 0; j < energies.size(); ++j) {
    p[j] = std::exp(-(energies[j] - e_min) / kt);
    z += p[j];
  }
  for (double& x : p) x /= z;
  return p;
}

std::function<std::vector<double>(Vec2)> boltzmann_weights(std::vector<double> energies,
                                                           ScalarField2D temperature,
                                                           const UnitSystem& units) {
  return [energies = std::move(energies), temperature = std::move(temperature), units](Vec2 p) {
    return boltzmann_weights(energies, temperature(p), units);
  };
}

VectorField2D thermal_mixture_connection(std::vector<VectorField2D> connections,
                                         std::vector<double> energies, ScalarField2D temperature,
                                         const UnitSystem& units) {
  if (connections.size() != energies.size()) {
    throw InvalidEnsemble("one energy per connection required");
  }
  std::vector<Vec2> singular;
  double eps = 0.0;
  for (const auto& c : connections) {
    singular.insert(singular.end(), c.singular_points().begin(), c.singular_points().end());
    eps = std::max(eps, c.eps_core());
  }
  auto weights = boltzmann_weights(std::move(energies), std::move(temperature), units);
  return VectorField2D(
      [connections = std::move(connections), weights = std::move(weights)](Vec2 p) {
        const std::vector<double> w = weights(p);
        Vec2 sum{};
        for (std::size_t j = 0; j < connections.size(); ++j) sum += w[j] * connections[j](p);
        return sum;
      },
      std::move(singular), eps);
}

// ---------------------------------------------------------------------------
// Tensor files

namespace {

constexpr std::array<char, 8> kMagic{'V', 'E', 'M', 'F', 'W', 'F', '1', '\0'};

void put_u32(std::ostream& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xffu));
}
void put_f64(std::ostream& out, double d) {
  const auto v = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) out.put(static_cast<char>((v >> (8 * b)) & 0xffu));
}
std::uint64_t get_bytes(std::istream& in, int n) {
  std::uint64_t v = 0;
  for (int b = 0; b < n; ++b) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw ParseError("binary wave function: truncated file");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * b);
  }
  return v;
}

std::size_t expected_amplitudes(std::size_t nx, std::size_t ny, int n, int s) {
  if (n != 1 && n != 2) throw ParseError("wave function header: N must be 1 or 2");
  if (s < 1 || nx < 3 || ny < 3 || nx > kMaxGridOneElectron || ny > kMaxGridOneElectron) {
    throw ParseError("wave function header: bad dimensions");
  }
  const std::size_t one = nx * ny * static_cast<std::size_t>(s);
  return n == 1 ? one : one * one;
}

}  // namespace

GridWaveFunction read_wavefunction_text(std::istream& in) {
  std::string line;
  std::vector<double> values;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string tok;
    while (fields >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw ParseError("wave function line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      values.push_back(v);
    }
  }
  if (values.size() < 5) throw ParseError("wave function: missing 'nx ny N spin_dim h' header");
  auto as_count = [](double v) {
    if (v != std::floor(v) || v < 0 || v > 1e6) throw ParseError("wave function header: bad integer");
    return static_cast<std::size_t>(v);
  };
  const std::size_t nx = as_count(values[0]), ny = as_count(values[1]);
  const int n = static_cast<int>(as_count(values[2])), s = static_cast<int>(as_count(values[3]));
  const double h = values[4];
  const std::size_t count = expected_amplitudes(nx, ny, n, s);
  if (values.size() != 5 + 2 * count) {
    throw ParseError("wave function: expected " + std::to_string(count) + " complex amplitudes, got " +
                     std::to_string((values.size() - 5) / 2));
  }
  std::vector<std::complex<double>> a(count);
  for (std::size_t k = 0; k < count; ++k) a[k] = {values[5 + 2 * k], values[6 + 2 * k]};
  return GridWaveFunction(Grid{nx, ny, h}, n, s, std::move(a));
}

void write_wavefunction_text(std::ostream& out, const GridWaveFunction& psi) {
  const auto old = out.precision(std::numeric_limits<double>::max_digits10);
  const Grid& g = psi.grid();
  out << "# nx ny N spin_dim h\n"
      << g.nx << ' ' << g.ny << ' ' << psi.electrons() << ' ' << psi.spin_dim() << ' ' << g.h << '\n';
  for (const auto& z : psi.amplitudes()) out << z.real() << ' ' << z.imag() << '\n';
  out.precision(old);
}

GridWaveFunction read_wavefunction_binary(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParseError("binary wave function: bad magic");
  const std::size_t nx = get_bytes(in, 4), ny = get_bytes(in, 4);
  const int n = static_cast<int>(get_bytes(in, 4)), s = static_cast<int>(get_bytes(in, 4));
  const double h = std::bit_cast<double>(get_bytes(in, 8));
  const std::size_t count = expected_amplitudes(nx, ny, n, s);
  std::vector<std::complex<double>> a(count);
  for (auto& z : a) {
    const double re = std::bit_cast<double>(get_bytes(in, 8));
    const double im = std::bit_cast<double>(get_bytes(in, 8));
    z = {re, im};
  }
  if (in.peek() != std::char_traits<char>::eof()) throw ParseError("binary wave function: trailing bytes");
  return GridWaveFunction(Grid{nx, ny, h}, n, s, std::move(a));
}

void write_wavefunction_binary(std::ostream& out, const GridWaveFunction& psi) {
  out.write(kMagic.data(), kMagic.size());
  const Grid& g = psi.grid();
  put_u32(out, static_cast<std::uint32_t>(g.nx));
  put_u32(out, static_cast<std::uint32_t>(g.ny));
  put_u32(out, static_cast<std::uint32_t>(psi.electrons()));
  put_u32(out, static_cast<std::uint32_t>(psi.spin_dim()));
  put_f64(out, g.h);
  for (const auto& z : psi.amplitudes()) {
    put_f64(out, z.real());
    put_f64(out, z.imag());
  }
}

}  // namespace vemf
