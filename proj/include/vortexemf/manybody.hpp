#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "vortexemf/field.hpp"
#include "vortexemf/geometry.hpp"
#include "vortexemf/units.hpp"

namespace vemf {

/// Uniform nx x ny mesh with spacing h; point (i, j) sits at origin + (i h, j h)
/// and has flat index j * nx + i.
struct Grid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  double h = 1.0;
  Vec2 origin{};

  std::size_t points() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j) const { return j * nx + i; }
  Vec2 point(std::size_t i, std::size_t j) const {
    return origin + Vec2{static_cast<double>(i) * h, static_cast<double>(j) * h};
  }
  Vec2 point(std::size_t flat) const { return point(flat % nx, flat / nx); }
};

inline constexpr std::size_t kMaxGridOneElectron = 64;
inline constexpr std::size_t kMaxGridTwoElectrons = 24;

/// N-electron (N = 1 or 2) amplitudes on a grid.
///
/// Layout, row-major: N = 1 -> [r1][s1]; N = 2 -> [r1][s1][r2][s2], where r
/// is the flat grid index and s the spin label. Construction checks the grid
/// caps, normalization (sum |psi|^2 h^(2N) = 1 within 1e-10) and, for N = 2,
/// antisymmetry under exchange of (r1, s1) <-> (r2, s2).
class GridWaveFunction {
 public:
  GridWaveFunction(Grid grid, int electrons, int spin_dim, std::vector<std::complex<double>> amplitudes);

  /// Samples f(r1, s1[, r2, s2]) on the grid and normalizes the result.
  using Amplitude1 = std::function<std::complex<double>(Vec2, int)>;
  using Amplitude2 = std::function<std::complex<double>(Vec2, int, Vec2, int)>;
  static GridWaveFunction sample(const Grid& grid, int spin_dim, const Amplitude1& f);
  static GridWaveFunction sample(const Grid& grid, int spin_dim, const Amplitude2& f);

  const Grid& grid() const { return grid_; }
  int electrons() const { return electrons_; }
  int spin_dim() const { return spin_dim_; }
  std::span<const std::complex<double>> amplitudes() const { return amplitudes_; }
  /// sum |psi|^2 h^(2N)
  double norm() const;

  /// Amplitudes with r1 fixed: spin_dim * (points * spin_dim)^(N - 1) values.
  std::size_t block_size() const;
  std::span<const std::complex<double>> block(std::size_t r1) const {
    return amplitudes().subspan(r1 * block_size(), block_size());
  }

  /// Multiplies every electron coordinate by a one-electron phase sample,
  /// psi * prod_j phase(r_j). |phase| must be 1.
  GridWaveFunction with_phase(std::span<const std::complex<double>> phase) const;

 private:
  Grid grid_;
  int electrons_;
  int spin_dim_;
  std::vector<std::complex<double>> amplitudes_;
};

/// Berry connection and reduced density sampled on the wave-function grid.
struct ConnectionGrid {
  Grid grid;
  std::vector<Vec2> connection;       // zero where masked
  std::vector<double> density;        // sum over s1 and the other electron
  std::vector<std::uint8_t> masked;   // density <= floor
  std::size_t masked_count = 0;
  double density_floor = 0.0;

  /// Max |A - reference| over unmasked points accepted by `keep`.
  double max_deviation(const std::function<Vec2(Vec2)>& reference,
                       const std::function<bool(Vec2)>& keep = {}) const;

  /// Bilinear interpolation inside the grid. Cells touching a masked point
  /// throw DensityFloor; points outside the grid throw ValidationError.
  VectorField2D as_field() const;
};

/// A(r) = Re{ sum_s1 int dx2 psi* (-i d/dr) psi } / rho(r), with centered
/// second-order differences (one-sided at the edges). Points whose density
/// is at or below floor_ratio * max(rho) are masked and reported.
ConnectionGrid berry_connection_mb(const GridWaveFunction& psi, double floor_ratio = 1e-12,
                                   unsigned workers = 1);

struct FactorizationReport {
  double residual = 0.0;  // max |A[psi0]| over unmasked points
  std::size_t evaluated_points = 0;
  std::size_t masked_points = 0;
};

/// Removes the supplied phase (samples of exp(-i chi / 2), one per grid
/// point) from every electron and reports how far the remainder is from
/// currentless.
FactorizationReport factorization_check(const GridWaveFunction& psi,
                                        std::span<const std::complex<double>> phase,
                                        double floor_ratio = 1e-12);

/// exp(-i chi(r) / 2) at every grid point.
std::vector<std::complex<double>> phase_samples(const Grid& grid, const std::function<double(Vec2)>& chi);

// ---------------------------------------------------------------------------
// Mixtures

struct MixtureMember {
  VectorField2D connection;
  double probability = 0.0;
  std::optional<double> energy;

  static MixtureMember from_state(const GridWaveFunction& psi, double probability,
                                  std::optional<double> energy = std::nullopt);
};

/// Probability-weighted set of states. Probabilities must be non-negative and
/// sum to 1 within 1e-12 (InvalidEnsemble otherwise).
class MixtureEnsemble {
 public:
  explicit MixtureEnsemble(std::vector<MixtureMember> members);
  std::span<const MixtureMember> members() const { return members_; }

 private:
  std::vector<MixtureMember> members_;
};

/// sum_j p_j A_j, pointwise.
VectorField2D mixture_connection(const MixtureEnsemble& ensemble);

/// p_j = exp(-E_j / k_B T) / sum_k exp(-E_k / k_B T), max-subtracted.
/// T <= 0 throws InvalidTemperature.
std::vector<double> boltzmann_weights(std::span<const double> energies, double temperature,
                                      const UnitSystem& units);

/// Position-dependent weights for a temperature field T(r).
std::function<std::vector<double>(Vec2)> boltzmann_weights(std::vector<double> energies,
                                                           ScalarField2D temperature,
                                                           const UnitSystem& units);

/// sum_j p_j(r) A_j(r) with Boltzmann weights from a temperature field.
VectorField2D thermal_mixture_connection(std::vector<VectorField2D> connections,
                                         std::vector<double> energies, ScalarField2D temperature,
                                         const UnitSystem& units);

// ---------------------------------------------------------------------------
// Tensor files.
//
// Text: header "nx ny N spin_dim h", then one "re im" pair per line in the
// amplitude layout above; '#' comments allowed.
// Binary: 8-byte magic "VEMFWF1\0", uint32 nx, ny, N, spin_dim, float64 h,
// then (re, im) float64 pairs. All fields little-endian.

GridWaveFunction read_wavefunction_text(std::istream& in);
void write_wavefunction_text(std::ostream& out, const GridWaveFunction& psi);
GridWaveFunction read_wavefunction_binary(std::istream& in);
void write_wavefunction_binary(std::ostream& out, const GridWaveFunction& psi);

}  // namespace vemf
