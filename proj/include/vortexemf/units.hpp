#pragma once

#include <numbers>
#include <string_view>

namespace vemf {

enum class UnitMode { natural, si };

/// Physical constants in the active unit mode. h is always 2*pi*hbar.
struct UnitSystem {
  UnitMode mode = UnitMode::natural;
  double hbar = 1.0;
  double e = 1.0;
  double m_e = 1.0;
  double k_b = 1.0;

  double h() const { return 2.0 * std::numbers::pi * hbar; }

  /// hbar = e = m_e = k_B = 1.
  static constexpr UnitSystem natural() { return {}; }
  /// CODATA 2018 values.
  static constexpr UnitSystem si() {
    return {UnitMode::si, 1.054571817e-34, 1.602176634e-19, 9.1093837015e-31, 1.380649e-23};
  }
  static UnitSystem from_mode(UnitMode mode) { return mode == UnitMode::si ? si() : natural(); }
};

std::string_view to_string(UnitMode mode);
/// Throws ValidationError for anything other than "natural" or "si".
UnitMode parse_unit_mode(std::string_view text);

}  // namespace vemf
