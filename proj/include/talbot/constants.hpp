#pragma once

#include <numbers>

// SI values (CODATA 2018 exact definitions where they exist).
namespace talbot::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double h = 6.62607015e-34;       // J s
inline constexpr double hbar = h / (2.0 * pi);    // J s
inline constexpr double c = 299792458.0;          // m/s
inline constexpr double k_B = 1.380649e-23;       // J/K
inline constexpr double eps0 = 8.8541878128e-12;  // F/m
inline constexpr double amu = 1.66053906660e-27;  // kg
inline constexpr double g = 9.80665;              // m/s^2

// Reference mass of the collapse-rate normalisation.
inline constexpr double nucleon_mass = amu;

}  // namespace talbot::constants

namespace talbot {

struct PhysicalConstants {
  double h = constants::h;
  double hbar = constants::hbar;
  double c = constants::c;
  double k_B = constants::k_B;
  double eps0 = constants::eps0;
  double amu = constants::amu;
  double g = constants::g;
};

inline constexpr PhysicalConstants si_constants{};

}  // namespace talbot
