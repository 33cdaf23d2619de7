#pragma once

#include <complex>
#include <numbers>

// Interfaces speak ordinary frequency (Hz); the library computes with angular
// frequency (rad/s). These helpers are the only place the 2*pi appears.
namespace eprenorm::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_angular(double hz) noexcept { return kTwoPi * hz; }
constexpr double angular_to_hz(double rad_per_s) noexcept { return rad_per_s / kTwoPi; }

constexpr double khz_to_angular(double khz) noexcept { return kTwoPi * 1e3 * khz; }
constexpr double angular_to_khz(double rad_per_s) noexcept { return rad_per_s / (kTwoPi * 1e3); }

inline std::complex<double> hz_to_angular(std::complex<double> z) noexcept { return z * kTwoPi; }
inline std::complex<double> angular_to_hz(std::complex<double> z) noexcept { return z / kTwoPi; }
inline std::complex<double> angular_to_khz(std::complex<double> z) noexcept {
  return z / (kTwoPi * 1e3);
}

}  // namespace eprenorm::units
