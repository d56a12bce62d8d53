#pragma once

#include <numbers>

// Physical constants (SI, CODATA 2018) and unit conversions used across modules.
namespace helirot::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double helium4_atom_mass_g = 4.002602 * 1.66053906660e-24;

inline constexpr double angstrom3_to_m3 = 1e-30;
inline constexpr double angstrom2_to_cm2 = 1e-16;
inline constexpr double wcm2_to_wm2 = 1e4;
inline constexpr double fs_to_s = 1e-15;
inline constexpr double ps_to_s = 1e-12;
inline constexpr double ms_to_s = 1e-3;
inline constexpr double nm_to_cm = 1e-7;
inline constexpr double mps_to_cmps = 1e2;

/// ∫ exp(-4 ln2 t²/τ²) dt = τ · sqrt(π / (4 ln 2)) for a Gaussian of FWHM τ.
inline constexpr double gaussian_fwhm_area = 1.0644670194312262;

/// Distance in nm covered at speed u [m/s] in time t [ps].
constexpr double distance_nm(double speed_mps, double time_ps) { return speed_mps * time_ps * 1e-3; }

} // namespace helirot::units
