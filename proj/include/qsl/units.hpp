// units.hpp — conversion constants for the (fs, rad/fs) unit system used by
// the excitonic model. ħ = 1, so energies are angular frequencies.
#pragma once

namespace qsl::units {

// Ẽ [cm⁻¹] → ω [rad/fs]: 2πc with c in cm/fs.
inline constexpr double wavenumber_to_rad_per_fs = 1.8836515673088532e-4;

// k_B in cm⁻¹ per kelvin.
inline constexpr double boltzmann_wavenumber_per_kelvin = 0.6950348;

// T [K] → k_B T [rad/fs]
inline constexpr double kelvin_to_rad_per_fs =
    boltzmann_wavenumber_per_kelvin * wavenumber_to_rad_per_fs;

} // namespace qsl::units
