#pragma once

namespace triring::constants {

// CODATA 2018 exact values (SI definition of e and h).
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck_h = 6.62607015e-34;            // J s

// Charging-energy prefactor: (2e)^2 / (h * 1 fF), expressed in GHz.
// Divide by a capacitance in fF to get (2e)^2/(h C) in GHz.
inline constexpr double charging_ghz_ff =
    (2.0 * elementary_charge) * (2.0 * elementary_charge) /
    (planck_h * 1e-15) / 1e9;

}  // namespace triring::constants
