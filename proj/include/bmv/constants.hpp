#pragma once

// CODATA 2018 values, hard-coded as the single source of truth for every
// module. Reproducibility beats configurability here: two runs of the same
// build must never disagree on a constant.

namespace bmv::constants {

inline constexpr double G = 6.67430e-11;           // m^3 kg^-1 s^-2
inline constexpr double hbar = 1.054571817e-34;    // J s
inline constexpr double c = 299792458.0;           // m/s
inline constexpr double mu0 = 1.25663706212e-6;    // N A^-2

}  // namespace bmv::constants
