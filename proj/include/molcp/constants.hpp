#pragma once

// Physical constants (SI, CODATA 2018). Frequencies are angular (rad/s)
// throughout the library.

namespace molcp {
namespace constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c = 299792458.0;              // m/s (exact)
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double k_B = 1.380649e-23;           // J/K (exact)
inline constexpr double eps0 = 8.8541878128e-12;      // F/m
inline constexpr double mu0 = 1.25663706212e-6;       // N/A^2

}  // namespace constants
}  // namespace molcp
