#pragma once

#include <complex>
#include <optional>

#include "molcp/material.hpp"
#include "molcp/quadrature.hpp"

namespace molcp {

/// Molecule at height z above the planar surface of a half-space. With a
/// cavity configured the half-space reflection coefficients are replaced by
/// their cavity-enhanced counterparts (walls share `material`).
struct HalfSpaceGeometry {
  double z = 0.0;  // m, distance from the surface, > 0
  PermittivityModel material = PermittivityModel::vacuum();
  std::optional<CavityGeometry> cavity;
  QuadratureOptions quad;

  void validate() const {
    if (!(z > 0.0)) throw ConfigError("geometry requires z > 0");
    if (cavity && !(z < cavity->length))
      throw ConfigError("cavity geometry requires 0 < z < l");
  }
};

/// Diagonal of the scattering Green tensor at coincident points,
/// g_yy = g_xx by planar symmetry. Units 1/m (value), 1/m^2 (z-gradient).
struct GreenTensorDiagonal {
  std::complex<double> xx{0.0, 0.0};
  std::complex<double> zz{0.0, 0.0};
  std::complex<double> trace() const { return 2.0 * xx + zz; }
  GreenTensorDiagonal& operator+=(const GreenTensorDiagonal& o) {
    xx += o.xx;
    zz += o.zz;
    return *this;
  }
};

/// Partition of the lateral-wavenumber integral at the light line
/// q = omega/c: propagating (q < omega/c) and evanescent (q > omega/c).
struct SpectralSplit {
  GreenTensorDiagonal propagating;
  GreenTensorDiagonal evanescent;
  GreenTensorDiagonal total() const {
    GreenTensorDiagonal t = propagating;
    t += evanescent;
    return t;
  }
};

/// Scattering Green tensor G^(1)(r_A, r_A, omega) at real frequency,
/// integrated over q with the split at the light line. The propagating
/// sector uses the substitution q = (omega/c) sin(theta) (beta smooth),
/// the evanescent one kappa = sqrt(q^2 - omega^2/c^2) (weight e^{-2 kappa z}
/// explicit).
SpectralSplit scattering_green_real(const HalfSpaceGeometry& geom,
                                    double omega);

/// d/dz of the above (each q contributes a factor 2 i beta).
SpectralSplit grad_z_scattering_green_real(const HalfSpaceGeometry& geom,
                                           double omega);

/// xi^2 * G^(1)(r_A, r_A, i xi), evaluated as one combined integrand so the
/// xi -> 0 limit is finite; at xi = 0 the dedicated static integrand is
/// used (for a conductor only the p-polarised terms survive). Result is
/// real; units (rad/s)^2 / m.
double scattering_green_imag_scaled_trace(const HalfSpaceGeometry& geom,
                                          double xi);
GreenTensorDiagonal scattering_green_imag_scaled(const HalfSpaceGeometry& geom,
                                                 double xi);

/// d/dz of xi^2 G^(1)(i xi) (factor -2 kappa per mode).
GreenTensorDiagonal grad_z_scattering_green_imag_scaled(
    const HalfSpaceGeometry& geom, double xi);

/// Im[G(r_A, r_A, omega)] of the TOTAL Green tensor (free space +
/// scattering). The free-space part at coincidence is the finite diagonal
/// omega/(6 pi c) per component. Entries of the result are real.
GreenTensorDiagonal im_total_green(const HalfSpaceGeometry& geom,
                                   double omega);

/// Free-space coincident-point value Im G^(0)_jj = omega / (6 pi c).
double im_free_space_green(double omega);

}  // namespace molcp
