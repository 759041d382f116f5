#include "molcp/green.hpp"

#include <cmath>
#include <string>

#include "molcp/constants.hpp"

namespace molcp {

using std::complex;
namespace k = constants;

namespace {

constexpr complex<double> I{0.0, 1.0};

// Reflection pair with the cavity substitution applied when configured.
ReflectionPair reflections(const HalfSpaceGeometry& geom,
                           const Frequency& freq, double q,
                           complex<double> beta) {
  ReflectionPair r = fresnel(geom.material, freq, q);
  if (geom.cavity) r = cavity_fresnel(r, beta, *geom.cavity);
  return r;
}

// Decorates quadrature failures with the evaluation point.
template <typename Fn>
auto with_context(Fn&& fn, double z, const std::string& where) {
  try {
    return fn();
  } catch (const QuadratureError& e) {
    throw QuadratureError(std::string(e.what()) + " [" + where +
                              ", z = " + std::to_string(z) + " m]",
                          e.achieved_error);
  }
}

// ---------------------------------------------------------------------
// Real frequency. Propagating sector, q = (omega/c) sin(theta):
//   g_xx += (i/8pi)(omega/c) sin(theta) e^{2i (omega/c) z cos(theta)}
//           [ rs - cos^2(theta) rp ]
//   g_zz += (i/8pi)(omega/c) sin(theta) e^{...} 2 sin^2(theta) rp
// `grad` adds the factor 2 i beta = 2 i (omega/c) cos(theta).
// ---------------------------------------------------------------------
GreenTensorDiagonal propagating_sector(const HalfSpaceGeometry& geom,
                                       double omega, bool grad) {
  const double k0 = omega / k::c;
  const double z = geom.z;
  const Frequency freq = Frequency::real_axis(omega);

  auto integrand = [&](double theta) -> Diag2 {
    const double s = std::sin(theta);
    const double co = std::cos(theta);
    const double q = k0 * s;
    const complex<double> beta{k0 * co, 0.0};
    const ReflectionPair r = reflections(geom, freq, q, beta);
    complex<double> common = (I / (8.0 * k::pi)) * k0 * s *
                             std::exp(2.0 * I * beta * z);
    if (grad) common *= 2.0 * I * beta;
    Diag2 out;
    out.xx = common * (r.rs - co * co * r.rp);
    out.zz = common * (2.0 * s * s * r.rp);
    return out;
  };

  // Seed roughly one panel per oscillation of e^{2 i beta z}; K15 then
  // starts near its spectral accuracy and refinement stays shallow.
  const int seed = static_cast<int>(k0 * z / k::pi) + 1;
  const Diag2 v = with_context(
      [&] {
        return integrate_adaptive<Diag2>(integrand, 0.0, 0.5 * k::pi,
                                         geom.quad, nullptr, seed);
      },
      z, "propagating sector, omega = " + std::to_string(omega) + " rad/s");
  return {v.xx, v.zz};
}

// ---------------------------------------------------------------------
// Real frequency. Evanescent sector, kappa = sqrt(q^2 - omega^2/c^2):
//   g_xx += (1/8pi) e^{-2 kappa z} [ rs + (kappa^2 c^2/omega^2) rp ]
//   g_zz += (1/8pi) e^{-2 kappa z} 2 (q^2 c^2/omega^2) rp
// `grad` adds the factor 2 i beta = -2 kappa.
// ---------------------------------------------------------------------
GreenTensorDiagonal evanescent_sector(const HalfSpaceGeometry& geom,
                                      double omega, bool grad) {
  const double k0 = omega / k::c;
  const double z = geom.z;
  const Frequency freq = Frequency::real_axis(omega);

  auto integrand = [&](double kap) -> Diag2 {
    const double q = std::hypot(kap, k0);
    const complex<double> beta{0.0, kap};
    const ReflectionPair r = reflections(geom, freq, q, beta);
    double common = std::exp(-2.0 * kap * z) / (8.0 * k::pi);
    if (grad) common *= -2.0 * kap;
    const double kc = kap / k0;  // kappa c / omega
    const double qc = q / k0;    // q c / omega
    Diag2 out;
    out.xx = common * (r.rs + kc * kc * r.rp);
    out.zz = common * (2.0 * qc * qc * r.rp);
    return out;
  };

  const Diag2 v = with_context(
      [&] {
        return integrate_semi_infinite<Diag2>(integrand, 1.0 / (2.0 * z),
                                              geom.quad);
      },
      z, "evanescent sector, omega = " + std::to_string(omega) + " rad/s");
  return {v.xx, v.zz};
}

// ---------------------------------------------------------------------
// Imaginary axis, pre-multiplied by xi^2. kappa = sqrt(q^2 + xi^2/c^2),
// kappa in [xi/c, inf); integrating over u = kappa - xi/c from 0:
//   xi^2 g_xx = (1/8pi) int du e^{-2 kappa z} [ xi^2 rs - c^2 kappa^2 rp ]
//   xi^2 g_zz = (1/8pi) int du e^{-2 kappa z} ( -2 c^2 q^2 rp )
// xi = 0 reduces to the static integrand where only rp survives
// (the rs term carries the bare xi^2 prefactor).
// `grad` adds the factor -2 kappa.
// ---------------------------------------------------------------------
GreenTensorDiagonal imag_scaled(const HalfSpaceGeometry& geom, double xi,
                                bool grad) {
  const double z = geom.z;

  if (geom.material.is_vacuum() && !geom.cavity) return {};

  if (xi == 0.0) {
    // Dedicated static limit: rp -> static_rp (cavity substitution applied
    // with beta = i kappa), rs term vanishes.
    const double rp0 = geom.material.static_rp();
    auto integrand = [&](double kap) -> Diag2 {
      complex<double> rp{rp0, 0.0};
      if (geom.cavity) {
        ReflectionPair pair{{0.0, 0.0}, rp};
        rp = cavity_fresnel(pair, complex<double>{0.0, kap}, *geom.cavity).rp;
      }
      double common = std::exp(-2.0 * kap * z) / (8.0 * k::pi);
      if (grad) common *= -2.0 * kap;
      const double ck = k::c * kap;
      Diag2 out;
      out.xx = common * (-(ck * ck) * rp);
      out.zz = common * (-2.0 * (ck * ck) * rp);
      return out;
    };
    const Diag2 v = with_context(
        [&] {
          return integrate_semi_infinite<Diag2>(integrand, 1.0 / (2.0 * z),
                                                geom.quad);
        },
        z, "static Matsubara term");
    return {v.xx, v.zz};
  }

  const Frequency freq = Frequency::imaginary_axis(xi);
  const double kmin = xi / k::c;

  // The constant damping e^{-2 kmin z} is factored out of the integrand
  // and applied once at the end: deep Matsubara tails otherwise push the
  // integrand into the subnormal range, whose coarse quantisation defeats
  // the relative-error refinement.
  const double damp = std::exp(-2.0 * kmin * z);
  if (damp == 0.0) return {};

  auto integrand = [&](double u) -> Diag2 {
    const double kap = kmin + u;
    // q = sqrt(kappa^2 - xi^2/c^2), stable for small u
    const double q = std::sqrt(u * (kap + kmin));
    const complex<double> beta{0.0, kap};
    const ReflectionPair r = reflections(geom, freq, q, beta);
    double common = std::exp(-2.0 * u * z) / (8.0 * k::pi);
    if (grad) common *= -2.0 * kap;
    const double ck = k::c * kap;
    const double cq = k::c * q;
    Diag2 out;
    out.xx = common * (xi * xi * r.rs - ck * ck * r.rp);
    out.zz = common * (-2.0 * cq * cq * r.rp);
    return out;
  };

  const Diag2 v = with_context(
      [&] {
        return integrate_semi_infinite<Diag2>(integrand, 1.0 / (2.0 * z),
                                              geom.quad);
      },
      z, "imaginary axis, xi = " + std::to_string(xi) + " rad/s");
  return {damp * v.xx, damp * v.zz};
}

}  // namespace

SpectralSplit scattering_green_real(const HalfSpaceGeometry& geom,
                                    double omega) {
  geom.validate();
  if (!(omega > 0.0))
    throw NumericsError("scattering_green_real requires omega > 0");
  if (geom.material.is_vacuum() && !geom.cavity) return {};
  SpectralSplit out;
  out.propagating = propagating_sector(geom, omega, false);
  out.evanescent = evanescent_sector(geom, omega, false);
  return out;
}

SpectralSplit grad_z_scattering_green_real(const HalfSpaceGeometry& geom,
                                           double omega) {
  geom.validate();
  if (!(omega > 0.0))
    throw NumericsError("grad_z_scattering_green_real requires omega > 0");
  if (geom.material.is_vacuum() && !geom.cavity) return {};
  SpectralSplit out;
  out.propagating = propagating_sector(geom, omega, true);
  out.evanescent = evanescent_sector(geom, omega, true);
  return out;
}

GreenTensorDiagonal scattering_green_imag_scaled(const HalfSpaceGeometry& geom,
                                                 double xi) {
  geom.validate();
  if (xi < 0.0)
    throw NumericsError("scattering_green_imag_scaled requires xi >= 0");
  return imag_scaled(geom, xi, false);
}

double scattering_green_imag_scaled_trace(const HalfSpaceGeometry& geom,
                                          double xi) {
  return scattering_green_imag_scaled(geom, xi).trace().real();
}

GreenTensorDiagonal grad_z_scattering_green_imag_scaled(
    const HalfSpaceGeometry& geom, double xi) {
  geom.validate();
  if (xi < 0.0)
    throw NumericsError(
        "grad_z_scattering_green_imag_scaled requires xi >= 0");
  return imag_scaled(geom, xi, true);
}

double im_free_space_green(double omega) {
  return omega / (6.0 * k::pi * k::c);
}

GreenTensorDiagonal im_total_green(const HalfSpaceGeometry& geom,
                                   double omega) {
  geom.validate();
  if (!(omega > 0.0))
    throw NumericsError("im_total_green requires omega > 0");
  const double g0 = im_free_space_green(omega);
  GreenTensorDiagonal out{{g0, 0.0}, {g0, 0.0}};
  if (geom.material.is_vacuum() && !geom.cavity) return out;
  const SpectralSplit split = scattering_green_real(geom, omega);
  const GreenTensorDiagonal tot = split.total();
  out.xx += complex<double>{tot.xx.imag(), 0.0};
  out.zz += complex<double>{tot.zz.imag(), 0.0};
  return out;
}

}  // namespace molcp
