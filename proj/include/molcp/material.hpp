#pragma once

#include <complex>
#include <string>

#include "molcp/errors.hpp"
#include "molcp/frequency.hpp"

namespace molcp {

enum class MaterialKind { Vacuum, Drude, Plasma, ConstantDielectric };

/// Relative permittivity of the substrate, evaluable on the real and the
/// imaginary frequency axis. On the imaginary axis eps(i xi) is real and
/// >= 1 for every variant.
class PermittivityModel {
 public:
  static PermittivityModel vacuum() { return {MaterialKind::Vacuum, 0, 0, 1}; }
  static PermittivityModel drude(double omega_p, double gamma);
  static PermittivityModel plasma(double omega_p);
  static PermittivityModel dielectric(double eps_static);

  /// eps at a real or imaginary frequency. Drude/plasma at exactly zero
  /// frequency throw StaticDivergenceError; callers that need static
  /// conductor behaviour must use static_rp()/static_rp_available() which
  /// take the eps(0) -> infinity limit analytically.
  std::complex<double> permittivity(const Frequency& freq) const;

  /// eps(i xi) as a real number (xi > 0).
  double permittivity_imag_axis(double xi) const;

  /// Static limit of the p-polarised reflection factor
  /// (eps(0) - 1)/(eps(0) + 1): 1 for conductors (Drude/plasma), the
  /// finite ratio for dielectrics, 0 for vacuum.
  double static_rp() const;

  MaterialKind kind() const { return kind_; }
  bool is_vacuum() const { return kind_ == MaterialKind::Vacuum; }
  bool is_conductor() const {
    return kind_ == MaterialKind::Drude || kind_ == MaterialKind::Plasma;
  }
  double omega_p() const { return omega_p_; }
  double gamma() const { return gamma_; }
  double eps_static() const { return eps_static_; }
  std::string describe() const;

 private:
  PermittivityModel(MaterialKind k, double wp, double g, double es)
      : kind_(k), omega_p_(wp), gamma_(g), eps_static_(es) {}
  MaterialKind kind_;
  double omega_p_;
  double gamma_;
  double eps_static_;
};

/// Fresnel amplitudes of a single planar interface.
struct ReflectionPair {
  std::complex<double> rs{0.0, 0.0};
  std::complex<double> rp{0.0, 0.0};
};

/// Planar cavity of two identical walls separated by `length`; only the
/// reflection-coefficient substitution is modelled, not the full two-wall
/// Green tensor (results are outlook-grade).
struct CavityGeometry {
  double length = 0.0;  // m
};

/// z-component of the vacuum wave vector, branch fixed to Im(beta) >= 0.
/// On the imaginary axis beta = i sqrt(q^2 + xi^2/c^2) exactly.
std::complex<double> beta_vacuum(const Frequency& freq, double q);

/// Fresnel reflection coefficients for s- and p-polarised waves at lateral
/// wavenumber q:
///   rs = (beta - beta1)/(beta + beta1)
///   rp = (eps beta - beta1)/(eps beta + beta1)
/// with beta = sqrt(omega^2/c^2 - q^2), beta1 = sqrt(eps omega^2/c^2 - q^2),
/// Im(beta), Im(beta1) >= 0. Exactly at the light line (beta = 0) the
/// finite limit rs = -1, rp = +1 is returned for eps != 1.
ReflectionPair fresnel(const PermittivityModel& model, const Frequency& freq,
                       double q);

/// Cavity-enhanced coefficients r~ = r / (1 - r^2 e^{2 i beta l}).
/// Throws CavityResonanceError when a denominator magnitude falls below
/// 1e-14 (lossless wall exactly on resonance).
ReflectionPair cavity_fresnel(const ReflectionPair& pair,
                              std::complex<double> beta,
                              const CavityGeometry& geom);

}  // namespace molcp
