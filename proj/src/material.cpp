#include "molcp/material.hpp"

#include <cmath>
#include <sstream>

#include "molcp/constants.hpp"

namespace molcp {

using std::complex;
namespace k = constants;

PermittivityModel PermittivityModel::drude(double omega_p, double gamma) {
  if (!(omega_p > 0.0) || !(gamma > 0.0))
    throw ConfigError("Drude model requires omega_p > 0 and gamma > 0");
  return {MaterialKind::Drude, omega_p, gamma, 0.0};
}

PermittivityModel PermittivityModel::plasma(double omega_p) {
  if (!(omega_p > 0.0))
    throw ConfigError("plasma model requires omega_p > 0");
  return {MaterialKind::Plasma, omega_p, 0.0, 0.0};
}

PermittivityModel PermittivityModel::dielectric(double eps_static) {
  if (!(eps_static >= 1.0))
    throw ConfigError("constant dielectric requires eps_static >= 1");
  return {MaterialKind::ConstantDielectric, 0.0, 0.0, eps_static};
}

complex<double> PermittivityModel::permittivity(const Frequency& freq) const {
  switch (kind_) {
    case MaterialKind::Vacuum:
      return {1.0, 0.0};
    case MaterialKind::ConstantDielectric:
      return {eps_static_, 0.0};
    case MaterialKind::Drude: {
      if (freq.magnitude() == 0.0)
        throw StaticDivergenceError(
            "static-divergence: Drude permittivity diverges at zero "
            "frequency; use the analytic static-limit path");
      if (freq.is_imaginary()) return {permittivity_imag_axis(freq.magnitude()), 0.0};
      const double w = freq.magnitude();
      // eps(w) = 1 - wp^2 / (w (w + i gamma))
      return 1.0 - omega_p_ * omega_p_ /
                       (w * complex<double>(w, gamma_));
    }
    case MaterialKind::Plasma: {
      if (freq.magnitude() == 0.0)
        throw StaticDivergenceError(
            "static-divergence: plasma permittivity diverges at zero "
            "frequency; use the analytic static-limit path");
      if (freq.is_imaginary()) return {permittivity_imag_axis(freq.magnitude()), 0.0};
      const double w = freq.magnitude();
      return {1.0 - omega_p_ * omega_p_ / (w * w), 0.0};
    }
  }
  throw NumericsError("unreachable material kind");
}

double PermittivityModel::permittivity_imag_axis(double xi) const {
  switch (kind_) {
    case MaterialKind::Vacuum:
      return 1.0;
    case MaterialKind::ConstantDielectric:
      return eps_static_;
    case MaterialKind::Drude:
      if (xi == 0.0)
        throw StaticDivergenceError(
            "static-divergence: Drude permittivity diverges at xi = 0");
      return 1.0 + omega_p_ * omega_p_ / (xi * (xi + gamma_));
    case MaterialKind::Plasma:
      if (xi == 0.0)
        throw StaticDivergenceError(
            "static-divergence: plasma permittivity diverges at xi = 0");
      return 1.0 + omega_p_ * omega_p_ / (xi * xi);
  }
  throw NumericsError("unreachable material kind");
}

double PermittivityModel::static_rp() const {
  if (is_conductor()) return 1.0;  // (eps - 1)/(eps + 1) -> 1 as eps -> inf
  if (kind_ == MaterialKind::Vacuum) return 0.0;
  return (eps_static_ - 1.0) / (eps_static_ + 1.0);
}

std::string PermittivityModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case MaterialKind::Vacuum:
      os << "vacuum";
      break;
    case MaterialKind::Drude:
      os << "drude omega_p=" << omega_p_ << " rad/s gamma=" << gamma_
         << " rad/s";
      break;
    case MaterialKind::Plasma:
      os << "plasma omega_p=" << omega_p_ << " rad/s";
      break;
    case MaterialKind::ConstantDielectric:
      os << "dielectric eps_static=" << eps_static_;
      break;
  }
  return os.str();
}

namespace {

// Principal square root pushed to the Im >= 0 branch.
complex<double> sqrt_upper(complex<double> v) {
  complex<double> r = std::sqrt(v);
  if (r.imag() < 0.0) r = -r;
  return r;
}

}  // namespace

complex<double> beta_vacuum(const Frequency& freq, double q) {
  const double w = freq.magnitude();
  if (freq.is_imaginary()) {
    // beta = i kappa, kappa = sqrt(q^2 + xi^2/c^2) computed in real
    // arithmetic (exact branch, no cancellation).
    return {0.0, std::hypot(q, w / k::c)};
  }
  const double k0 = w / k::c;
  if (q <= k0) return {std::sqrt((k0 - q) * (k0 + q)), 0.0};
  return {0.0, std::sqrt((q - k0) * (q + k0))};
}

ReflectionPair fresnel(const PermittivityModel& model, const Frequency& freq,
                       double q) {
  if (q < 0.0) throw NumericsError("fresnel requires q >= 0");
  if (model.is_vacuum()) return {};  // beta1 = beta for eps = 1

  const double w = freq.magnitude();

  if (freq.is_imaginary()) {
    // Everything is real on the imaginary axis: beta = i kappa,
    // beta1 = i kappa1 with kappa1 = sqrt(q^2 + eps xi^2/c^2) >= kappa.
    const double eps = model.permittivity_imag_axis(w);
    const double kap = std::hypot(q, w / k::c);
    const double kap1 = std::hypot(q, std::sqrt(eps) * w / k::c);
    ReflectionPair out;
    out.rs = (kap - kap1) / (kap + kap1);
    out.rp = (eps * kap - kap1) / (eps * kap + kap1);
    return out;
  }

  const complex<double> eps = model.permittivity(freq);
  const complex<double> beta = beta_vacuum(freq, q);
  const complex<double> beta1 =
      sqrt_upper(eps * (w / k::c) * (w / k::c) - q * q);

  if (std::abs(beta) == 0.0) {
    // Light line: rs -> -1, rp -> +1 for eps != 1 (finite limit, never NaN).
    return {{-1.0, 0.0}, {1.0, 0.0}};
  }
  ReflectionPair out;
  out.rs = (beta - beta1) / (beta + beta1);
  out.rp = (eps * beta - beta1) / (eps * beta + beta1);
  return out;
}

ReflectionPair cavity_fresnel(const ReflectionPair& pair,
                              complex<double> beta,
                              const CavityGeometry& geom) {
  if (!(geom.length > 0.0))
    throw ConfigError("cavity length must be positive");
  const complex<double> phase = std::exp(2.0 * complex<double>(0.0, 1.0) *
                                         beta * geom.length);
  ReflectionPair out;
  for (int pol = 0; pol < 2; ++pol) {
    const complex<double> r = pol == 0 ? pair.rs : pair.rp;
    const complex<double> den = 1.0 - r * r * phase;
    if (std::abs(den) < 1e-14)
      throw CavityResonanceError(
          "cavity-resonance-singular: |1 - r^2 e^{2 i beta l}| < 1e-14");
    (pol == 0 ? out.rs : out.rp) = r / den;
  }
  return out;
}

}  // namespace molcp
