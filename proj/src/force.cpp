#include "molcp/force.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "molcp/constants.hpp"

namespace molcp {

namespace k = constants;
using std::complex;

namespace {

// Kahan-compensated accumulator; Matsubara terms are summed ascending in N.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

// Diagonal of the dipole dyad d (x) conj(d) in the surface frame; the
// planar Green tensor is diagonal, so only these enter contractions.
struct DyadDiagonal {
  double para = 0.0;  // |d_x|^2 + |d_y|^2
  double perp = 0.0;  // |d_z|^2
  double trace() const { return para + perp; }
};

DyadDiagonal dyad_diagonal(const Eigen::Vector3cd& d) {
  return {std::norm(d(0)) + std::norm(d(1)), std::norm(d(2))};
}

// alpha contracted with a diagonal tensor gradient:
// (a_xx + a_yy) dG_xx + a_zz dG_zz. On the imaginary axis alpha is real.
double contract(const PolarizabilityTensor& alpha,
                const GreenTensorDiagonal& dg) {
  return (alpha(0, 0).real() + alpha(1, 1).real()) * dg.xx.real() +
         alpha(2, 2).real() * dg.zz.real();
}

double matsubara_sum(const HalfSpaceGeometry& geom,
                     const std::function<PolarizabilityTensor(
                         const Frequency&)>& alpha,
                     const MatsubaraSettings& settings) {
  const double T = settings.temperature;
  if (T < 0.0) throw NumericsError("Matsubara sum requires T >= 0");
  if (geom.material.is_vacuum() && !geom.cavity) return 0.0;

  if (T == 0.0) {
    // Zero-temperature limit: kB T sum_N -> (hbar / 2 pi) int dxi.
    // Integrate in segments of the geometric scale c/(2z); the integrand
    // decays through both retardation and the polarizability tails.
    const double scale = k::c / (2.0 * geom.z);
    auto f = [&](double xi) -> ScalarReal {
      const Frequency fr = Frequency::imaginary_axis(xi);
      return {contract(alpha(fr),
                       grad_z_scattering_green_imag_scaled(geom, xi))};
    };
    QuadratureOptions opt = geom.quad;
    const ScalarReal integral =
        integrate_semi_infinite<ScalarReal>(f, scale, opt, 1e-12);
    return -k::mu0 * (k::hbar / (2.0 * k::pi)) * integral.v;
  }

  const double xi_step = 2.0 * k::pi * k::k_B * T / k::hbar;
  const double xi_exp = 10.0 * k::c / (2.0 * geom.z);

  Kahan acc;
  const Frequency f0 = Frequency::imaginary_axis(0.0);
  acc.add(0.5 *
          contract(alpha(f0), grad_z_scattering_green_imag_scaled(geom, 0.0)));

  for (long n = 1;; ++n) {
    if (n > settings.max_terms)
      throw MatsubaraTruncationError(
          "matsubara-truncation: tail criterion not met within " +
          std::to_string(settings.max_terms) + " terms");
    const double xi = xi_step * static_cast<double>(n);
    const Frequency fr = Frequency::imaginary_axis(xi);
    const double term =
        contract(alpha(fr), grad_z_scattering_green_imag_scaled(geom, xi));
    acc.add(term);
    if (xi > xi_exp &&
        std::abs(term) <= settings.tail_rel_tol * std::abs(acc.sum))
      break;
  }
  return -k::mu0 * k::k_B * T * acc.sum;
}

bool dyads_isotropic(const MoleculeSpec& spec, int level_id) {
  Eigen::Matrix3cd sum = Eigen::Matrix3cd::Zero();
  for (const auto& cp : spec.couplings_of(level_id))
    sum += cp.d_n_to_partner * cp.d_n_to_partner.adjoint();
  const double tr = sum.trace().real();
  if (tr == 0.0) return true;
  const Eigen::Matrix3cd iso = (tr / 3.0) * Eigen::Matrix3cd::Identity();
  return (sum - iso).cwiseAbs().maxCoeff() <= 1e-10 * tr;
}

}  // namespace

double nonresonant_force_alpha(
    const HalfSpaceGeometry& geom,
    const std::function<PolarizabilityTensor(const Frequency&)>& alpha,
    const MatsubaraSettings& settings) {
  geom.validate();
  return matsubara_sum(geom, alpha, settings);
}

double nonresonant_force(const HalfSpaceGeometry& geom,
                         const MoleculeSpec& spec, int level_id,
                         const MatsubaraSettings& settings) {
  return nonresonant_force_alpha(
      geom,
      [&](const Frequency& fr) { return polarizability(spec, level_id, fr); },
      settings);
}

double lifshitz_like_force(const HalfSpaceGeometry& geom,
                           const MoleculeSpec& spec,
                           const MatsubaraSettings& settings) {
  return nonresonant_force(geom, spec, spec.ground_id(), settings);
}

ResonantForce resonant_force(const HalfSpaceGeometry& geom,
                             const MoleculeSpec& spec, int level_id, double T,
                             ForcePath path) {
  geom.validate();
  if (T < 0.0) throw NumericsError("resonant_force requires T >= 0");

  const bool isotropic = path == ForcePath::Isotropic ||
                         (path == ForcePath::Auto &&
                          dyads_isotropic(spec, level_id));

  ResonantForce out;
  // Transitions sharing |omega_nk| reuse one Green gradient evaluation.
  std::map<double, SpectralSplit> grad_cache;

  for (const auto& cp : spec.couplings_of(level_id)) {
    const double w_partner = cp.omega_partner_minus_n;
    const double w_abs = std::abs(w_partner);
    const bool downward = w_partner < 0.0;  // partner below occupied level

    // Theta(omega_nk)[n+1] for downward, -Theta(omega_kn) n for upward.
    const double nbar = photon_number(w_abs, T);
    const double weight = downward ? nbar + 1.0 : -nbar;
    if (weight == 0.0) continue;  // ground state at T = 0: exact zero

    auto it = grad_cache.find(w_abs);
    if (it == grad_cache.end())
      it = grad_cache.emplace(w_abs,
                              grad_z_scattering_green_real(geom, w_abs))
               .first;
    const SpectralSplit& grad = it->second;

    const double pref = k::mu0 * w_abs * w_abs * weight;
    double fp, fe;
    if (isotropic) {
      const double d2 = cp.d_n_to_partner.squaredNorm();
      fp = pref / 3.0 * d2 * grad.propagating.trace().real();
      fe = pref / 3.0 * d2 * grad.evanescent.trace().real();
    } else {
      const DyadDiagonal dy = dyad_diagonal(cp.d_n_to_partner);
      fp = pref * (dy.para * grad.propagating.xx.real() +
                   dy.perp * grad.propagating.zz.real());
      fe = pref * (dy.para * grad.evanescent.xx.real() +
                   dy.perp * grad.evanescent.zz.real());
    }
    out.propagating += fp;
    out.evanescent += fe;
    out.per_transition.push_back({level_id, cp.partner_id, fp, fe});
  }
  return out;
}

ForceDecomposition force_for_state(const HalfSpaceGeometry& geom,
                                   const MoleculeSpec& spec, int level_id,
                                   const MatsubaraSettings& settings,
                                   ForcePath path) {
  ForceDecomposition out;
  if (path == ForcePath::Auto)
    path = dyads_isotropic(spec, level_id) ? ForcePath::Isotropic
                                           : ForcePath::General;

  if (path == ForcePath::Isotropic) {
    // Scalar polarizability times the trace of the Green gradient.
    out.nonresonant = nonresonant_force_alpha(
        geom,
        [&](const Frequency& fr) -> PolarizabilityTensor {
          return isotropic_polarizability(spec, level_id, fr) *
                 Eigen::Matrix3cd::Identity();
        },
        settings);
  } else {
    out.nonresonant = nonresonant_force(geom, spec, level_id, settings);
  }

  const ResonantForce res =
      resonant_force(geom, spec, level_id, settings.temperature, path);
  out.resonant_propagating = res.propagating;
  out.resonant_evanescent = res.evanescent;
  out.per_transition = res.per_transition;
  out.total = out.nonresonant + out.resonant_propagating +
              out.resonant_evanescent;
  return out;
}

ForceDecomposition force_for_mixture(const HalfSpaceGeometry& geom,
                                     const MoleculeSpec& spec,
                                     const InternalState& state,
                                     const MatsubaraSettings& settings) {
  if (state.p.size() != spec.size())
    throw ConfigError("population vector length does not match level count");
  state.validate();

  ForceDecomposition out;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double pn = state.p[i];
    if (pn == 0.0) continue;
    const ForceDecomposition fn =
        force_for_state(geom, spec, spec.levels()[i].id, settings);
    out.nonresonant += pn * fn.nonresonant;
    out.resonant_propagating += pn * fn.resonant_propagating;
    out.resonant_evanescent += pn * fn.resonant_evanescent;
    for (const auto& t : fn.per_transition)
      out.per_transition.push_back(
          {t.from, t.to, pn * t.propagating, pn * t.evanescent});
  }
  out.total = out.nonresonant + out.resonant_propagating +
              out.resonant_evanescent;
  return out;
}

// -----------------------------------------------------------------------
// Asymptotic limits
// -----------------------------------------------------------------------

double asymptote_nonretarded(const HalfSpaceGeometry& geom,
                             const MoleculeSpec& spec, int level_id,
                             double T) {
  geom.validate();
  if (!(T > 0.0)) throw NumericsError("asymptote_nonretarded requires T > 0");
  const double z4 = std::pow(geom.z, 4);
  const double xi_step = 2.0 * k::pi * k::k_B * T / k::hbar;
  const auto& mat = geom.material;

  // Non-resonant: -(3 kB T / 8 pi eps0 z^4) sum' w_N r(i xi_N)
  //   * [a_xx + a_yy + 2 a_zz]/4; the weight reduces to alpha_n for
  // isotropic states.
  double nonres_sum = 0.0;
  if (!mat.is_vacuum()) {
    Kahan acc;
    const PolarizabilityTensor a0 =
        polarizability(spec, level_id, Frequency::imaginary_axis(0.0));
    acc.add(0.5 * (a0(0, 0).real() + a0(1, 1).real() +
                   2.0 * a0(2, 2).real()) / 4.0 * mat.static_rp());
    for (long n = 1;; ++n) {
      if (n > 2000000)
        throw MatsubaraTruncationError(
            "matsubara-truncation: non-retarded sum did not converge");
      const double xi = xi_step * static_cast<double>(n);
      const PolarizabilityTensor a =
          polarizability(spec, level_id, Frequency::imaginary_axis(xi));
      const double w =
          (a(0, 0).real() + a(1, 1).real() + 2.0 * a(2, 2).real()) / 4.0;
      const double eps = mat.permittivity_imag_axis(xi);
      const double term = w * (eps - 1.0) / (eps + 1.0);
      acc.add(term);
      if (n > 4 && std::abs(term) <= 1e-10 * std::abs(acc.sum)) break;
    }
    nonres_sum = acc.sum;
  }
  double force =
      -3.0 * k::k_B * T / (8.0 * k::pi * k::eps0 * z4) * nonres_sum;

  // Resonant near-field terms; the evanescent material factor is
  // (|eps|^2 - 1)/|eps + 1|^2 at the transition frequency.
  for (const auto& cp : spec.couplings_of(level_id)) {
    const double w_abs = std::abs(cp.omega_partner_minus_n);
    const bool downward = cp.omega_partner_minus_n < 0.0;
    const double nbar = photon_number(w_abs, T);
    const double weight = downward ? nbar + 1.0 : -nbar;
    if (weight == 0.0 || mat.is_vacuum()) continue;
    const complex<double> eps = mat.permittivity(Frequency::real_axis(w_abs));
    const double rfac = (std::norm(eps) - 1.0) / std::norm(eps + 1.0);
    const DyadDiagonal dy = dyad_diagonal(cp.d_n_to_partner);
    force -= 3.0 * weight * rfac * (dy.para + 2.0 * dy.perp) /
             (32.0 * k::pi * k::eps0 * z4);
  }
  return force;
}

double sum_n4_closed_form(double y) {
  if (!(y >= 0.0 && y < 1.0))
    throw NumericsError("sum_n4_closed_form requires 0 <= y < 1");
  const double om = 1.0 - y;
  return y * (1.0 + 11.0 * y + 11.0 * y * y + y * y * y) /
         (om * om * om * om * om);
}

namespace {

// Isotropic static polarizability of the state (the retarded limits are
// stated for isotropic states; anisotropic states use the trace average).
double alpha_static(const MoleculeSpec& spec, int level_id) {
  return isotropic_polarizability(spec, level_id,
                                  Frequency::imaginary_axis(0.0))
      .real();
}

// Resonant q ~ 0 retarded terms:
//   mu0/(6 pi c z) sum_k |d_nk|^2 w^3 {weights} Im[e^{2 i w z/c} rho(w)],
//   rho = (sqrt(eps) - 1)/(sqrt(eps) + 1).
double retarded_resonant(const HalfSpaceGeometry& geom,
                         const MoleculeSpec& spec, int level_id, double T,
                         bool conductor_limit) {
  double acc = 0.0;
  for (const auto& cp : spec.couplings_of(level_id)) {
    const double w_abs = std::abs(cp.omega_partner_minus_n);
    const bool downward = cp.omega_partner_minus_n < 0.0;
    const double nbar = photon_number(w_abs, T);
    const double weight = downward ? nbar + 1.0 : -nbar;
    if (weight == 0.0) continue;
    const double phase = 2.0 * w_abs * geom.z / k::c;
    double oscill;
    if (conductor_limit) {
      oscill = std::sin(phase);
    } else if (geom.material.is_vacuum()) {
      oscill = 0.0;
    } else {
      const complex<double> eps =
          geom.material.permittivity(Frequency::real_axis(w_abs));
      const complex<double> sq = std::sqrt(eps);
      const complex<double> rho = (sq - 1.0) / (sq + 1.0);
      oscill = std::imag(std::exp(complex<double>(0.0, phase)) * rho);
    }
    acc += weight * cp.d_n_to_partner.squaredNorm() * w_abs * w_abs * w_abs *
           oscill;
  }
  return k::mu0 / (6.0 * k::pi * k::c * geom.z) * acc;
}

}  // namespace

double asymptote_retarded(const HalfSpaceGeometry& geom,
                          const MoleculeSpec& spec, int level_id, double T) {
  geom.validate();
  if (!(T > 0.0)) throw NumericsError("asymptote_retarded requires T > 0");
  const double z = geom.z;
  const double z4 = std::pow(z, 4);
  const double a0 = alpha_static(spec, level_id);
  const double x = 2.0 * k::pi * k::k_B * T * z / (k::hbar * k::c);
  const bool conductor = geom.material.is_conductor();
  const double eps0s =
      geom.material.is_vacuum() ? 1.0 : geom.material.eps_static();

  // N = 0 static term.
  double force = -3.0 * k::k_B * T * a0 /
                 (16.0 * k::pi * k::eps0 * z4) * geom.material.static_rp();

  // N >= 1 terms resummed into the v-integral with the N^4 kernel.
  if (!geom.material.is_vacuum() && 2.0 * x < 700.0) {
    auto kernel = [&](double v) -> ScalarReal {
      double bracket;
      if (conductor) {
        bracket = 2.0 * v * v;  // eps(0) -> inf limit
      } else {
        const double s = std::sqrt(eps0s - 1.0 + v * v);
        bracket = -(v - s) / (v + s) +
                  (2.0 * v * v - 1.0) * (eps0s * v - s) / (eps0s * v + s);
      }
      const double y = std::exp(-2.0 * v * x);
      const double x2 = x * x;
      return {v * bracket * x2 * x2 * sum_n4_closed_form(y)};
    };
    const double v_max = 1.0 + 50.0 / x;
    const ScalarReal integral =
        integrate_adaptive<ScalarReal>(kernel, 1.0, v_max, geom.quad);
    force -= k::k_B * T * a0 / (2.0 * k::pi * k::eps0 * z4) * integral.v;
  }

  return force + retarded_resonant(geom, spec, level_id, T, false);
}

double asymptote_retarded_conductor(const HalfSpaceGeometry& geom,
                                    const MoleculeSpec& spec, int level_id,
                                    double T) {
  geom.validate();
  if (!(T > 0.0))
    throw NumericsError("asymptote_retarded_conductor requires T > 0");
  const double z = geom.z;
  const double z4 = std::pow(z, 4);
  const double a0 = alpha_static(spec, level_id);
  const double x = 2.0 * k::pi * k::k_B * T * z / (k::hbar * k::c);

  double force = -3.0 * k::k_B * T * a0 / (16.0 * k::pi * k::eps0 * z4);

  // The closed-form bracket divided by (e^{2x}-1)^4 equals 4 S(x) with
  //   S(x) = x^3 y(1+4y+y^2)/(1-y)^4 + (3x^2/2) y(1+y)/(1-y)^3
  //        + (3x/2) y/(1-y)^2 + (3/4) y/(1-y),  y = e^{-2x},
  // which is stable for both small and large x (no cancellation).
  const double y = std::exp(-2.0 * x);
  if (y > 0.0) {
    const double om = -std::expm1(-2.0 * x);  // 1 - y
    const double s = x * x * x * y * (1.0 + y * (4.0 + y)) /
                         (om * om * om * om) +
                     1.5 * x * x * y * (1.0 + y) / (om * om * om) +
                     1.5 * x * y / (om * om) + 0.75 * y / om;
    force -= k::k_B * T * a0 / (2.0 * k::pi * k::eps0 * z4) * s;
  }

  return force + retarded_resonant(geom, spec, level_id, T, true);
}

TwoLevelReference twolevel_reference(const TwoLevelSystem& system,
                                     const HalfSpaceGeometry& geom, double T) {
  geom.validate();
  if (!(system.omega > 0.0) || !(system.dipole > 0.0))
    throw ConfigError("two-level system requires omega > 0 and d > 0");
  if (!(T > 0.0)) throw NumericsError("twolevel_reference requires T > 0");

  const double d2 = system.dipole * system.dipole;
  const double z4 = std::pow(geom.z, 4);
  const double pref = d2 / (8.0 * k::pi * k::eps0 * z4);
  const double nbar = photon_number(system.omega, T);
  const double thermal_ratio = k::k_B * T / (k::hbar * system.omega);

  TwoLevelReference out;
  out.geometric_high_t = -pref * thermal_ratio;
  out.bracket_conductor = nbar - thermal_ratio;
  out.near_field_conductor = pref * out.bracket_conductor;

  double res_fac = 0.0;
  if (!geom.material.is_vacuum()) {
    const complex<double> eps =
        geom.material.permittivity(Frequency::real_axis(system.omega));
    res_fac = (std::norm(eps) - 1.0) / std::norm(eps + 1.0);
  }
  out.near_field =
      pref * (nbar * res_fac - thermal_ratio * geom.material.static_rp());
  return out;
}

double reduction_factor(const MoleculeSpec& spec, double T) {
  const double w10 = spec.lowest_transition_frequency();
  return 1.0 / (2.0 * photon_number(w10, T) + 1.0);
}

PotentialWell potential_depth(const HalfSpaceGeometry& proto,
                              const MoleculeSpec& spec,
                              const InternalState& state,
                              const MatsubaraSettings& settings,
                              const std::vector<double>& z_scan) {
  if (z_scan.size() < 5)
    throw ConfigError("potential_depth requires at least 5 scan points");
  for (std::size_t i = 1; i < z_scan.size(); ++i)
    if (!(z_scan[i] > z_scan[i - 1]))
      throw ConfigError("z scan must be strictly increasing");

  const std::size_t n = z_scan.size();
  std::vector<double> force(n);
  for (std::size_t i = 0; i < n; ++i) {
    HalfSpaceGeometry g = proto;
    g.z = z_scan[i];
    force[i] = force_for_mixture(g, spec, state, settings).total;
  }

  // U(z) = int_z^inf F dz' accumulated right to left (U(z_max) = 0).
  std::vector<double> u(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;)
    u[i] = u[i + 1] +
           0.5 * (force[i] + force[i + 1]) * (z_scan[i + 1] - z_scan[i]);

  // First interior local minimum of U flanked by local maxima.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(u[i] < u[i - 1] && u[i] <= u[i + 1])) continue;
    bool has_left = false, has_right = false;
    double left = 0.0, right = 0.0;
    for (std::size_t j = i; j-- > 1;)
      if (u[j] > u[j - 1] && u[j] >= u[j + 1]) {
        left = u[j];
        has_left = true;
        break;
      }
    for (std::size_t j = i + 1; j + 1 < n; ++j)
      if (u[j] >= u[j - 1] && u[j] > u[j + 1]) {
        right = u[j];
        has_right = true;
        break;
      }
    if (!has_left || !has_right) continue;  // no barrier on one side
    PotentialWell well;
    well.z_min = z_scan[i];
    well.depth_kelvin = (std::min(left, right) - u[i]) / k::k_B;
    return well;
  }
  throw NoWellFoundError(
      "no-well-found: potential has no flanked local minimum in the scan");
}

}  // namespace molcp
