#include "molcp/molecule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "molcp/constants.hpp"

namespace molcp {

namespace k = constants;

MoleculeSpec::MoleculeSpec(std::string name,
                           std::vector<MolecularLevel> levels,
                           std::vector<DipoleTransition> transitions)
    : name_(std::move(name)),
      levels_(std::move(levels)),
      transitions_(std::move(transitions)) {
  if (levels_.empty()) throw ConfigError("molecule has no levels");

  std::unordered_map<int, int> seen;
  int n_ground = 0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    const auto& lv = levels_[i];
    if (lv.omega < 0.0)
      throw ConfigError("level " + std::to_string(lv.id) +
                        " has negative eigenfrequency");
    if (!seen.emplace(lv.id, static_cast<int>(i)).second)
      throw ConfigError("duplicate level id " + std::to_string(lv.id));
    if (lv.omega == 0.0) {
      ground_id_ = lv.id;
      ++n_ground;
    }
  }
  if (n_ground != 1)
    throw ConfigError("molecule must have exactly one level with omega = 0 "
                      "(the ground state); found " +
                      std::to_string(n_ground));

  for (const auto& t : transitions_) {
    if (!seen.count(t.from))
      throw ConfigError("transition references missing level id " +
                        std::to_string(t.from));
    if (!seen.count(t.to))
      throw ConfigError("transition references missing level id " +
                        std::to_string(t.to));
    if (transition_frequency(t) == 0.0)
      throw ConfigError("transition " + std::to_string(t.from) + " -> " +
                        std::to_string(t.to) +
                        " has zero transition frequency");
  }
}

int MoleculeSpec::index_of(int level_id) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].id == level_id) return static_cast<int>(i);
  throw ConfigError("unknown level id " + std::to_string(level_id));
}

double MoleculeSpec::lowest_transition_frequency() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& t : transitions_)
    lo = std::min(lo, std::abs(transition_frequency(t)));
  if (!std::isfinite(lo))
    throw ConfigError("molecule has no transitions");
  return lo;
}

std::vector<MoleculeSpec::Coupling> MoleculeSpec::couplings_of(
    int level_id) const {
  std::vector<Coupling> out;
  for (std::size_t i = 0; i < transitions_.size(); ++i) {
    const auto& t = transitions_[i];
    if (t.from == level_id) {
      out.push_back({t.to, level(t.to).omega - level(t.from).omega, t.d,
                     static_cast<int>(i)});
    } else if (t.to == level_id) {
      // stored direction is partner -> n; d_{n -> partner} = conj(d)
      out.push_back({t.from, level(t.from).omega - level(t.to).omega,
                     t.d.conjugate(), static_cast<int>(i)});
    }
  }
  return out;
}

InternalState InternalState::delta(const MoleculeSpec& spec, int level_id) {
  InternalState s;
  s.p.assign(spec.size(), 0.0);
  s.p[spec.index_of(level_id)] = 1.0;
  return s;
}

double InternalState::sum() const {
  double acc = 0.0;
  for (double v : p) acc += v;
  return acc;
}

void InternalState::validate() const {
  for (double v : p)
    if (v < 0.0) throw ConfigError("population vector has a negative entry");
  if (std::abs(sum() - 1.0) > 1e-12)
    throw ConfigError("population vector does not sum to 1 within 1e-12");
}

double photon_number(double omega, double T) {
  if (!(omega > 0.0))
    throw NumericsError("photon_number requires omega > 0");
  if (T < 0.0) throw NumericsError("photon_number requires T >= 0");
  if (T == 0.0) return 0.0;
  return 1.0 / std::expm1(k::hbar * omega / (k::k_B * T));
}

namespace {

void check_off_resonance(const MoleculeSpec& spec, int level_id,
                         const Frequency& freq) {
  if (freq.is_imaginary()) return;
  const double w = freq.magnitude();
  for (const auto& cp : spec.couplings_of(level_id)) {
    const double wkn = std::abs(cp.omega_partner_minus_n);
    if (std::abs(w - wkn) < 1e-6 * wkn)
      throw OnResonanceError(
          "on-resonance: real-axis polarizability requested within 1e-6 "
          "relative of transition frequency " +
          std::to_string(wkn) + " rad/s");
  }
}

}  // namespace

PolarizabilityTensor polarizability(const MoleculeSpec& spec, int level_id,
                                    const Frequency& freq) {
  check_off_resonance(spec, level_id, freq);
  const std::complex<double> w = freq.as_complex();
  PolarizabilityTensor alpha = PolarizabilityTensor::Zero();
  for (const auto& cp : spec.couplings_of(level_id)) {
    const double wkn = cp.omega_partner_minus_n;
    // d_nk = d_{n -> partner}; d_kn = conj(d_nk)
    const Eigen::Vector3cd dnk = cp.d_n_to_partner;
    const Eigen::Vector3cd dkn = dnk.conjugate();
    alpha += (dkn * dnk.transpose()) / (w + wkn) -
             (dnk * dkn.transpose()) / (w - wkn);
  }
  alpha /= k::hbar;
  if (freq.is_imaginary()) {
    // exact on the imaginary axis; drop the O(eps) imaginary round-off
    return alpha.real().cast<std::complex<double>>();
  }
  return alpha;
}

std::complex<double> isotropic_polarizability(const MoleculeSpec& spec,
                                              int level_id,
                                              const Frequency& freq) {
  check_off_resonance(spec, level_id, freq);
  const std::complex<double> w = freq.as_complex();
  std::complex<double> alpha = 0.0;
  for (const auto& cp : spec.couplings_of(level_id)) {
    const double wkn = cp.omega_partner_minus_n;
    const double d2 = cp.d_n_to_partner.squaredNorm();
    alpha += d2 / (w + wkn) - d2 / (w - wkn);
  }
  alpha /= 3.0 * k::hbar;
  if (freq.is_imaginary()) return {alpha.real(), 0.0};
  return alpha;
}

InternalState boltzmann_populations(const MoleculeSpec& spec, double T) {
  if (!(T > 0.0))
    throw NumericsError("boltzmann_populations requires T > 0");
  InternalState s;
  s.p.resize(spec.size());
  double z = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    s.p[i] = std::exp(-k::hbar * spec.levels()[i].omega / (k::k_B * T));
    z += s.p[i];
  }
  for (double& v : s.p) v /= z;
  return s;
}

PolarizabilityTensor mixture_polarizability(const MoleculeSpec& spec,
                                            const InternalState& state,
                                            const Frequency& freq) {
  if (state.p.size() != spec.size())
    throw ConfigError("population vector length does not match level count");
  PolarizabilityTensor alpha = PolarizabilityTensor::Zero();
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (state.p[i] == 0.0) continue;
    alpha += state.p[i] * polarizability(spec, spec.levels()[i].id, freq);
  }
  return alpha;
}

PolarizabilityTensor thermal_polarizability(const MoleculeSpec& spec, double T,
                                            const Frequency& freq) {
  return mixture_polarizability(spec, boltzmann_populations(spec, T), freq);
}

}  // namespace molcp
