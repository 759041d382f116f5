#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "molcp/errors.hpp"
#include "molcp/frequency.hpp"

namespace molcp {

/// One internal energy eigenstate. omega is the eigenfrequency relative to
/// the ground state (rad/s); exactly one level per molecule has omega = 0.
struct MolecularLevel {
  int id = 0;
  double omega = 0.0;  // rad/s
  std::string label;
};

/// Dipole matrix element d_{from -> to} (C m). Only one direction is
/// stored; the reverse element is the complex conjugate (hermiticity of
/// the dipole operator).
struct DipoleTransition {
  int from = 0;
  int to = 0;
  Eigen::Vector3cd d = Eigen::Vector3cd::Zero();
  double dipole_squared() const { return d.squaredNorm(); }
};

/// 3x3 polarizability tensor, C^2 m^2 / J.
using PolarizabilityTensor = Eigen::Matrix3cd;

/// Immutable level + transition data of one molecule.
class MoleculeSpec {
 public:
  MoleculeSpec(std::string name, std::vector<MolecularLevel> levels,
               std::vector<DipoleTransition> transitions);

  const std::string& name() const { return name_; }
  const std::vector<MolecularLevel>& levels() const { return levels_; }
  const std::vector<DipoleTransition>& transitions() const {
    return transitions_;
  }
  std::size_t size() const { return levels_.size(); }

  /// Index into levels() for a level id; throws ConfigError for unknown ids.
  int index_of(int level_id) const;
  const MolecularLevel& level(int level_id) const {
    return levels_[index_of(level_id)];
  }
  int ground_id() const { return ground_id_; }

  /// Transition frequency omega_m - omega_n of a stored transition.
  double transition_frequency(const DipoleTransition& t) const {
    return level(t.to).omega - level(t.from).omega;
  }

  /// Smallest |omega_to - omega_from| over all transitions.
  double lowest_transition_frequency() const;

  /// Transitions touching the given level, with the dipole vector oriented
  /// n -> partner (conjugated when the stored direction is partner -> n).
  struct Coupling {
    int partner_id;
    double omega_partner_minus_n;  // rad/s, sign carries up/down
    Eigen::Vector3cd d_n_to_partner;
    int transition_index;  // position in transitions()
  };
  std::vector<Coupling> couplings_of(int level_id) const;

 private:
  std::string name_;
  std::vector<MolecularLevel> levels_;
  std::vector<DipoleTransition> transitions_;
  int ground_id_ = 0;
};

/// Incoherent population vector aligned with MoleculeSpec::levels() order.
struct InternalState {
  std::vector<double> p;

  static InternalState delta(const MoleculeSpec& spec, int level_id);
  /// Validates p_n >= 0 and sum = 1 within 1e-12.
  void validate() const;
  double sum() const;
};

/// Bose-Einstein occupation 1/(e^{hbar w / kB T} - 1); 0 at T = 0.
/// Throws NumericsError for omega <= 0 or T < 0.
double photon_number(double omega, double T);

/// Polarizability tensor of eigenstate n:
///   alpha_n(w) = (1/hbar) sum_k [ d_kn d_nk / (w + w_kn)
///                               - d_nk d_kn / (w - w_kn) ].
/// Imaginary-axis evaluation needs no regulator and yields a real tensor;
/// real-axis evaluation is principal-value only and throws
/// OnResonanceError within 1e-6 relative of a transition frequency.
PolarizabilityTensor polarizability(const MoleculeSpec& spec, int level_id,
                                    const Frequency& freq);

/// Isotropic (scalar) polarizability, |d_nk|^2 replacing the dyads with a
/// factor 1/3; equals Tr(alpha_n)/3.
std::complex<double> isotropic_polarizability(const MoleculeSpec& spec,
                                              int level_id,
                                              const Frequency& freq);

/// Boltzmann distribution p_n ~ e^{-hbar omega_n / kB T} over the levels
/// present in the spec. Throws for T <= 0.
InternalState boltzmann_populations(const MoleculeSpec& spec, double T);

/// Thermal polarizability alpha_T = sum_n p_n alpha_n at temperature T.
PolarizabilityTensor thermal_polarizability(const MoleculeSpec& spec, double T,
                                            const Frequency& freq);

/// Population-weighted polarizability for an arbitrary state.
PolarizabilityTensor mixture_polarizability(const MoleculeSpec& spec,
                                            const InternalState& state,
                                            const Frequency& freq);

}  // namespace molcp
