#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "molcp/force.hpp"
#include "molcp/green.hpp"
#include "molcp/molecule.hpp"

namespace molcp {

/// Transition rates gamma(n, k) for n -> k (1/s), indexed in
/// MoleculeSpec::levels() order. gamma(n, n) = 0; connected pairs satisfy
/// detailed balance gamma_nk / gamma_kn = e^{hbar omega_nk / kB T}.
struct RateMatrix {
  Eigen::MatrixXd gamma;

  /// Generator M of dp/dt = M p: M_nk = gamma_kn (k != n),
  /// M_nn = -sum_k gamma_nk. Columns sum to zero.
  Eigen::MatrixXd generator() const;
};

/// Time-evolved populations, and (optionally) the force they produce.
struct Trajectory {
  std::vector<double> times;          // s, strictly increasing
  std::vector<InternalState> states;  // one per time
  std::vector<ForceDecomposition> forces;  // filled by transient_force
  std::string method;  // "eigendecomposition" or "scaling-squaring"
};

/// Rates from the total (free-space + scattering) Green tensor:
///   Gamma_nk = (2 mu0/hbar) w_nk^2 { Theta(w_nk)[n+1] + Theta(w_kn) n }
///              d_nk . Im G(r_A, r_A, |w_nk|) . d_kn.
/// The free-space part keeps spontaneous emission alive at z -> infinity.
RateMatrix transition_rates(const HalfSpaceGeometry& geom,
                            const MoleculeSpec& spec, double T);

/// Solves the rate equations
///   dp_n/dt = -sum_k Gamma_nk p_n + sum_k Gamma_kn p_k
/// by eigendecomposition of the generator, falling back to a
/// scaling-and-squaring matrix exponential when the eigenbasis is too
/// ill-conditioned. Population is conserved up to float.
Trajectory evolve(const RateMatrix& rates, const InternalState& initial,
                  const std::vector<double>& times);

/// Populations at a single time (same solver as evolve()).
InternalState evolve_to(const RateMatrix& rates, const InternalState& initial,
                        double t);

/// Evolves the populations at the geometry's position and attaches the
/// time-dependent force F(t) = sum_n p_n(t) F_n. Per-state forces are
/// computed once (they are time-independent) with the general anisotropic
/// contraction: transient states are anisotropic.
Trajectory transient_force(const HalfSpaceGeometry& geom,
                           const MoleculeSpec& spec,
                           const InternalState& initial, double T,
                           const std::vector<double>& times,
                           const MatsubaraSettings& settings);

}  // namespace molcp
