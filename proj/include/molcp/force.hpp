#pragma once

#include <functional>
#include <vector>

#include "molcp/green.hpp"
#include "molcp/molecule.hpp"

namespace molcp {

/// Matsubara summation control. xi_N = 2 pi kB T N / hbar; the N = 0 term
/// carries weight 1/2. At T = 0 the sum is replaced by its integral limit
/// (hbar/2pi) int dxi (zero-temperature reference evaluation).
struct MatsubaraSettings {
  double temperature = 300.0;  // K
  double tail_rel_tol = 1e-10;
  long max_terms = 1000000;
};

/// Contribution of a single molecular transition to the resonant force.
struct TransitionForce {
  int from = 0;  // occupied level
  int to = 0;    // partner level
  double propagating = 0.0;  // N, z-component
  double evanescent = 0.0;   // N
};

/// z-component of the Casimir-Polder force split into its non-resonant
/// (Matsubara) part and the resonant parts from propagating and evanescent
/// modes. Sign convention: negative = attraction toward the surface.
struct ForceDecomposition {
  double nonresonant = 0.0;           // N
  double resonant_propagating = 0.0;  // N
  double resonant_evanescent = 0.0;   // N
  double total = 0.0;                 // N, sum of the three parts
  std::vector<TransitionForce> per_transition;
};

enum class ForcePath { Auto, General, Isotropic };

/// Non-resonant (Matsubara-sum) force on eigenstate `level_id`:
///   F = -mu0 kB T sum_N (1 - delta_N0/2)
///       [ (a_xx + a_yy) d/dz(xi^2 g_xx) + a_zz d/dz(xi^2 g_zz) ](i xi_N).
/// Truncation: stop once |term| < tail_rel_tol * |accumulated| AND
/// xi_N > 10 c/(2z); throws MatsubaraTruncationError past max_terms.
double nonresonant_force(const HalfSpaceGeometry& geom,
                         const MoleculeSpec& spec, int level_id,
                         const MatsubaraSettings& settings);

/// Same Matsubara sum with an explicit polarizability (used for mixtures
/// and for the Lifshitz-like reference force).
double nonresonant_force_alpha(
    const HalfSpaceGeometry& geom,
    const std::function<PolarizabilityTensor(const Frequency&)>& alpha,
    const MatsubaraSettings& settings);

/// The naive Lifshitz-type force: non-resonant term evaluated with the
/// ground-state polarizability, regardless of the actual internal state.
double lifshitz_like_force(const HalfSpaceGeometry& geom,
                           const MoleculeSpec& spec,
                           const MatsubaraSettings& settings);

struct ResonantForce {
  double propagating = 0.0;  // N
  double evanescent = 0.0;   // N
  std::vector<TransitionForce> per_transition;
};

/// Resonant force on eigenstate `level_id`: real-photon contributions at
/// |omega_nk| per transition, downward transitions weighted by n + 1,
/// upward by n, contracted with the gradient of Re G^(1).
ResonantForce resonant_force(const HalfSpaceGeometry& geom,
                             const MoleculeSpec& spec, int level_id, double T,
                             ForcePath path = ForcePath::Auto);

/// Full decomposition for one eigenstate. Path selection: isotropic fast
/// path when the dipole dyad sum of the state is proportional to the
/// identity within 1e-10, general contraction otherwise.
ForceDecomposition force_for_state(const HalfSpaceGeometry& geom,
                                   const MoleculeSpec& spec, int level_id,
                                   const MatsubaraSettings& settings,
                                   ForcePath path = ForcePath::Auto);

/// Population-weighted force, linear in the population vector.
ForceDecomposition force_for_mixture(const HalfSpaceGeometry& geom,
                                     const MoleculeSpec& spec,
                                     const InternalState& state,
                                     const MatsubaraSettings& settings);

/// Non-retarded (near-field) limit, 1/z^4 power law; conductor static
/// factors take their analytic limits.
double asymptote_nonretarded(const HalfSpaceGeometry& geom,
                             const MoleculeSpec& spec, int level_id, double T);

/// Retarded limit with the one-dimensional v-integral over the static
/// permittivity and the q ~ 0 resonant terms; x = 2 pi kB T z / (hbar c).
double asymptote_retarded(const HalfSpaceGeometry& geom,
                          const MoleculeSpec& spec, int level_id, double T);

/// Good-conductor (|eps| >> 1) closed form of the retarded limit,
/// including the oscillating sin(2 omega z / c) resonant terms.
double asymptote_retarded_conductor(const HalfSpaceGeometry& geom,
                                    const MoleculeSpec& spec, int level_id,
                                    double T);

/// sum_{N=1}^inf N^4 y^N = y (1 + 11 y + 11 y^2 + y^3) / (1 - y)^5,
/// 0 <= y < 1.
double sum_n4_closed_form(double y);

/// Two-level reference system (transition frequency omega, real dipole
/// magnitude d).
struct TwoLevelSystem {
  double omega = 0.0;   // rad/s
  double dipole = 0.0;  // C m
};

struct TwoLevelReference {
  /// Geometric high-temperature limit for a perfectly conducting plate:
  /// -|d|^2 kB T / (8 pi eps0 z^4 hbar omega).
  double geometric_high_t = 0.0;  // N
  /// Near-field force with material factors:
  /// |d|^2/(8 pi eps0 z^4) [ n(w) (|eps(w)|^2-1)/|eps(w)+1|^2
  ///                         - kB T/(hbar w) (eps(0)-1)/(eps(0)+1) ].
  double near_field = 0.0;  // N
  /// Good-conductor approximation |d|^2/(8 pi eps0 z^4) [ n(w) - kBT/hbar w ].
  double near_field_conductor = 0.0;  // N
  /// The saturating bracket n(w) - kB T/(hbar w) (-> -1/2 at high T).
  double bracket_conductor = 0.0;
};

TwoLevelReference twolevel_reference(const TwoLevelSystem& system,
                                     const HalfSpaceGeometry& geom, double T);

/// Near-field reduction of the thermal force relative to the Lifshitz-like
/// one: 1 / (2 n(omega_10) + 1) with omega_10 the lowest transition.
double reduction_factor(const MoleculeSpec& spec, double T);

struct PotentialWell {
  double z_min = 0.0;        // m, position of the first local minimum of U
  double depth_kelvin = 0.0; // K, escape barrier height over the minimum
};

/// Integrates U(z) = int_z^inf F dz' (so that F = -dU/dz) along the given
/// scan by the trapezoid rule, with U(z_max) taken as the baseline, and
/// locates the first local minimum of U that is flanked by local maxima on
/// both sides. Depth is min(left barrier, right barrier) - U(min), in
/// kelvin. Throws NoWellFoundError when the scan has no such structure.
PotentialWell potential_depth(const HalfSpaceGeometry& proto,
                              const MoleculeSpec& spec,
                              const InternalState& state,
                              const MatsubaraSettings& settings,
                              const std::vector<double>& z_scan);

}  // namespace molcp
