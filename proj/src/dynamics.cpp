#include "molcp/dynamics.hpp"

#include <cmath>
#include <map>
#include <unsupported/Eigen/MatrixFunctions>

#include "molcp/constants.hpp"

namespace molcp {

namespace k = constants;

Eigen::MatrixXd RateMatrix::generator() const {
  const Eigen::Index n = gamma.rows();
  Eigen::MatrixXd m = gamma.transpose();
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = -gamma.row(i).sum();
  return m;
}

RateMatrix transition_rates(const HalfSpaceGeometry& geom,
                            const MoleculeSpec& spec, double T) {
  geom.validate();
  if (T < 0.0) throw NumericsError("transition_rates requires T >= 0");

  const Eigen::Index n = static_cast<Eigen::Index>(spec.size());
  RateMatrix out;
  out.gamma = Eigen::MatrixXd::Zero(n, n);

  std::map<double, GreenTensorDiagonal> im_cache;
  for (const auto& t : spec.transitions()) {
    const double w = spec.transition_frequency(t);
    const double w_abs = std::abs(w);
    auto it = im_cache.find(w_abs);
    if (it == im_cache.end())
      it = im_cache.emplace(w_abs, im_total_green(geom, w_abs)).first;
    const GreenTensorDiagonal& img = it->second;

    // conj(d) . Im G . d with the diagonal tensor; real and >= 0.
    const double para = std::norm(t.d(0)) + std::norm(t.d(1));
    const double perp = std::norm(t.d(2));
    const double coupling = para * img.xx.real() + perp * img.zz.real();

    const int upper = w > 0.0 ? t.to : t.from;
    const int lower = w > 0.0 ? t.from : t.to;
    const double nbar = photon_number(w_abs, T);
    const double base = 2.0 * k::mu0 / k::hbar * w_abs * w_abs * coupling;

    out.gamma(spec.index_of(upper), spec.index_of(lower)) +=
        base * (nbar + 1.0);  // emission
    out.gamma(spec.index_of(lower), spec.index_of(upper)) +=
        base * nbar;  // absorption
  }
  return out;
}

namespace {

struct Solver {
  // Eigendecomposition of the generator when well-conditioned.
  bool use_eigen = false;
  Eigen::MatrixXd m;
  Eigen::MatrixXcd vectors;
  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors_inv;

  explicit Solver(const Eigen::MatrixXd& gen) : m(gen) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(gen);
    if (es.info() == Eigen::Success) {
      vectors = es.eigenvectors();
      values = es.eigenvalues();
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(vectors);
      if (lu.isInvertible()) {
        vectors_inv = lu.inverse();
        // Accept the eigenbasis only if it reproduces the generator.
        const double scale = gen.norm();
        const double resid =
            ((vectors * values.asDiagonal() * vectors_inv).real() - gen)
                .norm();
        use_eigen = scale == 0.0 || resid <= 1e-10 * std::max(scale, 1.0);
      }
    }
  }

  Eigen::VectorXd propagate(const Eigen::VectorXd& p0, double t) const {
    if (use_eigen) {
      Eigen::VectorXcd c = vectors_inv * p0.cast<std::complex<double>>();
      for (Eigen::Index i = 0; i < values.size(); ++i)
        c(i) *= std::exp(values(i) * t);
      return (vectors * c).real();
    }
    return ((m * t).exp() * p0).eval();  // scaling-and-squaring fallback
  }
};

InternalState to_state(Eigen::VectorXd p) {
  // Round-off can leave populations a hair negative; clamp within the
  // documented -1e-12 slack and renormalise.
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < -1e-10)
      throw NumericsError("evolution produced a negative population");
    if (p(i) < 0.0) p(i) = 0.0;
    sum += p(i);
  }
  InternalState s;
  s.p.assign(p.data(), p.data() + p.size());
  if (sum > 0.0)
    for (double& v : s.p) v /= sum;
  return s;
}

}  // namespace

Trajectory evolve(const RateMatrix& rates, const InternalState& initial,
                  const std::vector<double>& times) {
  initial.validate();
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ConfigError("time grid must be strictly increasing");
  if (static_cast<Eigen::Index>(initial.p.size()) != rates.gamma.rows())
    throw ConfigError("population vector length does not match rate matrix");

  const Solver solver(rates.generator());
  const Eigen::VectorXd p0 = Eigen::Map<const Eigen::VectorXd>(
      initial.p.data(), static_cast<Eigen::Index>(initial.p.size()));

  Trajectory out;
  out.times = times;
  out.method = solver.use_eigen ? "eigendecomposition" : "scaling-squaring";
  out.states.reserve(times.size());
  for (double t : times) {
    if (t < 0.0) throw ConfigError("times must be non-negative");
    out.states.push_back(t == 0.0 ? initial : to_state(solver.propagate(p0, t)));
  }
  return out;
}

InternalState evolve_to(const RateMatrix& rates, const InternalState& initial,
                        double t) {
  Trajectory tr = evolve(rates, initial, {t});
  return tr.states.front();
}

Trajectory transient_force(const HalfSpaceGeometry& geom,
                           const MoleculeSpec& spec,
                           const InternalState& initial, double T,
                           const std::vector<double>& times,
                           const MatsubaraSettings& settings) {
  const RateMatrix rates = transition_rates(geom, spec, T);
  Trajectory out = evolve(rates, initial, times);

  // Per-state forces are time-independent; the transient state is
  // anisotropic, so the general contraction is used throughout.
  std::vector<ForceDecomposition> per_state(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i)
    per_state[i] = force_for_state(geom, spec, spec.levels()[i].id, settings,
                                   ForcePath::General);

  out.forces.reserve(out.states.size());
  for (const auto& st : out.states) {
    ForceDecomposition f;
    for (std::size_t i = 0; i < spec.size(); ++i) {
      const double pn = st.p[i];
      if (pn == 0.0) continue;
      f.nonresonant += pn * per_state[i].nonresonant;
      f.resonant_propagating += pn * per_state[i].resonant_propagating;
      f.resonant_evanescent += pn * per_state[i].resonant_evanescent;
      for (const auto& tr : per_state[i].per_transition)
        f.per_transition.push_back(
            {tr.from, tr.to, pn * tr.propagating, pn * tr.evanescent});
    }
    f.total = f.nonresonant + f.resonant_propagating + f.resonant_evanescent;
    out.forces.push_back(std::move(f));
  }
  return out;
}

}  // namespace molcp
