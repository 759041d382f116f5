#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "molcp/errors.hpp"

namespace molcp {

struct QuadratureOptions {
  double rel_tol = 1e-9;      // target relative error of the accumulated value
  int max_panels = 1 << 15;   // refinement budget
};

/// Two-component integrand value holding the (xx, zz) diagonal of the
/// planar Green tensor; off-diagonals vanish by symmetry and yy = xx.
struct Diag2 {
  std::complex<double> xx{0.0, 0.0};
  std::complex<double> zz{0.0, 0.0};

  Diag2& operator+=(const Diag2& o) {
    xx += o.xx;
    zz += o.zz;
    return *this;
  }
  friend Diag2 operator+(Diag2 a, const Diag2& b) { return a += b; }
  friend Diag2 operator-(const Diag2& a, const Diag2& b) {
    return {a.xx - b.xx, a.zz - b.zz};
  }
  friend Diag2 operator*(double s, const Diag2& a) {
    return {s * a.xx, s * a.zz};
  }
  double norm() const {
    return std::max(std::abs(xx), std::abs(zz));
  }
};

struct QuadratureStats {
  double error_estimate = 0.0;
  int panels = 0;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (QUADPACK dqk15 values).
inline constexpr double kGK15Nodes[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993945, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};
inline constexpr double kGK15Weights[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552592, 0.16900472663926790, 0.19035057806478542,
    0.20443294007529889, 0.20948214108472783};
inline constexpr double kG7Weights[4] = {
    0.12948496616886969, 0.27970539148927664, 0.38183005050511894,
    0.41795918367346939};

template <typename Value, typename F>
void gk15(const F& f, double a, double b, Value& kronrod, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Value resk = kGK15Weights[7] * f(mid);
  Value resg = kG7Weights[3] * f(mid);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kGK15Nodes[j];
    const Value fsum = f(mid - dx) + f(mid + dx);
    resk += kGK15Weights[j] * fsum;
    if (j % 2 == 1) resg += kG7Weights[j / 2] * fsum;
  }
  kronrod = half * resk;
  err = (half * (resk - resg)).norm();
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7,15) panel integration of f over
/// [a, b]. Bisects the panel with the largest error estimate until the
/// total estimate drops below rel_tol * |integral| (with an absolute
/// floor for integrals that vanish identically). Throws QuadratureError
/// with the achieved estimate once the panel budget is exhausted.
/// `initial_panels` seeds the queue with equal panels; callers integrating
/// oscillatory phases pass roughly one panel per few oscillations.
template <typename Value, typename F>
Value integrate_adaptive(const F& f, double a, double b,
                         const QuadratureOptions& opt,
                         QuadratureStats* stats = nullptr,
                         int initial_panels = 1) {
  struct Panel {
    double a, b, err;
    Value val;
    std::int64_t seq;  // deterministic tie-break
  };
  struct Worse {
    bool operator()(const Panel& x, const Panel& y) const {
      if (x.err != y.err) return x.err < y.err;
      return x.seq > y.seq;
    }
  };

  std::priority_queue<Panel, std::vector<Panel>, Worse> panels;
  std::int64_t seq = 0;

  Value total{};
  double total_err = 0.0;
  const int n0 = std::max(1, std::min(initial_panels, opt.max_panels / 2));
  for (int i = 0; i < n0; ++i) {
    Panel p{a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0, 0.0, Value{},
            seq++};
    detail::gk15(f, p.a, p.b, p.val, p.err);
    total += p.val;
    total_err += p.err;
    panels.push(p);
  }
  int n_panels = n0;

  // Absolute floor: quadrature on an identically-zero integrand must
  // terminate without refinement.
  const double abs_floor = 1e-300;

  while (total_err > std::max(opt.rel_tol * total.norm(), abs_floor)) {
    if (n_panels >= opt.max_panels) {
      throw QuadratureError(
          "quadrature-failure: panel budget " +
              std::to_string(opt.max_panels) +
              " exhausted, achieved relative error estimate " +
              std::to_string(total.norm() > 0.0 ? total_err / total.norm()
                                                : total_err),
          total_err);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);

    Panel left{worst.a, mid, 0.0, Value{}, seq++};
    Panel right{mid, worst.b, 0.0, Value{}, seq++};
    detail::gk15(f, left.a, left.b, left.val, left.err);
    detail::gk15(f, right.a, right.b, right.val, right.err);

    total += (left.val + right.val) - worst.val;
    total_err += left.err + right.err - worst.err;
    panels.push(left);
    panels.push(right);
    ++n_panels;
    if (total_err < 0.0) total_err = 0.0;
  }

  if (stats) {
    stats->error_estimate = total_err;
    stats->panels = n_panels;
  }
  return total;
}

/// Integrates f over [0, inf) where f decays exponentially on the length
/// scale `decay_scale` (i.e. f ~ e^{-t/decay_scale} times a slowly growing
/// prefactor). Proceeds segment by segment, doubling the segment length,
/// and stops once a segment contributes below `tail_rel` of the running
/// total twice in a row.
template <typename Value, typename F>
Value integrate_semi_infinite(const F& f, double decay_scale,
                              const QuadratureOptions& opt,
                              double tail_rel = 1e-16) {
  Value total{};
  double a = 0.0;
  double len = 4.0 * decay_scale;
  int quiet = 0;
  for (int seg = 0; seg < 60; ++seg) {
    const Value part = integrate_adaptive<Value>(f, a, a + len, opt);
    total += part;
    if (part.norm() <= tail_rel * total.norm())
      ++quiet;
    else
      quiet = 0;
    if (quiet >= 2) return total;
    a += len;
    len *= 2.0;
  }
  throw QuadratureError(
      "quadrature-failure: semi-infinite tail did not settle", 0.0);
}

/// Scalar adapters so integrate_adaptive can be used with double/complex.
struct ScalarReal {
  double v = 0.0;
  ScalarReal& operator+=(const ScalarReal& o) {
    v += o.v;
    return *this;
  }
  friend ScalarReal operator+(ScalarReal a, const ScalarReal& b) {
    return a += b;
  }
  friend ScalarReal operator-(const ScalarReal& a, const ScalarReal& b) {
    return {a.v - b.v};
  }
  friend ScalarReal operator*(double s, const ScalarReal& a) {
    return {s * a.v};
  }
  double norm() const { return std::abs(v); }
};

}  // namespace molcp
