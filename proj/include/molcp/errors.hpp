#pragma once

#include <stdexcept>
#include <string>

namespace molcp {

/// Malformed input files, bad scenario parameters, schema violations.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Base class for failures of the numerical machinery (quadrature,
/// Matsubara truncation, singular limits). Carries a human-readable
/// diagnostic including the point at which the failure occurred.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature exhausted its panel budget before reaching the
/// requested tolerance. `achieved` is the error estimate at give-up time.
class QuadratureError : public NumericsError {
 public:
  QuadratureError(const std::string& what, double achieved)
      : NumericsError(what), achieved_error(achieved) {}
  double achieved_error;
};

/// Matsubara sum failed to satisfy the tail criterion within max_terms.
class MatsubaraTruncationError : public NumericsError {
 public:
  explicit MatsubaraTruncationError(const std::string& what)
      : NumericsError(what) {}
};

/// Drude/plasma permittivity requested at exactly zero frequency.
class StaticDivergenceError : public NumericsError {
 public:
  explicit StaticDivergenceError(const std::string& what)
      : NumericsError(what) {}
};

/// Cavity reflection denominator |1 - r^2 e^{2 i beta l}| below threshold
/// (lossless wall exactly on resonance).
class CavityResonanceError : public NumericsError {
 public:
  explicit CavityResonanceError(const std::string& what)
      : NumericsError(what) {}
};

/// Real-axis polarizability requested at (or too close to) a transition
/// frequency.
class OnResonanceError : public NumericsError {
 public:
  explicit OnResonanceError(const std::string& what) : NumericsError(what) {}
};

/// Potential scan contains no restoring force zero.
class NoWellFoundError : public NumericsError {
 public:
  explicit NoWellFoundError(const std::string& what) : NumericsError(what) {}
};

}  // namespace molcp
