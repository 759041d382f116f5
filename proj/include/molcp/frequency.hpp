#pragma once

#include <complex>

#include "molcp/errors.hpp"

namespace molcp {

/// A frequency restricted to the two axes the theory uses: real positive
/// (physical transition frequencies) or purely imaginary positive
/// (Matsubara axis, omega = i*xi). Electromagnetic square roots take
/// different, branch-safe forms on the two axes, so the axis is carried
/// explicitly instead of relying on a general complex number.
class Frequency {
 public:
  static Frequency real_axis(double omega) {
    if (!(omega > 0.0))
      throw NumericsError("Frequency::real_axis requires omega > 0");
    return Frequency(omega, false);
  }
  /// xi >= 0; xi = 0 is allowed only where the caller provides a dedicated
  /// static-limit evaluation path.
  static Frequency imaginary_axis(double xi) {
    if (xi < 0.0)
      throw NumericsError("Frequency::imaginary_axis requires xi >= 0");
    return Frequency(xi, true);
  }

  bool is_imaginary() const { return imaginary_; }
  /// omega for the real axis, xi for the imaginary axis (both in rad/s).
  double magnitude() const { return value_; }
  std::complex<double> as_complex() const {
    return imaginary_ ? std::complex<double>(0.0, value_)
                      : std::complex<double>(value_, 0.0);
  }

 private:
  Frequency(double v, bool imag) : value_(v), imaginary_(imag) {}
  double value_;
  bool imaginary_;
};

}  // namespace molcp
