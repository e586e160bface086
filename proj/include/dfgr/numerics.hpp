#pragma once

// Dense complex linear algebra and the complex-time harmonic kernels
// a(t) = Omega / sin(Omega t) and b(t) = Omega / tan(Omega t).

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "dfgr/errors.hpp"

namespace dfgr {

using Complex = std::complex<double>;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Strictly positive, ascending harmonic frequencies (a.u.).
class DiagonalSpectrum {
 public:
  DiagonalSpectrum() = default;
  explicit DiagonalSpectrum(RealVector frequencies);

  const RealVector& frequencies() const { return frequencies_; }
  Index size() const { return frequencies_.size(); }
  double operator[](Index i) const { return frequencies_[i]; }
  double max() const { return frequencies_.size() ? frequencies_.maxCoeff() : 0.0; }

 private:
  RealVector frequencies_;
};

namespace detail {

// Magnitude below which sin/cos of a kernel argument counts as a pole.
inline constexpr double kPoleFloor = 1e-300;
// Beyond this |Im u| the exponential forms below replace std::sin/std::cos.
inline constexpr double kLargeImaginary = 1.0;

/// 1/sin(u), with the growing exponential divided out analytically when
/// |Im u| is large.  Returns false when u sits on a zero of sin.
template <typename Real>
bool reciprocal_sin(std::complex<Real> u, std::complex<Real>& out) {
  using C = std::complex<Real>;
  const Real y = u.imag();
  if (std::abs(y) < kLargeImaginary) {
    const C s = std::sin(u);
    if (std::abs(s) < kPoleFloor) return false;
    out = Real(1) / s;
    return true;
  }
  const C i(0, 1);
  if (y > 0) {
    const C e = std::exp(i * u);
    out = Real(-2) * i * e / (Real(1) - e * e);
  } else {
    const C e = std::exp(-i * u);
    out = Real(2) * i * e / (Real(1) - e * e);
  }
  return true;
}

/// cot(u); false on a zero of sin.
template <typename Real>
bool cotangent(std::complex<Real> u, std::complex<Real>& out) {
  using C = std::complex<Real>;
  const Real y = u.imag();
  if (std::abs(y) < kLargeImaginary) {
    const C s = std::sin(u);
    if (std::abs(s) < kPoleFloor) return false;
    out = std::cos(u) / s;
    return true;
  }
  const C i(0, 1);
  const C e = y > 0 ? std::exp(i * u) : std::exp(-i * u);
  const C ratio = (Real(1) + e * e) / (Real(1) - e * e);
  out = y > 0 ? -i * ratio : i * ratio;
  return true;
}

/// tan(u); false on a zero of cos.
template <typename Real>
bool tangent(std::complex<Real> u, std::complex<Real>& out) {
  using C = std::complex<Real>;
  const Real y = u.imag();
  if (std::abs(y) < kLargeImaginary) {
    const C c = std::cos(u);
    if (std::abs(c) < kPoleFloor) return false;
    out = std::sin(u) / c;
    return true;
  }
  const C i(0, 1);
  const C e = y > 0 ? std::exp(i * u) : std::exp(-i * u);
  const C ratio = (Real(1) - e * e) / (Real(1) + e * e);
  out = y > 0 ? i * ratio : -i * ratio;
  return true;
}

}  // namespace detail

/// Diagonal of a(t) = Omega [sin(Omega t)]^{-1}.
ComplexVector kernel_a(const DiagonalSpectrum& omega, Complex t);
/// Diagonal of b(t) = Omega [tan(Omega t)]^{-1}.
ComplexVector kernel_b(const DiagonalSpectrum& omega, Complex t);
/// b(t) - a(t) = -Omega tan(Omega t / 2), without the cancellation.
ComplexVector kernel_b_minus_a(const DiagonalSpectrum& omega, Complex t);
/// b(t) + a(t) = Omega cot(Omega t / 2).
ComplexVector kernel_b_plus_a(const DiagonalSpectrum& omega, Complex t);

/// A determinant held as exp(log_magnitude) * exp(i phase), phase in (-pi, pi].
struct PhasedDeterminant {
  double log_magnitude = 0.0;
  double phase = 0.0;

  static PhasedDeterminant from_value(Complex z);

  /// Materializes the determinant; overflows for large log_magnitude.
  Complex value() const { return std::polar(std::exp(log_magnitude), phase); }

  PhasedDeterminant& operator*=(const PhasedDeterminant& other);
  PhasedDeterminant& operator/=(const PhasedDeterminant& other);
  friend PhasedDeterminant operator*(PhasedDeterminant a, const PhasedDeterminant& b) { return a *= b; }
  friend PhasedDeterminant operator/(PhasedDeterminant a, const PhasedDeterminant& b) { return a /= b; }
};

/// Wraps an angle into (-pi, pi].
double wrap_phase(double angle);

/// Determinant of diag(entries) in log-phase form.
PhasedDeterminant diagonal_determinant(const ComplexVector& entries);

/// Partial-pivoted LU of a square complex matrix.  Throws SingularMatrix when
/// a pivot falls below 1e-14 times the largest entry of the input.
class LuFactorization {
 public:
  static constexpr double kPivotTolerance = 1e-14;

  LuFactorization() = default;
  explicit LuFactorization(const ComplexMatrix& m) { compute(m); }

  /// Refactorizes in place, reusing storage.
  void compute(const ComplexMatrix& m);

  Index size() const { return lu_.rows(); }

  template <typename Rhs>
  auto solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    return lu_.solve(rhs);
  }

  ComplexMatrix inverse() const { return lu_.inverse(); }

  PhasedDeterminant log_determinant() const;

  /// Raw complex determinant; only offered for n <= 8.
  Complex determinant() const;

 private:
  Eigen::PartialPivLU<ComplexMatrix> lu_;
};

LuFactorization lu_factor(const ComplexMatrix& m);
PhasedDeterminant phased_det(const ComplexMatrix& m);

/// Follows one branch of sqrt(z) along a sequence of samples known only by
/// their phases.  Each new root is the one nearer in phase to its predecessor;
/// a sample phase jump of pi/2 or more is a BranchAmbiguity.
class SqrtBranch {
 public:
  static constexpr double kMaxJump = std::numbers::pi / 2;

  /// Starts at a sample with phase `sample_phase`, choosing the root whose
  /// phase is nearest `anchor_root_phase`.
  SqrtBranch(double sample_phase, double anchor_root_phase);

  /// Advances to the next sample and returns the (unwrapped) root phase.
  double advance(double sample_phase);

  /// True when advancing to `sample_phase` would not be ambiguous.
  bool accepts(double sample_phase) const;

  double root_phase() const { return unwrapped_ / 2; }

 private:
  double unwrapped_;  // continuous phase of the samples
};

std::vector<Complex> branch_continued_sqrt(std::span<const Complex> values, Complex anchor);

}  // namespace dfgr
