#include <sstream>

#include "dfgr/numerics.hpp"

namespace dfgr {

double wrap_phase(double angle) {
  constexpr double kTwoPi = 2 * std::numbers::pi;
  double r = std::remainder(angle, kTwoPi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

PhasedDeterminant PhasedDeterminant::from_value(Complex z) {
  return {std::log(std::abs(z)), std::arg(z)};
}

PhasedDeterminant& PhasedDeterminant::operator*=(const PhasedDeterminant& other) {
  log_magnitude += other.log_magnitude;
  phase = wrap_phase(phase + other.phase);
  return *this;
}

PhasedDeterminant& PhasedDeterminant::operator/=(const PhasedDeterminant& other) {
  log_magnitude -= other.log_magnitude;
  phase = wrap_phase(phase - other.phase);
  return *this;
}

PhasedDeterminant diagonal_determinant(const ComplexVector& entries) {
  PhasedDeterminant det;
  double phase = 0.0;
  for (Index i = 0; i < entries.size(); ++i) {
    det.log_magnitude += std::log(std::abs(entries[i]));
    phase += std::arg(entries[i]);
  }
  det.phase = wrap_phase(phase);
  return det;
}

void LuFactorization::compute(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("LuFactorization: matrix must be square and non-empty");
  }
  lu_.compute(m);
  const double scale = m.cwiseAbs().maxCoeff();
  const double smallest = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(smallest >= kPivotTolerance * scale)) {
    std::ostringstream msg;
    msg << "singular matrix: pivot " << smallest << " below " << kPivotTolerance
        << " x largest entry " << scale;
    throw SingularMatrix(msg.str());
  }
}

PhasedDeterminant LuFactorization::log_determinant() const {
  PhasedDeterminant det = diagonal_determinant(lu_.matrixLU().diagonal());
  if (lu_.permutationP().determinant() < 0) det.phase = wrap_phase(det.phase + std::numbers::pi);
  return det;
}

Complex LuFactorization::determinant() const {
  if (size() > 8) {
    throw std::logic_error("LuFactorization::determinant: use log_determinant() for n > 8");
  }
  return lu_.determinant();
}

LuFactorization lu_factor(const ComplexMatrix& m) { return LuFactorization(m); }

PhasedDeterminant phased_det(const ComplexMatrix& m) { return LuFactorization(m).log_determinant(); }

}  // namespace dfgr
