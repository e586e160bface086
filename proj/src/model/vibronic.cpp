#include <sstream>

#include "dfgr/model.hpp"

namespace dfgr {

namespace {

constexpr double kEigenFloor = 1e-16;
constexpr double kOrthoTolerance = 1e-10;

struct Eigenbasis {
  RealVector values;
  RealMatrix vectors;
};

// Ascending eigenvalues; each column's largest-magnitude entry made positive.
// Entries within 1e-9 of the largest count as ties (mirror-symmetric wells
// give exact +-1/sqrt(2) pairs) and the first of them decides.
Eigenbasis canonical_eigenbasis(const RealMatrix& m, const char* which) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(m);
  if (es.info() != Eigen::Success) throw NotPositiveDefinite(std::string(which) + ": eigensolver failed");
  Eigenbasis out{es.eigenvalues(), es.eigenvectors()};
  for (Index i = 0; i < out.values.size(); ++i) {
    if (!(out.values[i] > kEigenFloor)) {
      std::ostringstream msg;
      msg << which << " is not positive definite (eigenvalue " << out.values[i] << ")";
      throw NotPositiveDefinite(msg.str());
    }
    const auto col = out.vectors.col(i);
    const double top = col.cwiseAbs().maxCoeff();
    Index k = 0;
    while (std::abs(col[k]) < top * (1 - 1e-9)) ++k;
    if (col[k] < 0) out.vectors.col(i) *= -1.0;
  }
  return out;
}

bool symmetric(const RealMatrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

double orthogonality_defect(const RealMatrix& q) {
  return (q.transpose() * q - RealMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

void QuadraticVibronic::validate() const {
  const Index n = omega2_g.rows();
  if (n == 0 || omega2_g.cols() != n || omega2_e.rows() != n || omega2_e.cols() != n ||
      lambda_g.size() != n || lambda_e.size() != n || W.size() != n) {
    throw ValidationError("QuadraticVibronic: inconsistent dimensions");
  }
  if (!symmetric(omega2_g) || !symmetric(omega2_e)) {
    throw ValidationError("QuadraticVibronic: curvature matrices must be symmetric");
  }
}

void DuschinskiiSystem::validate() const {
  const Index n = d.size();
  if (omega_g.size() != n || omega_e.size() != n || S.rows() != n || S.cols() != n || W.size() != n) {
    throw ValidationError("DuschinskiiSystem: inconsistent dimensions");
  }
  const double defect = orthogonality_defect(S);
  if (defect >= kOrthoTolerance) {
    std::ostringstream msg;
    msg << "Duschinskii matrix is not orthogonal (|S^T S - I| = " << defect << ")";
    throw NotOrthogonal(msg.str());
  }
}

DuschinskiiSystem DuschinskiiSystem::with_W(const RealVector& w) const {
  DuschinskiiSystem out = *this;
  out.W = w;
  return out;
}

DuschinskiiSystem DuschinskiiSystem::from_reduced(RealVector omega_g, RealVector omega_e, RealMatrix S,
                                                  RealVector d, RealVector W, Complex V,
                                                  double deltaG) {
  DuschinskiiSystem sys;
  sys.omega_g = DiagonalSpectrum(std::move(omega_g));
  sys.omega_e = DiagonalSpectrum(std::move(omega_e));
  sys.S = std::move(S);
  sys.d = std::move(d);
  sys.W = std::move(W);
  sys.V = V;
  sys.deltaG = deltaG;
  sys.excited_modes = RealMatrix::Identity(sys.S.rows(), sys.S.cols());
  sys.ground_modes = sys.S.transpose();
  sys.validate();
  return sys;
}

DuschinskiiSystem reduce_to_normal_modes(const QuadraticVibronic& h) {
  h.validate();
  const Eigenbasis g = canonical_eigenbasis(h.omega2_g, "ground curvature");
  const Eigenbasis e = canonical_eigenbasis(h.omega2_e, "excited curvature");

  // Well minima sit at -Omega^{-2} lambda.
  const RealVector shift_g = h.omega2_g.ldlt().solve(h.lambda_g);
  const RealVector shift_e = h.omega2_e.ldlt().solve(h.lambda_e);

  DuschinskiiSystem sys;
  sys.omega_g = DiagonalSpectrum(g.values.cwiseSqrt());
  sys.omega_e = DiagonalSpectrum(e.values.cwiseSqrt());
  sys.S = g.vectors.transpose() * e.vectors;
  sys.d = g.vectors.transpose() * (shift_g - shift_e);
  sys.W = e.vectors.transpose() * h.W;
  sys.V = h.V;
  sys.deltaG = h.E_g - h.E_e + 0.5 * (h.lambda_e.dot(shift_e) - h.lambda_g.dot(shift_g));
  sys.ground_modes = g.vectors;
  sys.excited_modes = e.vectors;
  sys.validate();
  return sys;
}

DuschinskiiSystem apply_point_transform(const DuschinskiiSystem& sys, const RealMatrix& Q) {
  const Index n = sys.size();
  if (Q.rows() != Q.cols() || Q.rows() > n) throw ValidationError("point transform: bad shape");
  const double defect = orthogonality_defect(Q);
  if (defect >= kOrthoTolerance) {
    std::ostringstream msg;
    msg << "point transform is not orthogonal (|Q^T Q - I| = " << defect << ")";
    throw NotOrthogonal(msg.str());
  }
  RealMatrix R = RealMatrix::Identity(n, n);
  R.topLeftCorner(Q.rows(), Q.cols()) = Q;

  // Rebuild the Hamiltonian in the original frame with the excited minimum at
  // the origin, transform it, and reduce again.
  const RealMatrix& Sg = sys.ground_modes;
  const RealMatrix& Se = sys.excited_modes;
  const RealVector wg2 = sys.omega_g.frequencies().array().square();
  const RealVector we2 = sys.omega_e.frequencies().array().square();
  const RealMatrix omega2_g = Sg * wg2.asDiagonal() * Sg.transpose();
  const RealMatrix omega2_e = Se * we2.asDiagonal() * Se.transpose();
  const RealVector ground_min = -Sg * sys.d;

  QuadraticVibronic h;
  h.omega2_g = R * omega2_g * R.transpose();
  h.omega2_e = R * omega2_e * R.transpose();
  h.omega2_g = 0.5 * (h.omega2_g + h.omega2_g.transpose()).eval();
  h.omega2_e = 0.5 * (h.omega2_e + h.omega2_e.transpose()).eval();
  h.lambda_g = -h.omega2_g * (R * ground_min);
  h.lambda_e = RealVector::Zero(n);
  h.W = R * (Se * sys.W);
  h.V = sys.V;
  h.E_e = 0.0;
  h.E_g = sys.deltaG + 0.5 * h.lambda_g.dot(h.omega2_g.ldlt().solve(h.lambda_g));
  DuschinskiiSystem out = reduce_to_normal_modes(h);
  out.deltaG = sys.deltaG;  // exact, free of the round trip
  return out;
}

double reorganization_energy(const DuschinskiiSystem& sys) {
  return 0.5 * (sys.omega_g.frequencies().array().square() * sys.d.array().square()).sum();
}

}  // namespace dfgr
