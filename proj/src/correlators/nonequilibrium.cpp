#include <cmath>

#include "dfgr/correlators.hpp"
#include "dfgr/parallel.hpp"

namespace dfgr {

namespace {

constexpr double kLadder[] = {0.125, 0.25, 0.5};

ComplexMatrix rotated(const RealMatrix& S, const ComplexVector& diag) {
  return S.transpose().cast<Complex>() * diag.asDiagonal() * S.cast<Complex>();
}

// det(-M) for an n x n matrix M.
PhasedDeterminant negated(PhasedDeterminant p, Index n) {
  if (n % 2) p.phase = wrap_phase(p.phase + std::numbers::pi);
  return p;
}

}  // namespace

NeqKernelSet neq_kernels(const DuschinskiiSystem& sys, double t1, double t2, double beta,
                         SigmaLayout layout) {
  const Index n = sys.size();
  const Complex tb(0, -beta);
  const ComplexVector a_beta = kernel_a(sys.omega_g, tb);
  const ComplexMatrix sbs_beta = rotated(sys.S, kernel_b(sys.omega_g, tb));
  const ComplexMatrix sas_beta = rotated(sys.S, a_beta);
  const double s = t1 - t2;

  NeqKernelSet k;
  k.t1 = t1;
  k.t2 = t2;
  k.G = kernel_b_minus_a(sys.omega_g, s).asDiagonal();
  k.G_beta = kernel_b_minus_a(sys.omega_g, tb).asDiagonal();
  const ComplexVector ae1 = kernel_a(sys.omega_e, -t1), be1 = kernel_b(sys.omega_e, -t1);
  const ComplexVector ae2 = kernel_a(sys.omega_e, t2), be2 = kernel_b(sys.omega_e, t2);
  const ComplexMatrix sbs = rotated(sys.S, kernel_b(sys.omega_g, s));
  const ComplexMatrix sas = rotated(sys.S, kernel_a(sys.omega_g, s));
  const ComplexMatrix coupling = layout == SigmaLayout::Derived ? sas_beta : ComplexMatrix(a_beta.asDiagonal());

  ComplexMatrix& m = k.Sigma;
  m = ComplexMatrix::Zero(4 * n, 4 * n);
  m.block(0, 0, n, n) = sbs_beta;
  m.block(0, 0, n, n).diagonal() += be2;
  m.block(0, n, n, n) = -coupling;
  m.block(n, 0, n, n) = -coupling;
  m.block(0, 3 * n, n, n).diagonal() = -ae2;
  m.block(3 * n, 0, n, n).diagonal() = -ae2;
  m.block(n, n, n, n) = sbs_beta;
  m.block(n, n, n, n).diagonal() += be1;
  m.block(n, 2 * n, n, n).diagonal() = -ae1;
  m.block(2 * n, n, n, n).diagonal() = -ae1;
  m.block(2 * n, 2 * n, n, n) = sbs;
  m.block(2 * n, 2 * n, n, n).diagonal() += be1;
  m.block(2 * n, 3 * n, n, n) = -sas;
  m.block(3 * n, 2 * n, n, n) = -sas;
  m.block(3 * n, 3 * n, n, n) = sbs;
  m.block(3 * n, 3 * n, n, n).diagonal() += be2;
  return k;
}

NeqEvaluator::NeqEvaluator(const DuschinskiiSystem& sys, double beta, std::vector<RealVector> couplings,
                           SigmaLayout layout)
    : sys_(sys),
      beta_(beta),
      couplings_(std::move(couplings)),
      layout_(layout),
      log_z_(log_partition_function(sys.omega_g, beta)) {
  sys_.validate();
  if (couplings_.empty()) couplings_.push_back(sys_.W);
  for (const auto& w : couplings_) {
    if (w.size() != sys_.size()) throw ValidationError("coupling vector has the wrong dimension");
  }
  const Complex tb(0, -beta);
  a_beta_ = kernel_a(sys_.omega_g, tb);
  sbs_beta_ = rotated(sys_.S, kernel_b(sys_.omega_g, tb));
  sas_beta_ = rotated(sys_.S, a_beta_);
  log_a_beta_ = diagonal_determinant(a_beta_);
  const ComplexVector g = kernel_b_minus_a(sys_.omega_g, tb);
  const ComplexVector d = sys_.d.cast<Complex>();
  u_beta_ = sys_.S.transpose().cast<Complex>() * g.cwiseProduct(d);
  dgd_beta_ = (g.array() * d.array().square()).sum();
  coupling_ = layout_ == SigmaLayout::Derived ? sas_beta_ : ComplexMatrix(a_beta_.asDiagonal());
}

NeqEvaluator::LagCache NeqEvaluator::lag(double s) const {
  const ComplexVector a = kernel_a(sys_.omega_g, s);
  const ComplexVector g = kernel_b_minus_a(sys_.omega_g, s);
  const ComplexVector d = sys_.d.cast<Complex>();
  LagCache c;
  c.sbs = rotated(sys_.S, kernel_b(sys_.omega_g, s));
  c.sas = rotated(sys_.S, a);
  c.log_a = diagonal_determinant(a);
  c.u = sys_.S.transpose().cast<Complex>() * g.cwiseProduct(d);
  c.dgd = (g.array() * d.array().square()).sum();
  return c;
}

NeqEvaluator::TimeCache NeqEvaluator::time(double t) const {
  TimeCache c;
  c.a_plus = kernel_a(sys_.omega_e, t);
  c.b_plus = kernel_b(sys_.omega_e, t);
  c.a_minus = -c.a_plus;
  c.b_minus = -c.b_plus;
  c.log_a_plus = diagonal_determinant(c.a_plus);
  c.log_a_minus = negated(c.log_a_plus, sys_.size());

  const Index n = sys_.size();
  ComplexMatrix xx = sbs_beta_;
  xx.diagonal() += c.b_plus;
  const LuFactorization lu(xx);
  c.log_det_x = lu.log_determinant();
  ComplexMatrix rhs(n, 2 * n + 1);
  rhs << coupling_, ComplexMatrix(c.a_plus.asDiagonal()), u_beta_;
  const ComplexMatrix sol = lu.solve(rhs);
  c.kxk = coupling_ * sol.leftCols(n);
  c.kxd = coupling_ * sol.middleCols(n, n);
  c.dxd = c.a_plus.asDiagonal() * sol.middleCols(n, n);
  c.ry = coupling_ * sol.col(2 * n);
  c.rw = c.a_plus.cwiseProduct(sol.col(2 * n));
  c.q0 = u_beta_.transpose() * sol.col(2 * n);
  return c;
}

CorrelationTerms NeqEvaluator::assemble(const TimeCache& t1, const TimeCache& t2, const LagCache& s) const {
  // Sigma over (y, z, w) after eliminating x through the t2 cache.
  const Index n = sys_.size();
  ComplexMatrix m(3 * n, 3 * n);
  m.setZero();
  m.block(0, 0, n, n) = sbs_beta_ - t2.kxk;
  m.block(0, 0, n, n).diagonal() += t1.b_minus;
  m.block(0, n, n, n).diagonal() = -t1.a_minus;
  m.block(n, 0, n, n).diagonal() = -t1.a_minus;
  m.block(0, 2 * n, n, n) = -t2.kxd;
  m.block(2 * n, 0, n, n) = -t2.kxd.transpose();
  m.block(n, n, n, n) = s.sbs;
  m.block(n, n, n, n).diagonal() += t1.b_minus;
  m.block(n, 2 * n, n, n) = -s.sas;
  m.block(2 * n, n, n, n) = -s.sas;
  m.block(2 * n, 2 * n, n, n) = s.sbs - t2.dxd;
  m.block(2 * n, 2 * n, n, n).diagonal() += t2.b_plus;
  const LuFactorization lu(m);

  const std::size_t k = couplings_.size();
  ComplexMatrix v(3 * n, k);
  for (std::size_t c = 0; c < k; ++c) {
    const ComplexVector w = couplings_[c].cast<Complex>();
    v.col(c) << u_beta_ + t2.ry, s.u - w, s.u + w + t2.rw;
  }
  const ComplexMatrix y = lu.solve(v);

  CorrelationTerms out;
  out.X = log_a_beta_ * t1.log_a_minus * s.log_a * t2.log_a_plus / (t2.log_det_x * lu.log_determinant());
  const Complex base = Complex(0, 1) * (dgd_beta_ + s.dgd);
  out.exponents.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Complex q = t2.q0 + (v.col(c).transpose() * y.col(c)).value();
    out.exponents[c] = base - Complex(0, 0.5) * q;
  }
  return out;
}

CorrelationTerms NeqEvaluator::terms(double t1, double t2) const {
  return assemble(time(t1), time(t2), lag(t1 - t2));
}

CorrelationTerms NeqEvaluator::edge_terms(double t1) const {
  // With t2 = 0 the last propagator is the identity and its coordinate merges
  // with the first; Sigma shrinks to 3n.
  const Index n = sys_.size();
  const TimeCache t = time(t1);
  const LagCache s = lag(t1);
  ComplexMatrix m = ComplexMatrix::Zero(3 * n, 3 * n);
  m.block(0, 0, n, n) = sbs_beta_ + s.sbs;
  if (layout_ == SigmaLayout::Derived) {
    m.block(0, n, n, n) = -sas_beta_;
    m.block(n, 0, n, n) = -sas_beta_;
  } else {
    m.block(0, n, n, n).diagonal() = -a_beta_;
    m.block(n, 0, n, n).diagonal() = -a_beta_;
  }
  m.block(0, 2 * n, n, n) = -s.sas;
  m.block(2 * n, 0, n, n) = -s.sas;
  m.block(n, n, n, n) = sbs_beta_;
  m.block(n, n, n, n).diagonal() += t.b_minus;
  m.block(n, 2 * n, n, n).diagonal() = -t.a_minus;
  m.block(2 * n, n, n, n).diagonal() = -t.a_minus;
  m.block(2 * n, 2 * n, n, n) = s.sbs;
  m.block(2 * n, 2 * n, n, n).diagonal() += t.b_minus;
  const LuFactorization lu(m);

  const std::size_t k = couplings_.size();
  ComplexMatrix v(3 * n, k);
  for (std::size_t c = 0; c < k; ++c) {
    const ComplexVector w = couplings_[c].cast<Complex>();
    v.col(c) << u_beta_ + s.u + w, u_beta_, s.u - w;
  }
  const ComplexMatrix y = lu.solve(v);

  CorrelationTerms out;
  out.X = log_a_beta_ * t.log_a_minus * s.log_a / lu.log_determinant();
  const Complex base = Complex(0, 1) * (dgd_beta_ + s.dgd);
  out.exponents.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const Complex q = v.col(c).transpose() * y.col(c);
    out.exponents[c] = base - Complex(0, 0.5) * q;
  }
  return out;
}

void NeqEvaluator::prepare_lattice(double dt, int steps) {
  if (!(dt > 0) || steps < 1) throw ValidationError("lattice needs dt > 0 and steps >= 1");
  dt_ = dt;
  lags_.assign(steps + 1, LagCache{});
  times_.assign(steps + 1, TimeCache{});
  parallel_for(static_cast<std::size_t>(steps), [&](std::size_t k) {
    lags_[k + 1] = lag((k + 1) * dt);
    times_[k + 1] = time((k + 1) * dt);
  });
}

CorrelationTerms NeqEvaluator::lattice_terms(int i, int j) const {
  return assemble(times_.at(i), times_.at(j), lags_.at(i - j));
}

namespace {

std::vector<std::vector<Complex>> unit_rows(std::size_t variants, std::size_t size) {
  return std::vector<std::vector<Complex>>(variants, std::vector<Complex>(size, Complex(1.0)));
}

}  // namespace

std::vector<std::vector<Complex>> neq_lattice_row(const NeqEvaluator& ev, int i,
                                                  const std::vector<Complex>& edge_values) {
  const std::size_t k = ev.variants();
  auto row = unit_rows(k, i + 1);
  if (i == 0) return row;
  const double dt = ev.lattice_dt();
  const double t1 = i * dt;
  const auto refine = [&](double s) { return ev.row_phase(t1, s); };

  BranchTracker branch = BranchTracker::anchored(
      kLadder[0] * dt, [&](double s) { return ev.terms(t1, t1 - s); }, refine);
  for (double f : {kLadder[1], kLadder[2]}) branch.advance(f * dt, ev.row_phase(t1, f * dt), refine);
  for (int j = i - 1; j >= 1; --j) {
    const CorrelationTerms t = ev.lattice_terms(i, j);
    const double root = branch.advance((i - j) * dt, t.X.phase, refine);
    for (std::size_t c = 0; c < k; ++c) row[c][j] = assemble_correlation(t.X, root, t.exponents[c], ev.log_z());
  }
  for (std::size_t c = 0; c < k; ++c) row[c][0] = edge_values.at(c);
  return row;
}

std::vector<std::vector<Complex>> neq_edge_column(const NeqEvaluator& ev, double dt, int steps) {
  const std::size_t k = ev.variants();
  auto col = unit_rows(k, steps + 1);
  if (steps == 0) return col;
  const auto refine = [&](double t) { return ev.edge_terms(t).X.phase; };
  BranchTracker branch =
      BranchTracker::anchored(kLadder[0] * dt, [&](double t) { return ev.edge_terms(t); }, refine);
  for (double f : {kLadder[1], kLadder[2]}) branch.advance(f * dt, refine(f * dt), refine);
  for (int i = 1; i <= steps; ++i) {
    const CorrelationTerms t = ev.edge_terms(i * dt);
    const double root = branch.advance(i * dt, t.X.phase, refine);
    for (std::size_t c = 0; c < k; ++c) col[c][i] = assemble_correlation(t.X, root, t.exponents[c], ev.log_z());
  }
  return col;
}

Complex neq_correlation(const DuschinskiiSystem& sys, double t1, double t2, double beta, SigmaLayout layout,
                        double max_step) {
  if (t1 < 0 || t2 < 0) throw ValidationError("nonequilibrium times must be non-negative");
  if (t1 == t2) return 1.0;
  if (t1 < t2) return std::conj(neq_correlation(sys, t2, t1, beta, layout, max_step));
  const NeqEvaluator ev(sys, beta, {}, layout);
  const double span = t1 - t2;
  const int steps = std::max(1, static_cast<int>(std::ceil(span / max_step)));
  const double h = span / steps;

  if (t2 == 0.0) {
    return neq_edge_column(ev, h, steps)[0].back();
  }
  const auto refine = [&](double s) { return ev.row_phase(t1, s); };
  BranchTracker branch = BranchTracker::anchored(
      kLadder[0] * h, [&](double s) { return ev.terms(t1, t1 - s); }, refine);
  for (double f : {kLadder[1], kLadder[2]}) branch.advance(f * h, refine(f * h), refine);
  CorrelationTerms t;
  double root = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double s = k * h;
    t = ev.terms(t1, k == steps ? t2 : t1 - s);
    root = branch.advance(s, t.X.phase, refine);
  }
  return assemble_correlation(t.X, root, t.exponents[0], ev.log_z());
}

ComplexMatrix neq_correlation_lattice(const DuschinskiiSystem& sys, double beta, double dt, int steps,
                                      SigmaLayout layout) {
  NeqEvaluator ev(sys, beta, {}, layout);
  ev.prepare_lattice(dt, steps);
  const auto edge = neq_edge_column(ev, dt, steps);
  ComplexMatrix out(steps + 1, steps + 1);
  parallel_for(static_cast<std::size_t>(steps + 1), [&](std::size_t i) {
    const auto row = neq_lattice_row(ev, static_cast<int>(i), {edge[0][i]});
    for (std::size_t j = 0; j <= i; ++j) out(i, j) = row[0][j];
  });
  for (int i = 0; i <= steps; ++i)
    for (int j = i + 1; j <= steps; ++j) out(i, j) = std::conj(out(j, i));
  return out;
}

}  // namespace dfgr
