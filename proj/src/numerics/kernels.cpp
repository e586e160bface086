#include <algorithm>
#include <sstream>

#include "dfgr/numerics.hpp"

namespace dfgr {

DiagonalSpectrum::DiagonalSpectrum(RealVector frequencies) : frequencies_(std::move(frequencies)) {
  for (Index i = 0; i < frequencies_.size(); ++i) {
    if (!(frequencies_[i] > 0.0) || !std::isfinite(frequencies_[i])) {
      throw std::invalid_argument("DiagonalSpectrum: frequencies must be finite and positive");
    }
    if (i > 0 && frequencies_[i] < frequencies_[i - 1]) {
      throw std::invalid_argument("DiagonalSpectrum: frequencies must be sorted ascending");
    }
  }
}

namespace {

[[noreturn]] void throw_pole(const char* kernel, double omega, Complex t) {
  std::ostringstream msg;
  msg << kernel << " kernel is singular at omega=" << omega << ", t=(" << t.real() << ","
      << t.imag() << ")";
  throw SingularKernel(msg.str());
}

template <typename Entry>
ComplexVector fill(const DiagonalSpectrum& omega, Entry entry) {
  ComplexVector out(omega.size());
  for (Index i = 0; i < omega.size(); ++i) out[i] = entry(omega[i]);
  return out;
}

}  // namespace

ComplexVector kernel_a(const DiagonalSpectrum& omega, Complex t) {
  return fill(omega, [t](double w) {
    Complex r;
    if (!detail::reciprocal_sin(w * t, r)) throw_pole("a", w, t);
    return w * r;
  });
}

ComplexVector kernel_b(const DiagonalSpectrum& omega, Complex t) {
  return fill(omega, [t](double w) {
    Complex r;
    if (!detail::cotangent(w * t, r)) throw_pole("b", w, t);
    return w * r;
  });
}

ComplexVector kernel_b_minus_a(const DiagonalSpectrum& omega, Complex t) {
  return fill(omega, [t](double w) {
    Complex r;
    if (!detail::tangent(0.5 * w * t, r)) throw_pole("b-a", w, t);
    return -w * r;
  });
}

ComplexVector kernel_b_plus_a(const DiagonalSpectrum& omega, Complex t) {
  return fill(omega, [t](double w) {
    Complex r;
    if (!detail::cotangent(0.5 * w * t, r)) throw_pole("b+a", w, t);
    return w * r;
  });
}

}  // namespace dfgr
