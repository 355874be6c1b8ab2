#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace hardyiso {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Neumaier-compensated accumulator. Summation order is the call order, so
/// results are reproducible as long as callers add terms in a fixed order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
 public:
  void add(Complex z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  Complex value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

/// 1 - |z|^2 without forming |z|^2 first.
inline double deficit(Complex z) {
  const double r = std::abs(z);
  return (1.0 - r) * (1.0 + r);
}

/// Principal argument in (-pi, pi].
inline double principal_arg(Complex z) { return std::arg(z); }

inline Complex unit(Complex z) { return z / std::abs(z); }

}  // namespace hardyiso
