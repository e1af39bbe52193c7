#pragma once

#include <gmpxx.h>

#include "zeitlin/wigner.hpp"

// Exact-rational Racah sums. Slow; meant for cross-validation.
namespace zeitlin::wigner::exact {

// value = coeff * sqrt(radicand), radicand >= 0.
struct Symbol {
  mpq_class coeff;
  mpq_class radicand;

  double to_double() const;
  bool is_zero() const { return coeff == 0 || radicand == 0; }
};

mpz_class factorial(int n);

Symbol three_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);
Symbol six_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

// sqrt((a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!) squared, integer arguments.
mpq_class triangle_delta_sq(int a, int b, int c);

}  // namespace zeitlin::wigner::exact
