#include "zeitlin/wigner_exact.hpp"

#include <algorithm>
#include <cmath>

namespace zeitlin::wigner::exact {

mpz_class factorial(int n) {
  if (n < 0) throw std::domain_error("factorial of negative integer");
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

double Symbol::to_double() const {
  if (is_zero()) return 0.0;
  // Split the radicand so neither part over/underflows a double.
  mpf_class num(radicand.get_num(), 256), den(radicand.get_den(), 256);
  mpf_class r = num / den;
  mpf_class root = sqrt(r);
  mpf_class c(coeff, 256);
  mpf_class v = c * root;
  return v.get_d();
}

namespace {

inline int h(int twice_sum) { return twice_sum / 2; }

mpq_class delta_sq_twice(int a, int b, int c) {
  mpq_class r(factorial(h(a + b - c)) * factorial(h(a - b + c)) * factorial(h(-a + b + c)),
              factorial(h(a + b + c) + 1));
  r.canonicalize();
  return r;
}

}  // namespace

mpq_class triangle_delta_sq(int a, int b, int c) { return delta_sq_twice(2 * a, 2 * b, 2 * c); }

Symbol three_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  Symbol out{0, 0};
  if (j1.twice < 0 || j2.twice < 0 || j3.twice < 0) throw std::domain_error("three_j: negative j");
  if (std::abs(m1.twice) > j1.twice || std::abs(m2.twice) > j2.twice || std::abs(m3.twice) > j3.twice)
    throw std::domain_error("three_j: |m| > j");
  if (m1.twice + m2.twice + m3.twice != 0 || !triangle(j1, j2, j3)) return out;

  const int a = j1.twice, b = j2.twice, c = j3.twice;
  const int x = m1.twice, y = m2.twice, z = m3.twice;
  const int kmin = std::max({0, h(b - c - x), h(a - c + y)});
  const int kmax = std::min({h(a + b - c), h(a - x), h(b + y)});

  mpq_class sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    mpz_class den = factorial(k) * factorial(h(a + b - c) - k) * factorial(h(a - x) - k) *
                    factorial(h(b + y) - k) * factorial(h(c - b + x) + k) * factorial(h(c - a - y) + k);
    mpq_class term(1, den);
    term.canonicalize();
    if (k & 1) sum -= term; else sum += term;
  }
  if (h(a - b - z) & 1) sum = -sum;
  mpq_class rad = delta_sq_twice(a, b, c) * mpq_class(factorial(h(a + x)) * factorial(h(a - x)) *
                                                      factorial(h(b + y)) * factorial(h(b - y)) *
                                                      factorial(h(c + z)) * factorial(h(c - z)));
  out.coeff = sum;
  out.radicand = rad;
  return out;
}

Symbol six_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  Symbol out{0, 0};
  for (HalfInt j : {j1, j2, j3, j4, j5, j6})
    if (j.twice < 0) throw std::domain_error("six_j: negative j");
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3))
    return out;
  const int a = j1.twice, b = j2.twice, c = j3.twice, d = j4.twice, e = j5.twice, f = j6.twice;
  const int s1 = h(a + b + c), s2 = h(a + e + f), s3 = h(d + b + f), s4 = h(d + e + c);
  const int p1 = h(a + b + d + e), p2 = h(b + c + e + f), p3 = h(c + a + f + d);
  const int tmin = std::max({s1, s2, s3, s4});
  const int tmax = std::min({p1, p2, p3});

  mpq_class sum = 0;
  for (int t = tmin; t <= tmax; ++t) {
    mpz_class den = factorial(t - s1) * factorial(t - s2) * factorial(t - s3) * factorial(t - s4) *
                    factorial(p1 - t) * factorial(p2 - t) * factorial(p3 - t);
    mpq_class term(factorial(t + 1), den);
    term.canonicalize();
    if (t & 1) sum -= term; else sum += term;
  }
  out.coeff = sum;
  out.radicand = delta_sq_twice(a, b, c) * delta_sq_twice(a, e, f) * delta_sq_twice(d, b, f) *
                 delta_sq_twice(d, e, c);
  return out;
}

}  // namespace zeitlin::wigner::exact
