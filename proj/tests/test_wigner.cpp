#include <cmath>
#include <random>

#include "doctest.h"
#include "zeitlin/wigner.hpp"
#include "zeitlin/wigner_exact.hpp"

using namespace zeitlin::wigner;

namespace {

HalfInt I(int j) { return HalfInt::integer(j); }
HalfInt H(int twice) { return HalfInt::from_twice(twice); }

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("log factorial table") {
  LogFactorialTable t(200);
  CHECK(t(0) == 0.0L);
  for (int n = 1; n <= 200; ++n) CHECK(std::fabs(double(t(n) - t(n - 1)) - std::log(double(n))) < 1e-13 * std::max(1.0, std::log(double(n))));
  CHECK(double(t(300)) == doctest::Approx(std::lgamma(301.0)).epsilon(1e-14));
  CHECK_THROWS_AS(t(-1), std::domain_error);
}

TEST_CASE("three_j selection rules and errors") {
  CHECK(three_j(1, 1, 1, 0, 0, 0) == 0.0);
  CHECK(three_j(1, 1, 1, 1, 0, 0) == 0.0);   // m sum
  CHECK(three_j(1, 1, 3, 0, 0, 0) == 0.0);   // triangle
  CHECK_THROWS_AS(three_j(1, 1, 1, 2, -1, -1), std::domain_error);
  CHECK_THROWS_AS(three_j(H(-2), I(1), I(1), I(0), I(0), I(0)), std::domain_error);
}

TEST_CASE("three_j closed forms") {
  CHECK(three_j(1, 1, 0, 1, -1, 0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  for (int l = 0; l <= 30; ++l)
    for (int m = -l; m <= l; ++m) {
      double want = ((l - m) % 2 == 0 ? 1.0 : -1.0) / std::sqrt(2.0 * l + 1.0);
      CHECK(rel_err(three_j(l, l, 0, m, -m, 0), want) < 1e-13);
    }
}

TEST_CASE("three_j frozen exact values") {
  // Exact closed forms of the symbols below.
  CHECK(rel_err(three_j(1, 1, 1, 1, 0, -1), -1.0 / std::sqrt(6.0)) < 1e-14);
  CHECK(rel_err(three_j(H(3), I(2), H(5), H(1), I(-1), H(1)), -std::sqrt(105.0) / 42.0) < 1e-14);
  CHECK(rel_err(three_j(8, 6, 5, -3, 1, 2), 3.0 * std::sqrt(58786.0) / 8398.0) < 1e-13);
}

TEST_CASE("three_j agrees with exact rational oracle up to j = 20") {
  std::mt19937 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 4000 && checked < 600; ++trial) {
    int a = rng() % 41, b = rng() % 41;
    int lo = std::abs(a - b), hi = std::min(a + b, 40);
    if (lo > hi) continue;
    int c = lo + 2 * (rng() % ((hi - lo) / 2 + 1));
    if (c > 40) continue;
    int x = -a + 2 * (rng() % (a + 1));
    int y = -b + 2 * (rng() % (b + 1));
    int z = -x - y;
    if (std::abs(z) > c || ((c + z) & 1)) continue;
    double f = three_j(H(a), H(b), H(c), H(x), H(y), H(z));
    double e = exact::three_j(H(a), H(b), H(c), H(x), H(y), H(z)).to_double();
    if (e == 0.0) {
      CHECK(std::fabs(f) < 1e-14);
    } else {
      CHECK(rel_err(f, e) < 1e-10);
    }
    ++checked;
  }
  CHECK(checked >= 300);
}

TEST_CASE("three_j symmetries") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    int a = 1 + rng() % 12, b = 1 + rng() % 12;
    int c = std::abs(a - b) + rng() % (a + b - std::abs(a - b) + 1);
    int x = -a + rng() % (2 * a + 1), y = -b + rng() % (2 * b + 1), z = -x - y;
    if (std::abs(z) > c) continue;
    double v = three_j(a, b, c, x, y, z);
    double ph = ((a + b + c) % 2 == 0) ? 1.0 : -1.0;
    CHECK(three_j(b, c, a, y, z, x) == doctest::Approx(v).epsilon(1e-12));
    CHECK(three_j(c, a, b, z, x, y) == doctest::Approx(v).epsilon(1e-12));
    CHECK(three_j(b, a, c, y, x, z) == doctest::Approx(ph * v).epsilon(1e-12));
    CHECK(three_j(a, b, c, -x, -y, -z) == doctest::Approx(ph * v).epsilon(1e-12));
  }
}

TEST_CASE("three_j orthogonality for j <= 10") {
  double worst = 0.0;
  for (int j1 = 0; j1 <= 10; ++j1)
    for (int j2 = 0; j2 <= 10; j2 += 3)
      for (int j3 = std::abs(j1 - j2); j3 <= j1 + j2; ++j3)
        for (int j3p = std::abs(j1 - j2); j3p <= j1 + j2; ++j3p)
          for (int m3 = -std::min(j3, j3p); m3 <= std::min(j3, j3p); m3 += std::max(1, j3)) {
            double s = 0.0;
            for (int m1 = -j1; m1 <= j1; ++m1) {
              int m2 = -m1 - m3;
              if (std::abs(m2) > j2) continue;
              s += (2 * j3 + 1) * three_j(j1, j2, j3, m1, m2, m3) * three_j(j1, j2, j3p, m1, m2, m3);
            }
            worst = std::max(worst, std::fabs(s - (j3 == j3p ? 1.0 : 0.0)));
          }
  CHECK(worst < 1e-10);
}

// The sum carries an extra (-1)^l relative to the bare (-1)^m form:
// 3j(l l 0; m -m 0) = (-1)^{l-m}/sqrt(2l+1).
TEST_CASE("collapse identity sum_m (-1)^m 3j(l l lb; m -m 0)") {
  double worst = 0.0;
  for (int l = 0; l <= 20; ++l)
    for (int lb = 0; lb <= 2 * l; ++lb) {
      double s = 0.0;
      for (int m = -l; m <= l; ++m) s += (m % 2 == 0 ? 1.0 : -1.0) * three_j(l, l, lb, m, -m, 0);
      double want = lb == 0 ? (l % 2 == 0 ? 1.0 : -1.0) * std::sqrt(2.0 * l + 1.0) : 0.0;
      worst = std::max(worst, std::fabs(s - want));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("six_j selection rules and closed form") {
  CHECK(six_j(I(1), I(1), I(3), I(1), I(1), I(1)) == 0.0);
  CHECK_THROWS_AS(six_j(H(-1), I(1), I(1), I(1), I(1), I(1)), std::domain_error);
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 8; ++b)
      for (int c = std::abs(a - b); c <= a + b; ++c) {
        double want = ((a + b + c) % 2 == 0 ? 1.0 : -1.0) / std::sqrt((2.0 * b + 1) * (2.0 * c + 1));
        CHECK(rel_err(six_j(I(a), I(b), I(c), I(0), I(c), I(b)), want) < 1e-13);
      }
}

TEST_CASE("six_j frozen and exact values") {
  CHECK(rel_err(six_j(I(1), I(1), I(1), H(5), H(5), H(5)), -std::sqrt(35.0) / 105.0) < 1e-14);
  CHECK(rel_err(six_j(I(2), I(3), I(4), H(7), H(5), H(9)), -std::sqrt(3.0) / 63.0) < 1e-14);
  auto e = exact::six_j(I(1), I(1), I(1), H(5), H(5), H(5));
  CHECK(e.to_double() == doctest::Approx(-std::sqrt(35.0) / 105.0).epsilon(1e-15));
  // 35/105^2 = 1/315 exactly after squaring.
  CHECK(e.coeff * e.coeff * e.radicand == mpq_class(1, 315));
}

TEST_CASE("six_j agrees with exact oracle for spins up to 20") {
  std::mt19937 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 20000 && checked < 300; ++trial) {
    int v[6];
    for (int& x : v) x = rng() % 41;
    HalfInt j[6];
    for (int i = 0; i < 6; ++i) j[i] = H(v[i]);
    if (!triangle(j[0], j[1], j[2]) || !triangle(j[0], j[4], j[5]) || !triangle(j[3], j[1], j[5]) ||
        !triangle(j[3], j[4], j[2]))
      continue;
    double f = six_j(j[0], j[1], j[2], j[3], j[4], j[5]);
    double e = exact::six_j(j[0], j[1], j[2], j[3], j[4], j[5]).to_double();
    if (e == 0.0) CHECK(std::fabs(f) < 1e-14); else CHECK(rel_err(f, e) < 1e-10);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("Racah sums keep precision at the largest level used") {
  // Spin 16 is the N = 33 matrix representation; compare against exact values.
  const HalfInt s = H(32);
  for (int l : {12, 19, 25, 31}) {
    for (int m1 = -16; m1 <= 16; m1 += 5) {
      int m = 3;
      if (std::abs(m1 - m) > 16 || l < std::abs(m)) continue;
      double f = three_j(s, I(l), s, I(-m1), I(m), I(m1 - m));
      double e = exact::three_j(s, I(l), s, I(-m1), I(m), I(m1 - m)).to_double();
      CHECK(std::fabs(f - e) < 1e-13);
    }
  }
  for (auto [a, b, c] : {std::array<int, 3>{12, 19, 25}, {31, 30, 1}, {20, 21, 30}}) {
    double f = six_j(I(a), I(b), I(c), s, s, s);
    double e = exact::six_j(I(a), I(b), I(c), s, s, s).to_double();
    CHECK(std::fabs(f - e) < 1e-13 * std::max(1.0, std::fabs(e)) + 1e-16);
  }
}

TEST_CASE("edmonds envelope") {
  CHECK(edmonds_bound(1, 10, 10, 101) == doctest::Approx(1.0 / std::sqrt(21.0 * 102.0)));
  for (int M : {100, 1000, 10000}) CHECK(edmonds_bound(1, 3, 3, 4 * M) / edmonds_bound(1, 3, 3, M) == doctest::Approx(0.5).epsilon(2.0 / M));
  for (int N : {33, 65}) {
    const HalfInt s = H(N);  // spin N/2
    std::mt19937 rng(N);
    int checked = 0;
    while (checked < 200) {
      int l = 1 + rng() % 6, lp = 1 + rng() % N, lb = std::abs(l - lp) + rng() % (2 * std::min(l, lp) + 1);
      if (lb < 1 || lb > N || lp > N) continue;
      double v = std::fabs(six_j(I(l), I(lp), I(lb), s, s, s));
      CHECK(v <= edmonds_bound(l, lp, lb, N) * (1 + 1e-12));
      ++checked;
    }
  }
}

TEST_CASE("ponzano-regge envelope") {
  CHECK(ponzano_regge_bound(8, 8, 8, 64) == doctest::Approx(1.0 / std::sqrt(64.0 * 64 * 64 * 17 * 17 * 17)));
  CHECK(ponzano_regge_bound(9, 8, 8, 64) < ponzano_regge_bound(8, 8, 8, 64));
  CHECK(ponzano_regge_bound(8, 9, 8, 64) < ponzano_regge_bound(8, 8, 8, 64));
  CHECK(ponzano_regge_bound(8, 8, 9, 64) < ponzano_regge_bound(8, 8, 8, 64));
  CHECK(in_ponzano_regge_regime(8, 8, 8, 64));
  CHECK_FALSE(in_ponzano_regge_regime(7, 8, 8, 64));
}
