#pragma once

#include <stdexcept>
#include <vector>

namespace zeitlin::wigner {

// Angular momentum stored as twice its value so N/2 with N odd is exact.
struct HalfInt {
  int twice = 0;

  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int t) { HalfInt h; h.twice = t; return h; }
  static constexpr HalfInt integer(int j) { return from_twice(2 * j); }
  static constexpr HalfInt half(int num) { return from_twice(num); }  // num/2

  constexpr bool is_integer() const { return (twice & 1) == 0; }
  constexpr double value() const { return 0.5 * twice; }
  constexpr HalfInt operator-() const { return from_twice(-twice); }
  friend constexpr bool operator==(HalfInt a, HalfInt b) { return a.twice == b.twice; }
};

class LogFactorialTable {
 public:
  explicit LogFactorialTable(int max_n);

  int max_n() const { return static_cast<int>(values_.size()) - 1; }
  long double operator()(int n) const;

  static const LogFactorialTable& shared();

 private:
  std::vector<long double> values_;
};

double three_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);
double three_j(int l1, int l2, int l3, int m1, int m2, int m3);

double six_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

// Long-double variants used internally where the callers keep combining
// Racah sums with other factorial ratios.
long double three_j_ld(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3);
long double six_j_ld(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6);

bool triangle(HalfInt a, HalfInt b, HalfInt c);

// Envelopes only; the constant in front is 1.
inline constexpr double kEnvelopeConstant = 1.0;
double edmonds_bound(int l, int lp, int lb, int N);
double ponzano_regge_bound(int l, int lp, int lb, int N);
bool in_ponzano_regge_regime(int l, int lp, int lb, int N);

}  // namespace zeitlin::wigner
