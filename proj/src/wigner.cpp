#include "zeitlin/wigner.hpp"

#include <algorithm>
#include <cmath>

namespace zeitlin::wigner {

LogFactorialTable::LogFactorialTable(int max_n) {
  if (max_n < 0) throw std::domain_error("LogFactorialTable: negative size");
  values_.resize(static_cast<size_t>(max_n) + 1);
  values_[0] = 0.0L;
  for (int n = 1; n <= max_n; ++n) values_[n] = values_[n - 1] + std::log(static_cast<long double>(n));
}

long double LogFactorialTable::operator()(int n) const {
  if (n < 0) throw std::domain_error("log factorial of negative integer");
  if (n > max_n()) return std::lgamma(static_cast<long double>(n) + 1.0L);
  return values_[n];
}

const LogFactorialTable& LogFactorialTable::shared() {
  // Built once; arguments past the end fall back to lgamma.
  static const LogFactorialTable table(4096);
  return table;
}

namespace {

const LogFactorialTable& lf() { return LogFactorialTable::shared(); }

// (a+b)/2 etc. in twice units; callers have checked parity.
inline int h(int twice_sum) { return twice_sum / 2; }

// Signed sum of exp(log-magnitudes). Positive and negative parts are kept
// apart, both scaled by the running largest magnitude.
struct SignedLogSum {
  long double mx = 0.0L, pos = 0.0L, neg = 0.0L;
  bool any = false;

  void add(long double log_mag, int sign) {
    if (!any) {
      mx = log_mag;
      any = true;
    } else if (log_mag > mx) {
      long double r = std::exp(mx - log_mag);
      pos *= r;
      neg *= r;
      mx = log_mag;
    }
    long double t = std::exp(log_mag - mx);
    if (sign > 0) pos += t; else neg += t;
  }

  // Returns (sign, log|sum|) with sign 0 for an exact zero.
  std::pair<int, long double> finish() const {
    if (!any) return {0, 0.0L};
    long double d = pos - neg;
    if (d == 0.0L) return {0, 0.0L};
    return {d > 0 ? 1 : -1, mx + std::log(std::fabs(d))};
  }
};

long double log_delta(int a2, int b2, int c2) {
  const auto& t = lf();
  return 0.5L * (t(h(a2 + b2 - c2)) + t(h(a2 - b2 + c2)) + t(h(-a2 + b2 + c2)) - t(h(a2 + b2 + c2) + 1));
}

void require_nonneg(HalfInt j, const char* what) {
  if (j.twice < 0) throw std::domain_error(std::string(what) + ": negative angular momentum");
}

}  // namespace

bool triangle(HalfInt a, HalfInt b, HalfInt c) {
  if (((a.twice + b.twice + c.twice) & 1) != 0) return false;
  return c.twice >= std::abs(a.twice - b.twice) && c.twice <= a.twice + b.twice;
}

long double three_j_ld(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  require_nonneg(j1, "three_j");
  require_nonneg(j2, "three_j");
  require_nonneg(j3, "three_j");
  if (std::abs(m1.twice) > j1.twice || std::abs(m2.twice) > j2.twice || std::abs(m3.twice) > j3.twice)
    throw std::domain_error("three_j: |m| > j");
  if (((j1.twice + m1.twice) & 1) || ((j2.twice + m2.twice) & 1) || ((j3.twice + m3.twice) & 1))
    throw std::domain_error("three_j: j and m parity mismatch");
  if (m1.twice + m2.twice + m3.twice != 0) return 0.0L;
  if (!triangle(j1, j2, j3)) return 0.0L;

  const int a = j1.twice, b = j2.twice, c = j3.twice;
  const int x = m1.twice, y = m2.twice, z = m3.twice;
  const auto& t = lf();

  const int kmin = std::max({0, h(b - c - x), h(a - c + y)});
  const int kmax = std::min({h(a + b - c), h(a - x), h(b + y)});
  if (kmin > kmax) return 0.0L;

  SignedLogSum sum;
  for (int k = kmin; k <= kmax; ++k) {
    long double den = t(k) + t(h(a + b - c) - k) + t(h(a - x) - k) + t(h(b + y) - k) +
                      t(h(c - b + x) + k) + t(h(c - a - y) + k);
    sum.add(-den, (k & 1) ? -1 : 1);
  }
  auto [sg, lg] = sum.finish();
  if (sg == 0) return 0.0L;

  long double pre = log_delta(a, b, c) +
                    0.5L * (t(h(a + x)) + t(h(a - x)) + t(h(b + y)) + t(h(b - y)) + t(h(c + z)) + t(h(c - z)));
  int phase = h(a - b - z);
  if (phase & 1) sg = -sg;
  return sg * std::exp(pre + lg);
}

double three_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
  return static_cast<double>(three_j_ld(j1, j2, j3, m1, m2, m3));
}

double three_j(int l1, int l2, int l3, int m1, int m2, int m3) {
  return three_j(HalfInt::integer(l1), HalfInt::integer(l2), HalfInt::integer(l3), HalfInt::integer(m1),
                 HalfInt::integer(m2), HalfInt::integer(m3));
}

long double six_j_ld(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  for (HalfInt j : {j1, j2, j3, j4, j5, j6}) require_nonneg(j, "six_j");
  if (!triangle(j1, j2, j3) || !triangle(j1, j5, j6) || !triangle(j4, j2, j6) || !triangle(j4, j5, j3))
    return 0.0L;
  const int a = j1.twice, b = j2.twice, c = j3.twice, d = j4.twice, e = j5.twice, f = j6.twice;
  const auto& t = lf();

  const int s1 = h(a + b + c), s2 = h(a + e + f), s3 = h(d + b + f), s4 = h(d + e + c);
  const int p1 = h(a + b + d + e), p2 = h(b + c + e + f), p3 = h(c + a + f + d);
  const int tmin = std::max({s1, s2, s3, s4});
  const int tmax = std::min({p1, p2, p3});
  if (tmin > tmax) return 0.0L;

  SignedLogSum sum;
  for (int k = tmin; k <= tmax; ++k) {
    long double lg = t(k + 1) - (t(k - s1) + t(k - s2) + t(k - s3) + t(k - s4) + t(p1 - k) + t(p2 - k) + t(p3 - k));
    sum.add(lg, (k & 1) ? -1 : 1);
  }
  auto [sg, lg] = sum.finish();
  if (sg == 0) return 0.0L;
  long double pre = log_delta(a, b, c) + log_delta(a, e, f) + log_delta(d, b, f) + log_delta(d, e, c);
  return sg * std::exp(pre + lg);
}

double six_j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
  return static_cast<double>(six_j_ld(j1, j2, j3, j4, j5, j6));
}

double edmonds_bound(int /*l*/, int lp, int /*lb*/, int N) {
  return kEnvelopeConstant / std::sqrt((2.0 * lp + 1.0) * (N + 1.0));
}

double ponzano_regge_bound(int l, int lp, int lb, int N) {
  double n = N;
  return kEnvelopeConstant / std::sqrt(n * n * n * (2.0 * l + 1.0) * (2.0 * lp + 1.0) * (2.0 * lb + 1.0));
}

bool in_ponzano_regge_regime(int l, int lp, int lb, int N) {
  double r = std::sqrt(static_cast<double>(N));
  return l >= r && lp >= r && lb >= r;
}

}  // namespace zeitlin::wigner
