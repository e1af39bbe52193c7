#include "zeitlin/structconst.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeitlin/wigner.hpp"

namespace zeitlin::structconst {

using wigner::HalfInt;

namespace {

const wigner::LogFactorialTable& lf() { return wigner::LogFactorialTable::shared(); }

long double three_j_bar(const TripleIndex& t) {
  return wigner::three_j_ld(HalfInt::integer(t.l), HalfInt::integer(t.lp), HalfInt::integer(t.lb),
                            HalfInt::integer(t.m), HalfInt::integer(t.mp), HalfInt::integer(-t.mb));
}

void check_level(int N, const TripleIndex& t) {
  if (N < 2) throw std::domain_error("discrete_C: N must be >= 2");
  if (t.l > N - 1 || t.lp > N - 1 || t.lb > N - 1)
    throw std::domain_error("discrete_C: index exceeds N-1 (l=" + std::to_string(std::max({t.l, t.lp, t.lb})) +
                            ", N=" + std::to_string(N) + ")");
}

}  // namespace

bool TripleIndex::valid() const {
  return l >= 1 && lp >= 1 && lb >= 1 && std::abs(m) <= l && std::abs(mp) <= lp && std::abs(mb) <= lb;
}

bool TripleIndex::admissible() const { return valid() && mb == m + mp && triangle(l, lp, lb); }

double bracket_scale(int N, BracketScale s) {
  double n = (s == BracketScale::N32) ? N : N + 1.0;
  return n * std::sqrt(n);
}

BracketScale parse_scale(std::string_view name) {
  if (name == "n32" || name == "N32") return BracketScale::N32;
  if (name == "np1" || name == "Np1_32" || name == "np1_32") return BracketScale::Np1_32;
  throw std::invalid_argument("unknown bracket scale '" + std::string(name) + "' (expected n32 or np1)");
}

std::string_view scale_name(BracketScale s) { return s == BracketScale::N32 ? "n32" : "np1"; }

bool triangle(int l, int lp, int lb) { return lb >= std::abs(l - lp) && lb <= l + lp; }

double triangle_delta(int l, int lp, int lb) {
  if (l < 0 || lp < 0 || lb < 0 || !triangle(l, lp, lb))
    throw std::domain_error("triangle_delta: triangle inequality violated");
  const auto& t = lf();
  return static_cast<double>(
      std::exp(0.5L * (t(l + lp - lb) + t(l - lp + lb) + t(-l + lp + lb) - t(l + lp + lb + 1))));
}

namespace {

long double P_ld(int l, int lp, int lb) {
  const int L = l + lp + lb;
  if (L % 2 == 0 || !triangle(l, lp, lb)) return 0.0L;
  const auto& t = lf();
  long double lg = 0.5L * (t(l + lp - lb) + t(l - lp + lb) + t(-l + lp + lb) - t(L + 1)) +
                   std::log(static_cast<long double>(L + 1)) + t((L - 1) / 2) -
                   (t((-l + lp + lb - 1) / 2) + t((l - lp + lb - 1) / 2) + t((l + lp - lb - 1) / 2));
  return parity_sign((L + 1) / 2) * std::exp(lg);
}

long double sqrt_dims(int l, int lp, int lb) {
  return std::sqrt(static_cast<long double>(2 * l + 1) * (2 * lp + 1) * (2 * lb + 1));
}

}  // namespace

double P_factor(int l, int lp, int lb) { return static_cast<double>(P_ld(l, lp, lb)); }

double continuous_reduced(int l, int lp, int lb) {
  if ((l + lp + lb) % 2 == 0) return 0.0;
  return static_cast<double>(-2.0L * sqrt_dims(l, lp, lb) * P_ld(l, lp, lb));
}

double discrete_reduced(int N, int l, int lp, int lb, BracketScale s) {
  if ((l + lp + lb) % 2 == 0 || !triangle(l, lp, lb)) return 0.0;
  HalfInt spin = HalfInt::from_twice(N - 1);
  long double sixj = wigner::six_j_ld(HalfInt::integer(l), HalfInt::integer(lp), HalfInt::integer(lb), spin, spin, spin);
  return static_cast<double>(2.0L * bracket_scale(N, s) * parity_sign(N) * sqrt_dims(l, lp, lb) * sixj);
}

double continuous_C(const TripleIndex& idx) {
  if (!idx.valid()) throw std::domain_error("continuous_C: invalid index");
  if (!idx.admissible() || idx.L() % 2 == 0) return 0.0;
  return static_cast<double>(continuous_reduced(idx.l, idx.lp, idx.lb) * parity_sign(idx.mb) * three_j_bar(idx));
}

double discrete_C_6j(int N, const TripleIndex& idx, BracketScale s) {
  if (!idx.valid()) throw std::domain_error("discrete_C: invalid index");
  check_level(N, idx);
  if (!idx.admissible() || idx.L() % 2 == 0) return 0.0;
  return static_cast<double>(discrete_reduced(N, idx.l, idx.lp, idx.lb, s) * parity_sign(idx.mb) * three_j_bar(idx));
}

double discrete_C_expanded(int N, const TripleIndex& idx, BracketScale s) {
  if (!idx.valid()) throw std::domain_error("discrete_C: invalid index");
  check_level(N, idx);
  if (!idx.admissible() || idx.L() % 2 == 0) return 0.0;
  const int l = idx.l, lp = idx.lp, lb = idx.lb, L = idx.L();
  const long double n = N;
  const auto& t = lf();

  long double prod = 1.0L;
  for (int len : {l, lp, lb})
    for (int p = 1; p <= len; ++p) prod *= 1.0L - (p / n) * (p / n);

  const int kmin = std::max({l, lp, lb});
  const int kmax = std::min({l + lp, lp + lb, l + lb});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    long double S = 1.0L;
    for (int i = k - L; i <= k; ++i) S *= 1.0L + i / n;
    long double logR = t(k - l) + t(k - lp) + t(k - lb) + t(l + lp - k) + t(lp + lb - k) + t(l + lb - k);
    sum += parity_sign(k) * S * std::exp(-logR);
  }
  long double log_pre = t(l) + t(lp) + t(lb) +
                        0.5L * (t(l + lp - lb) + t(l - lp + lb) + t(-l + lp + lb) - t(L + 1));
  long double v = (bracket_scale(N, s) / (n * std::sqrt(n))) * parity_sign(idx.mb + 1) * 2.0L * n *
                  sqrt_dims(l, lp, lb) * three_j_bar(idx) * std::exp(log_pre) / std::sqrt(prod) * sum;
  return static_cast<double>(v);
}

double discrete_C(int N, const TripleIndex& idx, BracketScale s) {
  double v = discrete_C_6j(N, idx, s);
#ifndef NDEBUG
  double w = discrete_C_expanded(N, idx, s);
  assert(std::fabs(v - w) <= 1e-9 * std::max(1.0, std::fabs(v)));
#endif
  return v;
}

double stirling_P_estimate(int l, int lp, int lb) {
  const int L = l + lp + lb;
  if (L % 2 == 0) throw std::domain_error("stirling_P_estimate: L must be odd");
  if (!triangle(l, lp, lb)) throw std::domain_error("stirling_P_estimate: triangle inequality violated");
  double v = static_cast<double>(L) * (L - 2 * l) * (L - 2 * lp) * (L - 2 * lb);
  return std::pow(v, 0.25);
}

namespace {

void scan_shard(int N, BracketScale s, int lb, DiffBoundReport& rep) {
  const double n2 = static_cast<double>(N) * N;
  for (int l = 1; l <= N - 1; ++l) {
    for (int lp = std::max(1, std::abs(l - lb)); lp <= std::min(N - 1, l + lb); ++lp) {
      const bool odd = (l + lp + lb) % 2 == 1;
      std::size_t count = 0;
      double d = 0.0, mn = 0.0, mx2 = 0.0;
      if (odd) {
        d = continuous_reduced(l, lp, lb) - discrete_reduced(N, l, lp, lb, s);
        mn = std::min({double(l) * lp, double(l) * lb, double(lp) * lb});
        int mx = std::max({l, lp, lb});
        mx2 = double(mx) * mx;
      }
      for (int m = -l; m <= l; ++m) {
        for (int mp = std::max(-lp, -lb - m); mp <= std::min(lp, lb - m); ++mp) {
          ++count;
          if (!odd) continue;
          TripleIndex t{l, m, lp, mp, lb, m + mp};
          double diff = std::fabs(d * static_cast<double>(three_j_bar(t)));
          double r1 = diff / mn;
          double r2 = n2 * diff / (mx2 * mn);
          if (r1 > rep.r1_max) { rep.r1_max = r1; rep.r1_arg = t; }
          if (r2 > rep.r2_max) { rep.r2_max = r2; rep.r2_arg = t; }
        }
      }
      (odd ? rep.odd_triples : rep.even_triples) += count;
    }
  }
}

DiffBoundReport merge(int N, std::vector<DiffBoundReport>& parts) {
  DiffBoundReport out;
  out.N = N;
  for (const auto& p : parts) {
    if (p.r1_max > out.r1_max) { out.r1_max = p.r1_max; out.r1_arg = p.r1_arg; }
    if (p.r2_max > out.r2_max) { out.r2_max = p.r2_max; out.r2_arg = p.r2_arg; }
    out.odd_triples += p.odd_triples;
    out.even_triples += p.even_triples;
  }
  return out;
}

void check_odd(int N) {
  if (N < 3 || N % 2 == 0) throw std::domain_error("diff_bound_check: N must be odd and >= 3");
}

}  // namespace

DiffBoundReport diff_bound_check_serial(int N, BracketScale s) {
  check_odd(N);
  std::vector<DiffBoundReport> parts(N);
  for (int lb = 1; lb <= N - 1; ++lb) scan_shard(N, s, lb, parts[lb]);
  return merge(N, parts);
}

DiffBoundReport diff_bound_check(int N, BracketScale s) {
  check_odd(N);
  std::vector<DiffBoundReport> parts(N);
#pragma omp parallel for schedule(dynamic, 1)
  for (int lb = 1; lb <= N - 1; ++lb) scan_shard(N, s, lb, parts[lb]);
  return merge(N, parts);
}

double torus_C(int N, LatticeVec n, LatticeVec k) {
  if (k.x == 0 && k.y == 0) throw std::domain_error("torus_C: k must be nonzero");
  if (N < 1 || N % 2 == 0) throw std::domain_error("torus_C: N must be odd");
  const double c = cross(n, k);
  return N / (2.0 * M_PI) * std::sin(2.0 * M_PI / N * c) - c;
}

}  // namespace zeitlin::structconst
