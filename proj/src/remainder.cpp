#include "zeitlin/remainder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "zeitlin/harmonics.hpp"
#include "zeitlin/wigner.hpp"

namespace zeitlin::remainder {

namespace {

double reduced_c(int N, int l, int lp, int lb, BracketScale s) {
  return structconst::continuous_reduced(l, lp, lb) - structconst::discrete_reduced(N, l, lp, lb, s);
}

void check_level(int N, const char* who) {
  if (N < 2) throw std::invalid_argument(std::string(who) + ": N must be >= 2");
}

void check_kappa(double kappa, const char* who) {
  if (!(kappa > 0.0)) throw std::invalid_argument(std::string(who) + ": kappa must be > 0");
}

// Visits every nonzero entry of shard lb: f(l, m, lp, mp, c).
template <class F>
void visit_shard(int N, int lb, BracketScale s, F&& f) {
  for (int l = 1; l <= N - 1; ++l) {
    for (int lp = std::max(1, std::abs(lb - l)); lp <= std::min(N - 1, l + lb); ++lp) {
      if ((l + lp + lb) % 2 == 0) continue;
      const double red = reduced_c(N, l, lp, lb, s);
      for (int m = -l; m <= l; ++m) {
        for (int mp = std::max(-lp, -lb - m); mp <= std::min(lp, lb - m); ++mp) {
          const int mb = m + mp;
          const double c = red * parity_sign(mb) * wigner::three_j(l, lp, lb, m, mp, -mb);
          if (c != 0.0) f(l, m, lp, mp, c);
        }
      }
    }
  }
}

double shard_sum(int N, int lb, BracketScale s) {
  double acc = 0.0;
  visit_shard(N, lb, s, [&](int l, int, int lp, int, double c) {
    const double e = 1.0 / eigenvalue(l) - 1.0 / eigenvalue(lp);
    acc += c * c * e * e;
  });
  return 0.5 * acc;
}

double log_sq_slope(const std::vector<int>& Ns, const std::vector<double>& v) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (v[i] <= 0.0) continue;
    x.push_back(std::log(double(Ns[i])));
    y.push_back(std::log(v[i]));
  }
  if (x.size() < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

void check_sweep(const std::vector<int>& Ns, bool odd) {
  if (Ns.size() < 2) throw std::invalid_argument("rate check: need at least two levels");
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    if (Ns[i] < 3) throw std::invalid_argument("rate check: levels must be >= 3");
    if (odd && Ns[i] % 2 == 0) throw std::invalid_argument("rate check: levels must be odd");
    if (i > 0 && Ns[i] <= Ns[i - 1]) throw std::invalid_argument("rate check: levels must be strictly increasing");
  }
}

}  // namespace

RemainderShard build_shard(int N, int lb, BracketScale s) {
  check_level(N, "build_shard");
  if (lb < 1 || lb > N - 1) throw std::invalid_argument("build_shard: lb out of range");
  RemainderShard sh;
  sh.N = N;
  sh.lb = lb;
  visit_shard(N, lb, s, [&](int l, int m, int lp, int mp, double c) { sh.entries.push_back({l, m, lp, mp, c}); });
  return sh;
}

RemainderCoeffs RemainderCoeffs::build(int N, BracketScale s) {
  check_level(N, "RemainderCoeffs");
  RemainderCoeffs rc;
  rc.N_ = N;
  rc.scale_ = s;
  rc.shards_.resize(N - 1);
#pragma omp parallel for schedule(dynamic)
  for (int lb = 1; lb <= N - 1; ++lb) rc.shards_[lb - 1] = build_shard(N, lb, s);
  return rc;
}

std::size_t RemainderCoeffs::size() const {
  std::size_t n = 0;
  for (const auto& sh : shards_) n += sh.entries.size();
  return n;
}

double RemainderCoeffs::lookup(const structconst::TripleIndex& t) const {
  if (t.lb < 1 || t.lb > N_ - 1) return 0.0;
  for (const auto& e : shard(t.lb).entries)
    if (e.l == t.l && e.m == t.m && e.lp == t.lp && e.mp == t.mp) return t.mb == t.m + t.mp ? e.value : 0.0;
  return 0.0;
}

QuantizedField remainder_field(const RemainderCoeffs& rc, const QuantizedField& W) {
  if (rc.N() != W.N())
    throw std::invalid_argument("remainder_field: coefficients built for N=" + std::to_string(rc.N()) +
                                ", field has N=" + std::to_string(W.N()));
  const int N = W.N();
  QuantizedField psi = basis::laplacian_pow(W, -1.0);
  QuantizedField r(N);
  for (int lb = 1; lb <= N - 1; ++lb)
    for (const auto& e : rc.shard(lb).entries)
      r(lb, e.m + e.mp) += cplx(0.0, -e.value) * psi(e.l, e.m) * W(e.lp, e.mp);
  return r;
}

QuantizedField remainder_field(const QuantizedField& W, BracketScale s) {
  return remainder_field(RemainderCoeffs::build(W.N(), s), W);
}

QuantizedField remainder_field_direct(const QuantizedField& W, BracketScale s) {
  const int N = W.N();
  const auto& B = basis::shared_basis(N);
  QuantizedField psi = basis::laplacian_pow(W, -1.0);
  const basis::Matrix P = B.to_matrix(psi), M = B.to_matrix(W);
  const basis::Matrix D = structconst::bracket_scale(N, s) * (P * M - M * P);
  QuantizedField cont = basis::project(harmonics::projected_bracket(basis::lift(psi), basis::lift(W), N - 1), N);
  return B.from_matrix(D) - cont;
}

std::vector<double> first_wick_term(int N, BracketScale s) {
  check_level(N, "first_wick_term");
  std::vector<double> F(N, 0.0);
  for (int lb = 1; lb <= N - 1; ++lb) {
    double acc = 0.0;
    for (int l = 1; l <= N - 1; ++l) {
      if (lb > 2 * l) continue;
      const double red = reduced_c(N, l, l, lb, s);
      if (red == 0.0) continue;
      double collapse = 0.0;
      for (int m = -l; m <= l; ++m) collapse += parity_sign(m) * wigner::three_j(l, l, lb, m, -m, 0);
      acc += red * collapse / eigenvalue(l);
    }
    F[lb] = acc;
  }
  return F;
}

bool far_from(int l, int lb) { return l >= 2.0 * lb * (std::log(double(lb)) + 1.0); }

ExpectationReport expected_remainder(int N, double kappa, BracketScale s, double first_term_tol) {
  check_level(N, "expected_remainder_sq");
  check_kappa(kappa, "expected_remainder_sq");
  ExpectationReport r;
  r.N = N;
  r.kappa = kappa;

  for (int l = 1; l <= N - 1; ++l)
    for (int lb = 0; lb <= std::min(2 * l, N - 1); ++lb) {
      double sum = 0.0;
      for (int m = -l; m <= l; ++m) sum += parity_sign(m) * wigner::three_j(l, l, lb, m, -m, 0);
      const double want = lb == 0 ? parity_sign(l) * std::sqrt(2.0 * l + 1.0) : 0.0;
      r.collapse_max = std::max(r.collapse_max, std::fabs(sum - want));
    }
  auto F = first_wick_term(N, s);
  for (int lb = 1; lb <= N - 1; ++lb) r.first_term_max = std::max(r.first_term_max, std::fabs(F[lb]));
  if (r.first_term_max > first_term_tol)
    throw std::logic_error("expected_remainder_sq: first Wick term does not vanish (" +
                           std::to_string(r.first_term_max) + ")");

  r.shells.assign(N, 0.0);
  std::vector<double> far(N, 0.0), near(N, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int lb = 1; lb <= N - 1; ++lb) {
    const double w = std::pow(eigenvalue(lb), -kappa);
    double f = 0.0, n = 0.0;
    for (int l = 1; l <= N - 1; ++l)
      for (int lp = std::max(1, std::abs(lb - l)); lp <= std::min(N - 1, l + lb); ++lp) {
        if ((l + lp + lb) % 2 == 0 || lp == l) continue;
        const double red = reduced_c(N, l, lp, lb, s);
        const double e = 1.0 / eigenvalue(l) - 1.0 / eigenvalue(lp);
        (far_from(l, lb) ? f : n) += 0.5 * w * red * red * e * e;
      }
    far[lb] = f;
    near[lb] = n;
    r.shells[lb] = f + n;
  }
  for (int lb = 1; lb <= N - 1; ++lb) {
    r.far += far[lb];
    r.near += near[lb];
    r.value += r.shells[lb];
  }
  return r;
}

double expected_remainder_sq(int N, double kappa, BracketScale s) { return expected_remainder(N, kappa, s).value; }

double expected_remainder_sq_direct(int N, double kappa, BracketScale s) {
  check_level(N, "expected_remainder_sq_direct");
  check_kappa(kappa, "expected_remainder_sq_direct");
  std::vector<double> part(N, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int lb = 1; lb <= N - 1; ++lb) part[lb] = std::pow(eigenvalue(lb), -kappa) * shard_sum(N, lb, s);
  return std::accumulate(part.begin(), part.end(), 0.0);
}

double expected_remainder_sq_direct_serial(int N, double kappa, BracketScale s) {
  check_level(N, "expected_remainder_sq_direct");
  check_kappa(kappa, "expected_remainder_sq_direct");
  double acc = 0.0;
  for (int lb = 1; lb <= N - 1; ++lb) acc += std::pow(eigenvalue(lb), -kappa) * shard_sum(N, lb, s);
  return acc;
}

measures::Estimate mc_remainder_sq(int N, double kappa, int count, std::uint64_t seed, BracketScale s) {
  check_kappa(kappa, "mc_remainder_sq");
  if (count < 100) throw std::invalid_argument("mc_remainder_sq: count must be >= 100");
  const auto rc = RemainderCoeffs::build(N, s);
  std::vector<double> x(count);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, streams::kRemainderMC, static_cast<std::uint64_t>(i));
    const double n = basis::sobolev_norm(remainder_field(rc, measures::sample_field(N, rng)), -kappa);
    x[i] = n * n;
  }
  return measures::estimate(x);
}

RateReport calibrate(const std::vector<int>& Ns, const std::vector<double>& values,
                     const std::vector<double>& envelope) {
  RateReport r;
  r.Ns = Ns;
  r.values = values;
  r.envelope = envelope;
  r.fitted_exponent = log_sq_slope(Ns, values);
  const std::size_t n = Ns.size(), half = std::max<std::size_t>(1, n / 2);
  double acc = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < half; ++i) {
    if (values[i] <= 0.0) continue;
    acc += std::log(values[i] / envelope[i]);
    r.C_max = std::max(r.C_max, values[i] / envelope[i]);
    ++used;
  }
  r.C = used > 0 ? std::exp(acc / used) : 0.0;
  r.bound_values.resize(n);
  for (std::size_t i = 0; i < n; ++i) r.bound_values[i] = r.C * envelope[i];
  r.decreasing = true;
  for (std::size_t i = 1; i < n; ++i) r.decreasing = r.decreasing && values[i] < values[i - 1];
  r.below_envelope = true;
  for (std::size_t i = half; i < n; ++i) r.below_envelope = r.below_envelope && values[i] <= r.bound_values[i];
  r.pass = r.decreasing && r.below_envelope;
  return r;
}

RateReport rate_check_sphere(const std::vector<int>& Ns, double kappa, BracketScale s) {
  check_sweep(Ns, true);
  check_kappa(kappa, "rate_check_sphere");
  std::vector<double> v, far, near, env, env_far, env_near;
  for (int N : Ns) {
    auto e = expected_remainder(N, kappa, s);
    v.push_back(e.value);
    far.push_back(e.far);
    near.push_back(e.near);
    const double L = std::log(double(N));
    env_far.push_back(std::pow(N, 5 - 2 * kappa) * L);
    env_near.push_back(std::pow(N, 7 - 2 * kappa) * std::pow(L, 5));
    env.push_back(env_far.back() + env_near.back());
  }
  RateReport r = calibrate(Ns, v, env);
  r.far = far;
  r.near = near;
  r.far_below = calibrate(Ns, far, env_far).below_envelope;
  r.near_below = calibrate(Ns, near, env_near).below_envelope;
  return r;
}

namespace {

struct Box {
  int h;
  bool in(int x, int y) const { return std::abs(x) <= h && std::abs(y) <= h && (x != 0 || y != 0); }
};

double torus_shell(int N, int nx, int ny) {
  const Box box{(N - 1) / 2};
  double acc = 0.0;
  for (int kx = -box.h; kx <= box.h; ++kx)
    for (int ky = -box.h; ky <= box.h; ++ky) {
      if (!box.in(kx, ky) || !box.in(nx - kx, ny - ky)) continue;
      const double c = structconst::torus_C(N, {nx, ny}, {kx, ky});
      if (c == 0.0) continue;
      const double k2 = kx * kx + ky * ky;
      const double q2 = (nx - kx) * (nx - kx) + (ny - ky) * (ny - ky);
      acc += c * c * (q2 - k2) / (k2 * k2 * q2);
    }
  return acc;
}

void check_torus(int N, double s) {
  if (N < 3 || N % 2 == 0) throw std::invalid_argument("torus remainder: N must be odd and >= 3");
  if (!(s > 0.0)) throw std::invalid_argument("torus remainder: s must be > 0");
}

}  // namespace

double torus_expected_remainder_sq(int N, double s) {
  check_torus(N, s);
  const int h = (N - 1) / 2;
  std::vector<double> part(N, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int nx = -h; nx <= h; ++nx) {
    double acc = 0.0;
    for (int ny = -h; ny <= h; ++ny) {
      if (nx == 0 && ny == 0) continue;
      acc += std::pow(double(nx * nx + ny * ny), -s) * torus_shell(N, nx, ny);
    }
    part[nx + h] = acc;
  }
  return std::accumulate(part.begin(), part.end(), 0.0);
}

double torus_expected_remainder_sq_serial(int N, double s) {
  check_torus(N, s);
  const int h = (N - 1) / 2;
  double total = 0.0;
  for (int nx = -h; nx <= h; ++nx) {
    double acc = 0.0;
    for (int ny = -h; ny <= h; ++ny) {
      if (nx == 0 && ny == 0) continue;
      acc += std::pow(double(nx * nx + ny * ny), -s) * torus_shell(N, nx, ny);
    }
    total += acc;
  }
  return total;
}

measures::Estimate torus_mc_remainder_sq(int N, double s, int count, std::uint64_t seed) {
  check_torus(N, s);
  if (count < 100) throw std::invalid_argument("torus_mc_remainder_sq: count must be >= 100");
  const Box box{(N - 1) / 2};
  const int h = box.h, w = N;
  auto at = [&](int x, int y) { return (x + h) * w + (y + h); };
  std::vector<double> x(count);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, streams::kTorusMC, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> nd;
    // Complex normal with E|w_k|^2 = 1 and w_{-k} = conj(w_k).
    std::vector<cplx> om(w * w, 0.0);
    for (int kx = -h; kx <= h; ++kx)
      for (int ky = -h; ky <= h; ++ky) {
        if (!(ky > 0 || (ky == 0 && kx > 0))) continue;
        const double a = nd(rng), b = nd(rng);
        om[at(kx, ky)] = cplx(a, b) / std::sqrt(2.0);
        om[at(-kx, -ky)] = cplx(a, -b) / std::sqrt(2.0);
      }
    double norm = 0.0;
    for (int nx = -h; nx <= h; ++nx)
      for (int ny = -h; ny <= h; ++ny) {
        if (nx == 0 && ny == 0) continue;
        cplx r = 0.0;
        for (int kx = -h; kx <= h; ++kx)
          for (int ky = -h; ky <= h; ++ky) {
            if (!box.in(kx, ky) || !box.in(nx - kx, ny - ky)) continue;
            const double c = structconst::torus_C(N, {nx, ny}, {kx, ky});
            r += c / double(kx * kx + ky * ky) * om[at(nx - kx, ny - ky)] * om[at(kx, ky)];
          }
        norm += std::pow(double(nx * nx + ny * ny), -s) * std::norm(r);
      }
    x[i] = norm;
  }
  return measures::estimate(x);
}

RateReport rate_check_torus(const std::vector<int>& Ns, double s) {
  check_sweep(Ns, true);
  std::vector<double> v, env;
  for (int N : Ns) {
    v.push_back(torus_expected_remainder_sq(N, s));
    env.push_back(std::pow(N, 8 - 2 * s) * std::log(double(N)));
  }
  return calibrate(Ns, v, env);
}

}  // namespace zeitlin::remainder
