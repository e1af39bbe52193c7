// Acceptance run: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "zeitlin/basis.hpp"
#include "zeitlin/circulation.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/measures.hpp"
#include "zeitlin/remainder.hpp"
#include "zeitlin/structconst.hpp"
#include "zeitlin/structure_table.hpp"
#include "zeitlin/wigner.hpp"

using namespace zeitlin;
using structconst::BracketScale;
using structconst::TripleIndex;

namespace {

int failures = 0;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, const char* name, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("[%s] #%-2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void basis_fidelity() {
  constexpr double kOrtho = 1e-11, kClosure = 1e-8, kSeconds33 = 120.0;
  double ortho = 0.0, closure = 0.0, t33 = 0.0;
  for (int N : {3, 5, 9, 17, 33}) {
    Timer t;
    const auto B = basis::build_basis(N);
    const auto table = structconst::StructureTable::build(N);
    ortho = std::max(ortho, basis::orthonormality_residual(B));
    closure = std::max(closure, basis::closure_residual(B, table));
    if (N == 33) t33 = t.seconds();
  }
  report(1, "basis fidelity", ortho <= kOrtho && closure <= kClosure && t33 <= kSeconds33,
         fmt("orthonormality %.2e (<= %.0e), closure %.2e (<= %.0e), N=33 in %.1f s (<= %.0f s)", ortho, kOrtho,
             closure, kClosure, t33, kSeconds33));
}

void collapse_identity() {
  constexpr double kTol = 1e-10;
  double corrected = 0.0, as_written = 0.0;
  for (int l = 0; l <= 20; ++l)
    for (int lb = 0; lb <= 2 * l; ++lb) {
      double sum = 0.0;
      for (int m = -l; m <= l; ++m) sum += parity_sign(m) * wigner::three_j(l, l, lb, m, -m, 0);
      const double rhs = lb == 0 ? std::sqrt(2.0 * l + 1) : 0.0;
      corrected = std::max(corrected, std::fabs(sum - parity_sign(l) * rhs));
      as_written = std::max(as_written, std::fabs(sum - rhs));
    }
  report(2, "3j collapse identity", corrected <= kTol,
         fmt("l <= 20, max residual %.2e (<= %.0e) against (-1)^l sqrt(2l+1) delta; unsigned form is off by %.2f",
             corrected, kTol, as_written));
}

void quadratic_convergence() {
  constexpr double kLo = 0.15, kHi = 0.45;
  std::vector<TripleIndex> triples;
  for (int l = 1; l <= 4 && triples.size() < 12; ++l)
    for (int lp = 1; lp <= 4 && triples.size() < 12; ++lp)
      for (int lb = std::abs(l - lp); lb <= l + lp && triples.size() < 12; ++lb) {
        TripleIndex t{l, 1, lp, 0, lb, 1};
        if (lb < 1 || (l + lp + lb) % 2 == 0 || !t.admissible()) continue;
        if (std::fabs(structconst::continuous_C(t)) < 1e-12) continue;
        triples.push_back(t);
      }
  double lo = 1e300, hi = 0.0;
  for (const auto& t : triples) {
    const double c = structconst::continuous_C(t);
    double prev = std::fabs(structconst::discrete_C(17, t) - c);
    for (int N : {33, 65}) {
      const double e = std::fabs(structconst::discrete_C(N, t) - c);
      lo = std::min(lo, e / prev);
      hi = std::max(hi, e / prev);
      prev = e;
    }
  }
  report(3, "quadratic constant convergence", triples.size() >= 10 && lo >= kLo && hi <= kHi,
         fmt("%zu odd-L triples, N 17->33->65, error ratios in [%.3f, %.3f] (within [%.2f, %.2f])", triples.size(), lo,
             hi, kLo, kHi));
}

void difference_bounds() {
  // Uniform bound: no later maximum exceeds twice an earlier one.
  constexpr double kFactor = 2.0;
  std::vector<structconst::DiffBoundReport> r;
  for (int N : {5, 9, 17, 33}) r.push_back(structconst::diff_bound_check(N));
  bool finite = true;
  double g1 = 0.0, g2 = 0.0;
  std::string detail = "r1/r2 max:";
  for (std::size_t j = 0; j < r.size(); ++j) {
    finite = finite && std::isfinite(r[j].r1_max) && std::isfinite(r[j].r2_max);
    for (std::size_t i = 0; i < j; ++i) {
      g1 = std::max(g1, r[j].r1_max / r[i].r1_max);
      g2 = std::max(g2, r[j].r2_max / r[i].r2_max);
    }
    detail += fmt(" N=%d %.3g/%.3g", r[j].N, r[j].r1_max, r[j].r2_max);
  }
  const auto& a = r.back().r2_arg;
  report(4, "difference bound sweeps", finite && g1 <= kFactor && g2 <= kFactor,
         detail + fmt(", growth r1 x%.2f r2 x%.2f (<= %.0f); r2 max at N=33 from (l,m,l',m',lb)=(%d,%d,%d,%d,%d)", g1,
                      g2, kFactor, a.l, a.m, a.lp, a.mp, a.lb));
}

void covariance_lemma() {
  constexpr double kSeconds = 60.0;
  Timer t;
  const auto r = measures::covariance_check(measures::sample_mu(3, 100000, 1));
  const double secs = t.seconds();
  report(5, "covariance lemma", r.pass && secs <= kSeconds,
         fmt("N=3, 1e5 samples, max z %.2f (<= 4), max |C - I| %.2e, %.1f s (<= %.0f s)", r.max_z, r.max_dev, secs,
             kSeconds));
}

void wick() {
  const auto r = measures::wick_check(measures::sample_mu(4, 20000, 2), measures::wick_quadruples(4, 30, 2));
  report(6, "Isserlis-Wick fourth moments", r.pass,
         fmt("N=4, 2e4 samples, %zu quadruples, max z %.2f (<= 4)", r.rows.size(), r.max_z));
}

void conservation() {
  constexpr double kDrift = 1e-8, kSpectrum = 1e-9;
  dynamics::FlowConfig cfg;
  cfg.N = 9;
  cfg.dt = 1e-3;
  cfg.T_final = 1.0;
  cfg.integrator = dynamics::Integrator::Isospectral4;
  const auto d = dynamics::drift(dynamics::simulate(dynamics::default_initial_condition(9, 0), cfg));
  double cas = 0.0;
  for (std::size_t k = 0; k < 3; ++k) cas = std::max(cas, d.casimir[k]);
  report(7, "conservation", d.H <= kDrift && d.M <= kDrift && cas <= kDrift && d.spectrum <= kSpectrum,
         fmt("N=9 dt=1e-3 T=1: H %.2e, M %.2e, C2..C4 %.2e (<= %.0e), spectrum %.2e (<= %.0e)", d.H, d.M, cas, kDrift,
             d.spectrum, kSpectrum));
}

void stationarity() {
  const auto r = measures::stationarity_check(5, 2000, {0.5, 1.0}, 0.01, 3);
  report(8, "stationarity", r.pass,
         fmt("N=5, 2000 trajectories, t in {0.5, 1}, %zu moments, max z %.2f (<= 4)", r.rows.size(), r.max_z));
}

void remainder_oracle() {
  constexpr double kFirstTerm = 1e-10;
  const auto e = remainder::expected_remainder(5, 4.0);
  const auto mc = remainder::mc_remainder_sq(5, 4.0, 10000, 4);
  const double z = std::fabs(mc.mean - e.value) / mc.se;
  report(9, "remainder oracle equivalence", z <= 4.0 && e.first_term_max <= kFirstTerm,
         fmt("N=5 kappa=4: exact %.4e, MC %.4e +- %.1e (z %.2f <= 4), first Wick term %.1e (<= %.0e)", e.value,
             mc.mean, mc.se, z, e.first_term_max, kFirstTerm));
}

std::string series(const remainder::RateReport& r) {
  std::string s;
  for (std::size_t i = 0; i < r.Ns.size(); ++i) s += fmt("%s%d:%.3e", i ? " " : "", r.Ns[i], r.values[i]);
  return s;
}

void sphere_rate() {
  constexpr double kSeconds = 1800.0;
  const std::vector<int> Ns{5, 9, 17, 33};
  Timer t;
  const auto r = remainder::rate_check_sphere(Ns, 4.0);
  const double secs = t.seconds();
  report(10, "sphere rate", r.pass && secs <= kSeconds,
         fmt("kappa=4 s_N=N^1.5 [%s], decreasing=%s, below C*env=%s (C %.3e), slope %.2f, %.1f s", series(r).c_str(),
             r.decreasing ? "yes" : "no", r.below_envelope ? "yes" : "no", r.C, r.fitted_exponent, secs));
  const auto alt = remainder::rate_check_sphere(Ns, 4.0, BracketScale::Np1_32);
  std::printf("       diagnostic: s_N=(N+1)^1.5 [%s] decreasing=%s below=%s; far part below=%s, near part below=%s\n",
              series(alt).c_str(), alt.decreasing ? "yes" : "no", alt.below_envelope ? "yes" : "no",
              r.far_below ? "yes" : "no", r.near_below ? "yes" : "no");
}

void torus_rate() {
  constexpr double kSeconds = 600.0;
  Timer t;
  const auto r = remainder::rate_check_torus({5, 9, 17, 33}, 5.0);
  const double secs = t.seconds();
  report(11, "torus rate", r.pass && secs <= kSeconds,
         fmt("s=5 [%s], decreasing=%s, below C*env=%s (C %.3f), slope %.2f, %.2f s", series(r).c_str(),
             r.decreasing ? "yes" : "no", r.below_envelope ? "yes" : "no", r.C, r.fitted_exponent, secs));
}

void spectral() {
  constexpr double kTol = 1e-10;
  bool pass = true;
  double power = 0.0, ortho = 0.0;
  for (int N : {5, 9, 17}) {
    auto rng = make_rng(5, streams::kSampleMu, N);
    const auto r = measures::spectral_check(measures::sample_field(N, rng), 6, kTol);
    pass = pass && r.pass;
    power = std::max(power, r.power_sum);
    ortho = std::max(ortho, r.orthogonality);
  }
  report(12, "spectral circulations", pass,
         fmt("N in {5,9,17}, k <= 6: power sums %.2e, projector orthogonality %.2e (<= %.0e)", power, ortho, kTol));
}

void circulation_variance() {
  bool pass = true;
  std::string detail;
  for (const char* spec : {"latitude:radius=0.9", "great_circle:axis_theta=0.8,axis_phi=0.3"}) {
    const auto mc = circulation::circulation_mc(circulation::parse_curve(spec), 16, 20000, 6);
    pass = pass && mc.pass;
    detail += fmt("%s%s: spectral %.4f, MC %.4f +- %.4f (z %.2f)", detail.empty() ? "" : "; ", spec, mc.spectral,
                  mc.variance.mean, mc.variance.se, mc.z);
  }
  report(13, "circulation variance", pass, "lmax=16, 2e4 samples, " + detail + " (z <= 4)");
}

}  // namespace

int main() {
  basis_fidelity();
  collapse_identity();
  quadratic_convergence();
  difference_bounds();
  covariance_lemma();
  wick();
  conservation();
  stationarity();
  remainder_oracle();
  sphere_rate();
  torus_rate();
  spectral();
  circulation_variance();
  std::printf("%d of 13 criteria failed\n", failures);
  return failures;
}
