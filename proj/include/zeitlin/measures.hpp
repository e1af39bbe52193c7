#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "zeitlin/basis.hpp"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/rng.hpp"

namespace zeitlin::measures {

using basis::cplx;
using basis::Matrix;
using basis::QuantizedField;

struct Estimate {
  double mean = 0.0;
  double se = 0.0;  // standard error
};

// Mean and standard error of the mean.
Estimate estimate(const std::vector<double>& x);

struct GaussianEnsemble {
  int N = 0;
  std::vector<QuantizedField> samples;
  std::vector<double> weights;  // all 1 unless reweighted
  std::uint64_t seed = 0, stream = 0;

  int count() const { return static_cast<int>(samples.size()); }
};

// One draw of mu_N: i.i.d. standard normals on the real orthonormal basis.
QuantizedField sample_field(int N, std::mt19937_64& rng);

// Sample i uses make_rng(seed, stream, i).
GaussianEnsemble sample_mu(int N, int count, std::uint64_t seed, std::uint64_t stream = streams::kSampleMu);
GaussianEnsemble sample_mu_serial(int N, int count, std::uint64_t seed, std::uint64_t stream = streams::kSampleMu);

struct CovarianceReport {
  int N = 0, dim = 0, count = 0;
  double max_dev = 0.0;          // max |C_ab - delta_ab|
  double max_diag_dev = 0.0;
  double max_offdiag_dev = 0.0;
  double clt_bound = 0.0;        // 4 / sqrt(count)
  double max_z = 0.0;            // max |C_ab - delta_ab| / sd_ab, sd = sqrt((1 + delta_ab) / count)
  double mean_norm_sq = 0.0;     // E|W|^2, expected N^2 - 1
  double mean_norm_sq_se = 0.0;
  bool pass = false;             // max_z <= 4
};

// Uncentred empirical covariance over the real basis (the mean is known to be 0).
CovarianceReport covariance_check(const GaussianEnsemble& ens);

struct WickQuad {
  HarmonicIndex a, b, c, d;  // E[w_a w_b conj(w_c) conj(w_d)]
};

// E[w_a w_b] E[conj w_c conj w_d] + E[w_a conj w_c] E[w_b conj w_d] + E[w_a conj w_d] E[w_b conj w_c]
// with E[w_a w_b] = (-1)^{m_a} delta(l_a, l_b) delta(m_a, -m_b) and E[w_a conj w_b] = delta_ab.
cplx wick_expected(const WickQuad& q);

// Structured cases (coincident, paired, distinct shells) plus random ones,
// biased toward nonzero expectations.
std::vector<WickQuad> wick_quadruples(int N, int n_random, std::uint64_t seed);

struct WickRow {
  WickQuad q;
  cplx expected, estimate;
  double se_re = 0.0, se_im = 0.0, z = 0.0;
};

struct WickReport {
  int count = 0;
  std::vector<WickRow> rows;
  double max_z = 0.0;
  bool pass = false;
};

WickReport wick_check(const GaussianEnsemble& ens, const std::vector<WickQuad>& quads);

// Weighted MC estimate of E|W|^p_{H^s}.
Estimate sobolev_moment(const GaussianEnsemble& ens, double s, double p);
// E|W|^2_{H^s} = sum_{l<=N-1} (2l+1) (l(l+1))^s.
double sobolev_second_moment_exact(int N, double s);

struct GibbsReport {
  double gamma = 0.0;
  int pcas = 4;
  Estimate Z;           // mean weight
  double ess = 0.0;     // (sum w)^2 / sum w^2
  double ess_fraction = 0.0;
  double min_weight = 0.0, max_weight = 0.0;
  bool degenerate = false;  // ess < 1% of count
};

// Attaches weights exp(-gamma Tr(W^p)). Requires gamma >= 0 and p a positive
// multiple of 4 so that Tr(W^p) = Tr(H^p) >= 0 for W = iH.
GibbsReport gibbs_reweight(GaussianEnsemble& ens, double gamma, int pcas);

// Weighted E|w_{lm}|^2.
Estimate weighted_mode_moment(const GaussianEnsemble& ens, int l, int m);

struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;  // purely imaginary, ordered by imaginary part
  Matrix vectors;                 // unitary, columns e_i
  std::vector<Matrix> projectors; // e_i e_i^*
};

SpectralDecomposition spectral_circulations(const QuantizedField& W);

struct SpectralReport {
  int kmax = 0;
  double power_sum = 0.0;        // max_k |sum lambda^k - Tr W^k| / max(1, |W|^k)
  double orthogonality = 0.0;    // max |Tr(P_i^* P_j) - delta_ij|
  double recovery = 0.0;         // max |Tr(W^* P_i) - conj(lambda_i)|
  double completeness = 0.0;     // |sum P_i - I|
  double real_part = 0.0;        // max |Re lambda_i|
  double trace_sum = 0.0;        // |sum lambda_i|
  bool pass = false;
};

SpectralReport spectral_check(const QuantizedField& W, int kmax, double tol = 1e-10);

struct StationarityRow {
  int l = 0, m = 0;  // real coordinate at flat_index(l, m)
  double t = 0.0;
  double m0 = 0.0, mt = 0.0;  // second moments at 0 and t
  double se = 0.0, z = 0.0;   // paired-difference standard error and score
};

struct StationarityReport {
  int N = 0, count = 0;
  std::vector<double> times;
  std::vector<StationarityRow> rows;
  double max_z = 0.0;
  bool pass = false;
};

// Runs count trajectories from mu_N samples and compares per-coordinate
// second moments at each time with t = 0 (paired differences).
StationarityReport stationarity_check(int N, int count, const std::vector<double>& times, double dt,
                                      std::uint64_t seed,
                                      dynamics::Integrator integrator = dynamics::Integrator::Isospectral4);

struct WeakLimitReport {
  int N = 0, band = 0, count = 0;
  double variance_expected = 0.0;  // |phi|^2
  Estimate mean, variance;
  double z_mean = 0.0, z_var = 0.0;
  double ks_stat = 0.0, ks_pvalue = 0.0;
  bool pass = false;
};

// Law of <W, Pi_N phi> under mu_N against N(0, |phi|^2), valid once N - 1 >= band of phi.
WeakLimitReport weak_limit_check(const basis::SmoothField& phi, int N, int count, std::uint64_t seed);

// Asymptotic Kolmogorov distribution P(sqrt(n) D > x).
double kolmogorov_pvalue(double d, int n);

}  // namespace zeitlin::measures
