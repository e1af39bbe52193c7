#include "zeitlin/measures.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zeitlin::measures {

namespace {

Estimate weighted(const std::vector<double>& x, const std::vector<double>& w) {
  double sw = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
  }
  Estimate e;
  if (sw <= 0.0) return e;
  e.mean = sx / sw;
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * w[i] * (x[i] - e.mean) * (x[i] - e.mean);
  e.se = std::sqrt(v) / sw;
  return e;
}

double zscore(double diff, double se) {
  if (se > 0.0) return std::fabs(diff) / se;
  return std::fabs(diff) < 1e-14 ? 0.0 : INFINITY;
}

}  // namespace

Estimate estimate(const std::vector<double>& x) { return weighted(x, std::vector<double>(x.size(), 1.0)); }

QuantizedField sample_field(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd g(mode_count(N - 1));
  for (auto& x : g) x = nd(rng);
  return QuantizedField::from_real(N, g);
}

GaussianEnsemble sample_mu(int N, int count, std::uint64_t seed, std::uint64_t stream) {
  if (N < 2 || count < 1) throw std::invalid_argument("sample_mu: need N >= 2 and count >= 1");
  GaussianEnsemble e{N, std::vector<QuantizedField>(count), std::vector<double>(count, 1.0), seed, stream};
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, stream, static_cast<std::uint64_t>(i));
    e.samples[i] = sample_field(N, rng);
  }
  return e;
}

GaussianEnsemble sample_mu_serial(int N, int count, std::uint64_t seed, std::uint64_t stream) {
  if (N < 2 || count < 1) throw std::invalid_argument("sample_mu: need N >= 2 and count >= 1");
  GaussianEnsemble e{N, {}, std::vector<double>(count, 1.0), seed, stream};
  e.samples.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, stream, static_cast<std::uint64_t>(i));
    e.samples.push_back(sample_field(N, rng));
  }
  return e;
}

CovarianceReport covariance_check(const GaussianEnsemble& ens) {
  if (ens.count() < 100) throw std::invalid_argument("covariance_check: count must be >= 100");
  CovarianceReport r;
  r.N = ens.N;
  r.count = ens.count();
  r.dim = mode_count(ens.N - 1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(r.dim, r.dim);
  std::vector<double> nsq(r.count);
  for (int i = 0; i < r.count; ++i) {
    Eigen::VectorXd g = ens.samples[i].real_coordinates();
    C.selfadjointView<Eigen::Lower>().rankUpdate(g);
    nsq[i] = g.squaredNorm();
  }
  C = C.selfadjointView<Eigen::Lower>();
  C /= double(r.count);
  const double n = r.count;
  for (int a = 0; a < r.dim; ++a)
    for (int b = 0; b <= a; ++b) {
      const double dev = std::fabs(C(a, b) - (a == b ? 1.0 : 0.0));
      const double sd = std::sqrt((a == b ? 2.0 : 1.0) / n);
      r.max_dev = std::max(r.max_dev, dev);
      double& slot = a == b ? r.max_diag_dev : r.max_offdiag_dev;
      slot = std::max(slot, dev);
      r.max_z = std::max(r.max_z, dev / sd);
    }
  r.clt_bound = 4.0 / std::sqrt(n);
  auto e = estimate(nsq);
  r.mean_norm_sq = e.mean;
  r.mean_norm_sq_se = e.se;
  r.pass = r.max_z <= 4.0;
  return r;
}

cplx wick_expected(const WickQuad& q) {
  auto pair = [](const HarmonicIndex& x, const HarmonicIndex& y) -> double {
    return (x.l == y.l && x.m == -y.m) ? double(parity_sign(x.m)) : 0.0;
  };
  auto same = [](const HarmonicIndex& x, const HarmonicIndex& y) -> double { return (x.l == y.l && x.m == y.m) ? 1.0 : 0.0; };
  return pair(q.a, q.b) * pair(q.c, q.d) + same(q.a, q.c) * same(q.b, q.d) + same(q.a, q.d) * same(q.b, q.c);
}

std::vector<WickQuad> wick_quadruples(int N, int n_random, std::uint64_t seed) {
  const int lmax = N - 1;
  std::vector<WickQuad> out;
  auto ok = [&](const WickQuad& q) { return std::max({q.a.l, q.b.l, q.c.l, q.d.l}) <= lmax; };
  const WickQuad fixed[] = {
      {{1, 0}, {1, 0}, {1, 0}, {1, 0}},      // 3
      {{1, 1}, {1, 1}, {1, 1}, {1, 1}},      // 2
      {{1, 1}, {1, -1}, {2, 1}, {2, -1}},    // (-1)^{1+1}
      {{2, 1}, {2, -1}, {1, 0}, {1, 0}},     // -1
      {{2, 1}, {2, -1}, {2, 1}, {2, -1}},    // 2
      {{1, 1}, {2, 0}, {1, 1}, {2, 0}},      // 1
      {{1, 1}, {2, 0}, {2, 0}, {1, 1}},      // 1
      {{1, 0}, {2, 1}, {3, -1}, {1, 1}},     // 0
      {{1, -1}, {2, 2}, {3, 0}, {3, 1}},     // 0
      {{3, 2}, {3, -2}, {2, 2}, {2, -2}},    // 1
      {{3, 1}, {3, -1}, {1, 1}, {1, -1}},    // 1
  };
  for (const auto& q : fixed)
    if (ok(q)) out.push_back(q);
  auto rng = make_rng(seed, streams::kWickQuads, 0);
  const int d = mode_count(lmax);
  std::uniform_int_distribution<int> pick(0, d - 1), kind(0, 3);
  auto neg = [](HarmonicIndex h) { return HarmonicIndex{h.l, -h.m}; };
  for (int i = 0; i < n_random; ++i) {
    HarmonicIndex a = from_flat(pick(rng)), b = from_flat(pick(rng)), c = from_flat(pick(rng)), e = from_flat(pick(rng));
    switch (kind(rng)) {
      case 0: out.push_back({a, b, a, b}); break;
      case 1: out.push_back({a, b, b, a}); break;
      case 2: out.push_back({a, neg(a), c, neg(c)}); break;
      default: out.push_back({a, b, c, e}); break;
    }
  }
  return out;
}

WickReport wick_check(const GaussianEnsemble& ens, const std::vector<WickQuad>& quads) {
  if (ens.count() < 10000) throw std::invalid_argument("wick_check: count must be >= 1e4");
  WickReport r;
  r.count = ens.count();
  r.rows.resize(quads.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t k = 0; k < quads.size(); ++k) {
    const auto& q = quads[k];
    std::vector<double> re(r.count), im(r.count);
    for (int i = 0; i < r.count; ++i) {
      const auto& w = ens.samples[i];
      cplx p = w(q.a.l, q.a.m) * w(q.b.l, q.b.m) * std::conj(w(q.c.l, q.c.m)) * std::conj(w(q.d.l, q.d.m));
      re[i] = p.real();
      im[i] = p.imag();
    }
    auto er = weighted(re, ens.weights), ei = weighted(im, ens.weights);
    WickRow row{q, wick_expected(q), {er.mean, ei.mean}, er.se, ei.se, 0.0};
    row.z = std::max(zscore(er.mean - row.expected.real(), er.se), zscore(ei.mean - row.expected.imag(), ei.se));
    r.rows[k] = row;
  }
  for (const auto& row : r.rows) r.max_z = std::max(r.max_z, row.z);
  r.pass = r.max_z <= 4.0;
  return r;
}

Estimate sobolev_moment(const GaussianEnsemble& ens, double s, double p) {
  std::vector<double> x(ens.count());
  for (int i = 0; i < ens.count(); ++i) x[i] = std::pow(basis::sobolev_norm(ens.samples[i], s), p);
  return weighted(x, ens.weights);
}

double sobolev_second_moment_exact(int N, double s) {
  double acc = 0.0;
  for (int l = 1; l <= N - 1; ++l) acc += (2.0 * l + 1.0) * std::pow(eigenvalue(l), s);
  return acc;
}

GibbsReport gibbs_reweight(GaussianEnsemble& ens, double gamma, int pcas) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gibbs: gamma must be >= 0");
  if (pcas <= 0 || pcas % 4 != 0) throw std::invalid_argument("gibbs: pcas must be a positive multiple of 4");
  const auto& B = basis::shared_basis(ens.N);
  const int n = ens.count();
  ens.weights.assign(n, 1.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Matrix W = B.to_matrix(ens.samples[i]);
    Matrix Wp = W;
    for (int k = 1; k < pcas; ++k) Wp = Wp * W;
    ens.weights[i] = std::exp(-gamma * Wp.trace().real());
  }
  GibbsReport r;
  r.gamma = gamma;
  r.pcas = pcas;
  r.Z = estimate(ens.weights);
  double s1 = 0.0, s2 = 0.0;
  r.min_weight = INFINITY;
  for (double w : ens.weights) {
    s1 += w;
    s2 += w * w;
    r.min_weight = std::min(r.min_weight, w);
    r.max_weight = std::max(r.max_weight, w);
  }
  r.ess = s2 > 0.0 ? s1 * s1 / s2 : 0.0;
  r.ess_fraction = r.ess / n;
  r.degenerate = r.ess_fraction < 0.01;
  return r;
}

Estimate weighted_mode_moment(const GaussianEnsemble& ens, int l, int m) {
  std::vector<double> x(ens.count());
  for (int i = 0; i < ens.count(); ++i) x[i] = std::norm(ens.samples[i](l, m));
  return weighted(x, ens.weights);
}

SpectralDecomposition spectral_circulations(const QuantizedField& W) {
  const auto& B = basis::shared_basis(W.N());
  Matrix M = B.to_matrix(W);
  // W = iH with H Hermitian whenever W is in su(N).
  Eigen::SelfAdjointEigenSolver<Matrix> es(cplx(0.0, -1.0) * M);
  if (es.info() != Eigen::Success) throw std::runtime_error("spectral_circulations: eigensolver failed");
  SpectralDecomposition d;
  d.vectors = es.eigenvectors();
  for (int i = 0; i < M.rows(); ++i) {
    d.eigenvalues.push_back(cplx(0.0, es.eigenvalues()[i]));
    d.projectors.push_back(d.vectors.col(i) * d.vectors.col(i).adjoint());
  }
  return d;
}

SpectralReport spectral_check(const QuantizedField& W, int kmax, double tol) {
  const auto& B = basis::shared_basis(W.N());
  Matrix M = B.to_matrix(W);
  auto d = spectral_circulations(W);
  const int N = W.N();
  SpectralReport r;
  r.kmax = kmax;
  const double wn = M.norm();
  Matrix pw = Matrix::Identity(N, N);
  for (int k = 1; k <= kmax; ++k) {
    pw = pw * M;
    cplx s = 0.0;
    for (const auto& l : d.eigenvalues) s += std::pow(l, k);
    r.power_sum = std::max(r.power_sum, std::abs(s - pw.trace()) / std::max(1.0, std::pow(wn, k)));
  }
  Matrix sum = Matrix::Zero(N, N);
  cplx tr = 0.0;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j)
      r.orthogonality =
          std::max(r.orthogonality, std::abs(basis::trace_inner(d.projectors[i], d.projectors[j]) - (i == j ? 1.0 : 0.0)));
    r.recovery = std::max(r.recovery, std::abs(basis::trace_inner(M, d.projectors[i]) - std::conj(d.eigenvalues[i])));
    sum += d.projectors[i];
    tr += d.eigenvalues[i];
    r.real_part = std::max(r.real_part, std::fabs(d.eigenvalues[i].real()));
  }
  r.completeness = (sum - Matrix::Identity(N, N)).norm();
  r.trace_sum = std::abs(tr);
  r.pass = r.power_sum <= tol && r.orthogonality <= tol && r.recovery <= tol * std::max(1.0, wn);
  return r;
}

StationarityReport stationarity_check(int N, int count, const std::vector<double>& times, double dt, std::uint64_t seed,
                                      dynamics::Integrator integrator) {
  if (count < 2 || times.empty()) throw std::invalid_argument("stationarity_check: need count >= 2 and times");
  std::vector<long> at;
  for (double t : times) {
    long n = std::lround(t / dt);
    if (n < 1 || std::fabs(n * dt - t) > 1e-9 * std::max(1.0, t))
      throw std::invalid_argument("stationarity_check: times must be positive multiples of dt");
    at.push_back(n);
  }
  dynamics::FlowConfig cfg;
  cfg.N = N;
  cfg.dt = dt;
  cfg.T_final = *std::max_element(times.begin(), times.end());
  cfg.integrator = integrator;
  cfg.validate();
  const auto& B = basis::shared_basis(N);
  const int d = mode_count(N - 1);
  const long last = *std::max_element(at.begin(), at.end());
  // sq[i][j][k]: squared real coordinate k of trajectory i at time slot j (slot 0 is t = 0).
  std::vector<std::vector<Eigen::VectorXd>> sq(count, std::vector<Eigen::VectorXd>(times.size() + 1));
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, streams::kStationarity, static_cast<std::uint64_t>(i));
    auto w0 = sample_field(N, rng);
    sq[i][0] = w0.real_coordinates().array().square();
    Matrix W = B.to_matrix(w0);
    for (long n = 1; n <= last; ++n) {
      W = dynamics::step(B, W, cfg);
      for (std::size_t j = 0; j < at.size(); ++j)
        if (at[j] == n) sq[i][j + 1] = B.from_matrix(W).real_coordinates().array().square();
    }
  }
  StationarityReport r;
  r.N = N;
  r.count = count;
  r.times = times;
  for (std::size_t j = 0; j < times.size(); ++j)
    for (int k = 0; k < d; ++k) {
      std::vector<double> a(count), b(count), diff(count);
      for (int i = 0; i < count; ++i) {
        a[i] = sq[i][0][k];
        b[i] = sq[i][j + 1][k];
        diff[i] = b[i] - a[i];
      }
      auto ed = estimate(diff);
      auto h = from_flat(k);
      StationarityRow row{h.l, h.m, times[j], estimate(a).mean, estimate(b).mean, ed.se, zscore(ed.mean, ed.se)};
      r.max_z = std::max(r.max_z, row.z);
      r.rows.push_back(row);
    }
  r.pass = r.max_z <= 4.0;
  return r;
}

double kolmogorov_pvalue(double d, int n) {
  const double sn = std::sqrt(double(n));
  const double lam = (sn + 0.12 + 0.11 / sn) * d;
  if (lam < 0.2) return 1.0;
  double p = 0.0;
  for (int j = 1; j <= 100; ++j) {
    double term = std::exp(-2.0 * j * j * lam * lam);
    p += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

WeakLimitReport weak_limit_check(const basis::SmoothField& phi, int N, int count, std::uint64_t seed) {
  WeakLimitReport r;
  r.N = N;
  r.count = count;
  r.band = 0;
  for (int l = 1; l <= phi.lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      if (phi(l, m) != cplx(0.0)) r.band = l;
  auto p = basis::project(phi, N);
  r.variance_expected = p.coeffs().squaredNorm();
  auto ens = sample_mu(N, count, seed, streams::kWeakLimit);
  std::vector<double> x(count), x2(count);
  for (int i = 0; i < count; ++i) {
    x[i] = basis::inner(p, ens.samples[i]).real();
    x2[i] = x[i] * x[i];
  }
  r.mean = estimate(x);
  r.variance = estimate(x2);
  r.z_mean = zscore(r.mean.mean, r.mean.se);
  r.z_var = zscore(r.variance.mean - r.variance_expected, r.variance.se);
  std::sort(x.begin(), x.end());
  const double sd = std::sqrt(r.variance_expected);
  for (int i = 0; i < count; ++i) {
    const double F = 0.5 * std::erfc(-x[i] / (sd * std::sqrt(2.0)));
    r.ks_stat = std::max({r.ks_stat, std::fabs(F - double(i) / count), std::fabs(double(i + 1) / count - F)});
  }
  r.ks_pvalue = kolmogorov_pvalue(r.ks_stat, count);
  r.pass = r.z_mean <= 4.0 && r.z_var <= 4.0 && r.ks_pvalue > 1e-3 && N - 1 >= r.band;
  return r;
}

}  // namespace zeitlin::measures
