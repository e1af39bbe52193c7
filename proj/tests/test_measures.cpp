#include <cmath>

#include "doctest.h"
#include "zeitlin/circulation.hpp"
#include "zeitlin/harmonics.hpp"
#include "zeitlin/measures.hpp"

using namespace zeitlin;
using namespace zeitlin::measures;

namespace {

// Columns: complex coefficients of from_real applied to unit vectors, so
// w = A g with g standard normal.
Eigen::MatrixXcd real_to_complex(int N) {
  const int d = mode_count(N - 1);
  Eigen::MatrixXcd A(d, d);
  for (int j = 0; j < d; ++j) A.col(j) = QuantizedField::from_real(N, Eigen::VectorXd::Unit(d, j)).coeffs();
  return A;
}

}  // namespace

TEST_CASE("sampling: reality, centring, trace of the covariance") {
  auto ens = sample_mu(5, 10000, 42);
  for (int i = 0; i < 50; ++i) CHECK(ens.samples[i].reality_defect() == 0.0);
  std::vector<double> nsq, re;
  for (const auto& w : ens.samples) {
    nsq.push_back(w.coeffs().squaredNorm());
    re.push_back(w(2, 1).real());
  }
  auto e = estimate(nsq);
  CHECK(std::fabs(e.mean - 24.0) <= 4 * e.se);
  auto m = estimate(re);
  CHECK(std::fabs(m.mean) <= 4 * m.se);
  // Serial and parallel paths draw identical samples.
  auto s = sample_mu_serial(5, 200, 42);
  for (int i = 0; i < 200; ++i) CHECK(s.samples[i].coeffs() == ens.samples[i].coeffs());
  CHECK_THROWS_AS(sample_mu(1, 10, 0), std::invalid_argument);
}

TEST_CASE("covariance lemma") {
  auto ens = sample_mu(3, 100000, 7);
  auto r = covariance_check(ens);
  CHECK(r.dim == 8);
  CHECK(r.pass);
  CHECK(r.max_offdiag_dev <= r.clt_bound);
  CHECK(std::fabs(r.mean_norm_sq - 8.0) <= 4 * r.mean_norm_sq_se);
  CHECK_THROWS_AS(covariance_check(sample_mu(3, 10, 1)), std::invalid_argument);
}

TEST_CASE("Wick formula against a real-coordinate oracle") {
  // E[g_i g_j g_k g_l] = d_ij d_kl + d_ik d_jl + d_il d_jk gives
  // E[w_a w_b conj w_c conj w_d] = S_ab conj(S_cd) + H_ac H_bd + H_ad H_bc with S = A A^T, H = A A^*.
  for (int N : {3, 5}) {
    auto A = real_to_complex(N);
    Eigen::MatrixXcd S = A * A.transpose(), H = A * A.adjoint();
    for (const auto& q : wick_quadruples(N, 200, 3)) {
      int a = flat_index(q.a.l, q.a.m), b = flat_index(q.b.l, q.b.m), c = flat_index(q.c.l, q.c.m),
          d = flat_index(q.d.l, q.d.m);
      cplx oracle = S(a, b) * std::conj(S(c, d)) + H(a, c) * H(b, d) + H(a, d) * H(b, c);
      CHECK(std::abs(wick_expected(q) - oracle) < 1e-14);
    }
  }
  CHECK(wick_expected({{1, 0}, {1, 0}, {1, 0}, {1, 0}}) == cplx(3.0));
  CHECK(wick_expected({{1, 0}, {2, 1}, {3, -1}, {1, 1}}) == cplx(0.0));
  CHECK(wick_expected({{2, 1}, {2, -1}, {1, 0}, {1, 0}}) == cplx(-1.0));
}

TEST_CASE("Wick check by Monte Carlo") {
  auto ens = sample_mu(4, 20000, 5);
  auto r = wick_check(ens, wick_quadruples(4, 30, 9));
  CHECK(r.rows.size() == 41);
  CHECK(r.pass);
  CHECK(r.rows[0].estimate.real() == doctest::Approx(3.0).epsilon(0.1));
}

TEST_CASE("Sobolev moments") {
  CHECK(sobolev_second_moment_exact(3, 0.0) == 8.0);
  CHECK(sobolev_second_moment_exact(2, -1.0) == doctest::Approx(1.5));
  auto ens = sample_mu(9, 10000, 17);
  auto e = sobolev_moment(ens, -1.5, 2.0);
  CHECK(std::fabs(e.mean - sobolev_second_moment_exact(9, -1.5)) <= 4 * e.se);
  auto e0 = sobolev_moment(ens, 0.0, 2.0);
  CHECK(std::fabs(e0.mean - 80.0) <= 4 * e0.se);
  // Below s = -1 the increments follow the summable tail 2 l^{2s+1}; at s = -1 they grow like 2 log N.
  double a = sobolev_second_moment_exact(65, -1.1), b = sobolev_second_moment_exact(513, -1.1);
  CHECK((b - a) == doctest::Approx(10 * (std::pow(64.5, -0.2) - std::pow(512.5, -0.2))).epsilon(0.03));
  double c = sobolev_second_moment_exact(65, -1.0), d = sobolev_second_moment_exact(513, -1.0);
  CHECK((d - c) == doctest::Approx(2 * std::log(513.0 / 65.0)).epsilon(0.02));
}

TEST_CASE("Gibbs reweighting") {
  auto ens = sample_mu(5, 2000, 3);
  auto r0 = gibbs_reweight(ens, 0.0, 4);
  CHECK(r0.Z.mean == 1.0);
  CHECK(r0.ess == doctest::Approx(2000.0));
  auto r = gibbs_reweight(ens, 0.1, 4);
  CHECK(r.max_weight <= 1.0);
  CHECK(r.min_weight > 0.0);
  CHECK(r.Z.mean < 1.0);
  // Independent evaluation of Tr(W^4) = sum of eigenvalues^4.
  auto sd = spectral_circulations(ens.samples[0]);
  double t4 = 0.0;
  for (auto l : sd.eigenvalues) t4 += std::pow(l.imag(), 4);
  CHECK(ens.weights[0] == doctest::Approx(std::exp(-0.1 * t4)).epsilon(1e-12));
  // Reweighting shrinks the low modes.
  CHECK(weighted_mode_moment(ens, 1, 0).mean < 1.0);
  CHECK_THROWS_AS(gibbs_reweight(ens, 0.1, 2), std::invalid_argument);
  CHECK_THROWS_AS(gibbs_reweight(ens, -1.0, 4), std::invalid_argument);
  auto heavy = gibbs_reweight(ens, 50.0, 4);
  CHECK(heavy.degenerate);
}

TEST_CASE("spectral circulations") {
  auto ens = sample_mu(7, 3, 8);
  for (const auto& W : ens.samples) {
    auto r = spectral_check(W, 6);
    CHECK(r.pass);
    CHECK(r.trace_sum < 1e-12);
    CHECK(r.real_part == 0.0);
    CHECK(r.completeness < 1e-12);
  }
  auto T = QuantizedField::mode(4, 1, 0);
  auto d = spectral_circulations(T);
  // T_{1,0} is diagonal with equally spaced entries.
  for (int i = 0; i + 2 < 4; ++i)
    CHECK((d.eigenvalues[i + 1] - d.eigenvalues[i]).imag() ==
          doctest::Approx((d.eigenvalues[i + 2] - d.eigenvalues[i + 1]).imag()));
}

TEST_CASE("stationarity under the flow") {
  auto r = stationarity_check(3, 400, {0.5, 1.0}, 0.01, 5);
  CHECK(r.rows.size() == 16);
  CHECK(r.pass);
  CHECK_THROWS_AS(stationarity_check(3, 10, {0.505}, 0.01, 1), std::invalid_argument);
}

TEST_CASE("pairings and the weak-limit proxy") {
  basis::SmoothField f(3), g(3);
  f(1, 0) = 0.5;
  f(3, 2) = cplx(0.2, 0.1);
  f(3, -2) = std::conj(f(3, 2));
  g(3, 2) = cplx(-0.4, 1.0);
  g(2, 1) = 0.3;
  cplx l2 = f.coeffs().dot(g.coeffs());
  CHECK(std::abs(basis::inner(basis::project(f, 4), basis::project(g, 4)) - l2) == 0.0);
  CHECK(std::abs(basis::inner(basis::project(f, 9), basis::project(g, 9)) - l2) == 0.0);
  CHECK(std::abs(basis::inner(basis::project(f, 3), basis::project(g, 3)) - l2) > 0.1);

  for (int N : {5, 9}) {
    auto r = weak_limit_check(f, N, 20000, 1);
    CHECK(r.band == 3);
    CHECK(r.variance_expected == doctest::Approx(f.coeffs().squaredNorm()));
    CHECK(r.pass);
  }
  CHECK(kolmogorov_pvalue(0.0, 100) == 1.0);
  CHECK(kolmogorov_pvalue(0.2, 1000) < 1e-10);
}

TEST_CASE("circulation: latitude cap against the Legendre closed form") {
  using namespace zeitlin::circulation;
  const double th = 1.1;
  auto c = parse_curve("latitude:radius=1.1");
  auto g = circulation_coefficients(c, 12, 128);
  for (int l = 1; l <= 12; ++l) {
    // Stokes: Gamma(n x grad Y / sqrt(lambda)) = -sqrt(lambda) * int_cap Y.
    CHECK(g[basis::SmoothField::position(l, 0)].real() ==
          doctest::Approx(-std::sqrt(eigenvalue(l)) * cap_integral(l, th)).epsilon(1e-10));
    for (int m = 1; m <= l; ++m) CHECK(std::abs(g[basis::SmoothField::position(l, m)]) < 1e-12);
  }
  // Cap integral of Y_00 is the area over sqrt(4 pi).
  CHECK(cap_integral(0, th) == doctest::Approx(enclosed_area(c) / std::sqrt(4 * M_PI)));
}

TEST_CASE("circulation variance: symmetries and the area limit") {
  using namespace zeitlin::circulation;
  auto lat = parse_curve("latitude:radius=0.9");
  auto rot = parse_curve("latitude:radius=0.9,rotation=0.7");
  auto v1 = circulation_variance(lat, 40), v2 = circulation_variance(rot, 40);
  CHECK(v1.variance == doctest::Approx(v2.variance).epsilon(1e-12));
  auto gc = parse_curve("great_circle:axis_theta=0.8,axis_phi=0.3");
  auto gr = gc;
  gr.reversed = true;
  auto a = circulation_variance(gc, 30), b = circulation_variance(gr, 30);
  CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-12));
  CHECK(a.full_variance == doctest::Approx(M_PI));
  // Truncated variance plus tail approaches A (4 pi - A) / (4 pi).
  for (const char* spec : {"latitude:radius=0.9", "great_circle:axis_theta=0.8", "small_circle:radius=0.5,axis_theta=1.2,axis_phi=2",
                           "ellipse:a=0.8,b=0.4,axis_theta=0.6"}) {
    auto r = circulation_variance(parse_curve(spec), 64);
    double gap = r.full_variance - r.variance;
    CHECK_MESSAGE(gap > 0.0, spec);
    CHECK_MESSAGE(std::fabs(gap - r.tail_estimate) < 0.25 * gap, spec);
  }
  // Ellipse with a = b is a small circle.
  auto e = circulation_variance(parse_curve("ellipse:a=0.5,b=0.5,axis_theta=1"), 20);
  auto s = circulation_variance(parse_curve("small_circle:radius=0.5,axis_theta=1"), 20);
  CHECK(e.variance == doctest::Approx(s.variance).epsilon(1e-10));
  CHECK(e.area == doctest::Approx(s.area).epsilon(1e-10));
  CHECK_THROWS_AS(parse_curve("spiral"), std::invalid_argument);
  CHECK_THROWS_AS(parse_curve("latitude:radius=4"), std::invalid_argument);
  auto coarse = parse_curve("latitude:radius=0.9,nodes=8");
  CHECK_THROWS_AS(circulation_variance(coarse, 30), harmonics::ResolutionError);
}

TEST_CASE("circulation variance by Monte Carlo") {
  using namespace zeitlin::circulation;
  for (const char* spec : {"latitude:radius=1.0", "great_circle:axis_theta=0.8,axis_phi=0.3"}) {
    auto r = circulation_mc(parse_curve(spec), 16, 20000, 3);
    CHECK_MESSAGE(r.pass, spec << " z=" << r.z);
  }
}
