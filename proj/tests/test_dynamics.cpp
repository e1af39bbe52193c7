#include <cmath>

#include "doctest.h"
#include "zeitlin/dynamics.hpp"
#include "zeitlin/rng.hpp"

using namespace zeitlin;
using namespace zeitlin::dynamics;

namespace {

QuantizedField mixed(int N) {
  QuantizedField W(N);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(mode_count(N - 1));
  g[flat_index(1, 0)] = 0.4;
  g[flat_index(2, 1)] = 0.3;
  g[flat_index(2, -1)] = -0.2;
  g[flat_index(3, 2)] = 0.5;
  g[flat_index(3, 0)] = 0.1;
  g[flat_index(4, -3)] = 0.25;
  return QuantizedField::from_real(N, g);
}

FlowConfig cfg_for(int N, double dt, double T, Integrator in = Integrator::IsospectralMidpoint) {
  FlowConfig c;
  c.N = N;
  c.dt = dt;
  c.T_final = T;
  c.integrator = in;
  return c;
}

}  // namespace

TEST_CASE("vector field: stationary modes and enstrophy orthogonality") {
  const double sN = std::pow(9.0, 1.5);
  auto T10 = QuantizedField::mode(9, 1, 0);
  CHECK(vector_field(T10, sN).coeffs().norm() < 1e-12);
  auto T32 = QuantizedField::mode(9, 3, 2);
  CHECK(vector_field(T32, sN).coeffs().norm() < 1e-11);
  auto W = mixed(9);
  auto F = vector_field(W, sN);
  CHECK(F.coeffs().norm() > 1e-3);
  // Tr(W^* F) = <W, F> = 0 and <P, F> = 0.
  CHECK(std::abs(basis::inner(W, F)) < 1e-12 * F.coeffs().norm());
  CHECK(std::abs(basis::inner(stream_function(W), F)) < 1e-12 * F.coeffs().norm());
  // Result is skew-Hermitian and traceless.
  const auto& B = basis::shared_basis(9);
  Matrix M = B.to_matrix(F);
  CHECK((M + M.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(M.trace()) < 1e-12);
  CHECK(F.reality_defect() < 1e-12);
}

TEST_CASE("stream function and Hamiltonian") {
  auto T10 = QuantizedField::mode(5, 1, 0);
  auto P = stream_function(T10);
  CHECK(P(1, 0).real() == doctest::Approx(-0.5));
  CHECK(hamiltonian(T10) == doctest::Approx(0.25));
  const auto& B = basis::shared_basis(5);
  auto W = mixed(5);
  CHECK((B.from_matrix(stream_matrix(B, B.to_matrix(W))).coeffs() - stream_function(W).coeffs()).norm() < 1e-13);
}

TEST_CASE("single isospectral step") {
  auto cfg = cfg_for(7, 1e-2, 1e-2);
  auto T = QuantizedField::mode(7, 2, 0);
  CHECK((step(T, cfg).coeffs() - T.coeffs()).norm() < 1e-13);

  auto W = mixed(7);
  const auto& B = basis::shared_basis(7);
  Matrix M0 = B.to_matrix(W);
  Matrix M1 = step(B, M0, cfg);
  auto d0 = diagnose(B, M0, 0, 4), d1 = diagnose(B, M1, 0, 4);
  for (int i = 0; i < 7; ++i) CHECK(d1.spectrum[i] == doctest::Approx(d0.spectrum[i]).epsilon(1e-10));
  CHECK((M1 - M0).norm() > 1e-6);
  CHECK(d1.skew_defect < 1e-14);
  CHECK(d1.trace < 1e-14);
}

TEST_CASE("rk4 is fourth order") {
  auto W = mixed(7);
  const double T = 0.2;
  auto ref = simulate(W, cfg_for(7, T / 400, T, Integrator::RK4)).states.back();
  auto e1 = (simulate(W, cfg_for(7, T / 20, T, Integrator::RK4)).states.back() - ref).coeffs().norm();
  auto e2 = (simulate(W, cfg_for(7, T / 40, T, Integrator::RK4)).states.back() - ref).coeffs().norm();
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
  // The midpoint scheme is second order.
  auto ri = simulate(W, cfg_for(7, T / 800, T)).states.back();
  auto i1 = (simulate(W, cfg_for(7, T / 20, T)).states.back() - ri).coeffs().norm();
  auto i2 = (simulate(W, cfg_for(7, T / 40, T)).states.back() - ri).coeffs().norm();
  CHECK(i1 / i2 > 3.5);
  CHECK(i1 / i2 < 4.5);
  // The composed scheme is fourth order.
  auto r4 = simulate(W, cfg_for(7, T / 400, T, Integrator::Isospectral4)).states.back();
  auto f1 = (simulate(W, cfg_for(7, T / 20, T, Integrator::Isospectral4)).states.back() - r4).coeffs().norm();
  auto f2 = (simulate(W, cfg_for(7, T / 40, T, Integrator::Isospectral4)).states.back() - r4).coeffs().norm();
  CHECK(f1 / f2 > 12.0);
  CHECK(f1 / f2 < 20.0);
}

TEST_CASE("conservation along an isospectral trajectory") {
  auto W0 = default_initial_condition(9, 11);
  CHECK(W0.coeffs().norm() == doctest::Approx(1.0));
  auto cfg = cfg_for(9, 1e-3, 1.0, Integrator::Isospectral4);
  cfg.monitor_stride = 50;
  auto tr = simulate(W0, cfg);
  REQUIRE(tr.times.size() == 21);
  CHECK(tr.times.back() == doctest::Approx(1.0));
  auto d = drift(tr);
  MESSAGE("H drift " << d.H << " M " << d.M << " C " << d.casimir_max << " spectrum " << d.spectrum);
  CHECK(d.H <= 1e-8);
  CHECK(d.M <= 1e-8);
  CHECK(d.casimir_max <= 1e-8);
  CHECK(d.spectrum <= 1e-9);
  CHECK(d.skew < 1e-14);
  // C_2 = -|W|^2 along the flow.
  for (std::size_t i = 0; i < tr.states.size(); ++i)
    CHECK(tr.diagnostics[i].C[0].real() == doctest::Approx(-tr.states[i].coeffs().squaredNorm()).epsilon(1e-12));
  // The state actually moves.
  CHECK((tr.states.back() - tr.states.front()).coeffs().norm() > 1e-2);
  CHECK(tr.halvings == 0);
  // The plain midpoint keeps Casimirs but its energy error is O(dt^2).
  cfg.integrator = Integrator::IsospectralMidpoint;
  auto dm = drift(simulate(W0, cfg));
  CHECK(dm.casimir_max <= 1e-8);
  CHECK(dm.H > 1e-9);
  CHECK(dm.H < 1e-6);
}

TEST_CASE("rk4 drifts the Casimirs measurably") {
  auto W0 = default_initial_condition(9, 11);
  auto cfg = cfg_for(9, 1e-2, 1.0, Integrator::RK4);
  auto iso = cfg;
  iso.integrator = Integrator::IsospectralMidpoint;
  auto dr = drift(simulate(W0, cfg)), di = drift(simulate(W0, iso));
  CHECK(dr.spectrum > 10 * di.spectrum);
}

TEST_CASE("accelerate relabels time only") {
  auto tr = simulate(mixed(5), cfg_for(5, 0.01, 0.05));
  auto a = accelerate(tr, 5);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    CHECK(a.times[i] == doctest::Approx(tr.times[i] / std::pow(5.0, 1.5)));
    CHECK(a.states[i].coeffs() == tr.states[i].coeffs());
    CHECK(a.diagnostics[i].H == tr.diagnostics[i].H);
  }
  auto id = accelerate(tr, 1);
  CHECK(id.times == tr.times);
}

TEST_CASE("config validation and non-convergence") {
  auto c = cfg_for(5, 0.0, 1.0);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = cfg_for(5, 0.1, 0.05);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_integrator("euler"), std::invalid_argument);
  // A huge step with no halving budget cannot converge.
  auto W = 50.0 * mixed(7);
  auto bad = cfg_for(7, 1.0, 1.0);
  bad.max_halvings = 0;
  CHECK_THROWS_AS(step(W, bad), ConvergenceError);
  // With halving it recovers and stays isospectral.
  bad.max_halvings = 12;
  const auto& B = basis::shared_basis(7);
  StepStats st;
  Matrix M = step(B, B.to_matrix(W), bad, &st);
  CHECK(st.halvings > 0);
  auto d0 = diagnose(B, B.to_matrix(W), 0, 2), d1 = diagnose(B, M, 0, 2);
  for (int i = 0; i < 7; ++i) CHECK(d1.spectrum[i] == doctest::Approx(d0.spectrum[i]).epsilon(1e-9));
}
