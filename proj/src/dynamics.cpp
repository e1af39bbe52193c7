#include "zeitlin/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zeitlin/rng.hpp"

namespace zeitlin::dynamics {

Integrator parse_integrator(const std::string& name) {
  if (name == "isospectral" || name == "isospectral-midpoint") return Integrator::IsospectralMidpoint;
  if (name == "isospectral4") return Integrator::Isospectral4;
  if (name == "rk4") return Integrator::RK4;
  throw std::invalid_argument("unknown integrator '" + name + "' (expected isospectral|isospectral4|rk4)");
}

std::string integrator_name(Integrator i) {
  switch (i) {
    case Integrator::RK4: return "rk4";
    case Integrator::Isospectral4: return "isospectral4";
    default: return "isospectral";
  }
}

void FlowConfig::validate() const {
  if (N < 2) throw std::invalid_argument("flow: N must be >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("flow: dt must be > 0");
  if (!(T_final >= dt)) throw std::invalid_argument("flow: T must be >= dt");
  if (monitor_stride < 1) throw std::invalid_argument("flow: monitor_stride must be >= 1");
  if (kmax != 0 && kmax < 2) throw std::invalid_argument("flow: kmax must be >= 2");
  if (!(tol > 0.0) || max_iter < 1) throw std::invalid_argument("flow: bad solver tolerance");
}

int FlowConfig::casimir_max() const { return kmax > 0 ? kmax : std::min(6, N); }

long FlowConfig::steps() const { return std::lround(T_final / dt); }

QuantizedField stream_function(const QuantizedField& W) { return -1.0 * basis::laplacian_pow(W, -1.0); }

Matrix stream_matrix(const basis::BasisSet& B, const Matrix& W) {
  const int N = B.N();
  Matrix P = Matrix::Zero(N, N);
  for (int k = 0; k < B.modes(); ++k) {
    const HarmonicIndex h = from_flat(k);
    const cplx c = -B.project(k, W) / eigenvalue(h.l);
    const auto& band = B.band(k);
    const int row0 = basis::BasisSet::band_row0(h.m);
    for (int r = 0; r < static_cast<int>(band.size()); ++r) P(row0 + r, row0 + r + h.m) += c * band[r];
  }
  return P;
}

Matrix vector_field(const basis::BasisSet& B, const Matrix& W, double sN) {
  Matrix P = stream_matrix(B, W);
  return sN * (P * W - W * P);
}

QuantizedField vector_field(const QuantizedField& W, double sN) {
  const auto& B = basis::shared_basis(W.N());
  return B.from_matrix(vector_field(B, B.to_matrix(W), sN));
}

double hamiltonian(const QuantizedField& W) {
  return -0.5 * basis::inner(stream_function(W), W).real();
}

namespace {

void clean(Matrix& W) {
  W = 0.5 * (W - W.adjoint()).eval();
  const cplx tr = W.trace() / double(W.rows());
  W.diagonal().array() -= tr;
}

// Isospectral midpoint: Wt = W + h/2 [P, Wt] + h^2/4 P Wt P with P = s_N P(Wt),
// then W+ = Cay W Cay^* with Cay = (I - hP/2)^{-1} (I + hP/2).
bool isospectral_step(const basis::BasisSet& B, const Matrix& W, double h, const FlowConfig& cfg, Matrix& out,
                      int& iters) {
  const double sN = cfg.bracket();
  const double scale = std::max(1.0, W.norm());
  Matrix Wt = W;
  Matrix P;
  bool ok = false;
  for (iters = 1; iters <= cfg.max_iter; ++iters) {
    P = sN * stream_matrix(B, Wt);
    Matrix next = W + (0.5 * h) * (P * Wt - Wt * P) + (0.25 * h * h) * (P * Wt * P);
    const double diff = (next - Wt).norm();
    Wt = std::move(next);
    if (!std::isfinite(diff)) return false;
    if (diff <= cfg.tol * scale) {
      ok = true;
      break;
    }
  }
  if (!ok) return false;
  P = sN * stream_matrix(B, Wt);
  const int N = B.N();
  Matrix I = Matrix::Identity(N, N);
  Matrix cay = (I - (0.5 * h) * P).partialPivLu().solve(I + (0.5 * h) * P);
  out = cay * W * cay.adjoint();
  clean(out);
  return true;
}

Matrix rk4_step(const basis::BasisSet& B, const Matrix& W, double h, double sN) {
  Matrix k1 = vector_field(B, W, sN);
  Matrix k2 = vector_field(B, W + 0.5 * h * k1, sN);
  Matrix k3 = vector_field(B, W + 0.5 * h * k2, sN);
  Matrix k4 = vector_field(B, W + h * k3, sN);
  return W + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Matrix iso_with_fallback(const basis::BasisSet& B, const Matrix& W, double h, const FlowConfig& cfg, int depth,
                         StepStats& st) {
  Matrix out;
  int it = 0;
  if (isospectral_step(B, W, h, cfg, out, it)) {
    st.iterations += it;
    return out;
  }
  if (depth >= cfg.max_halvings)
    throw ConvergenceError("isospectral midpoint: fixed point did not converge after " + std::to_string(it) +
                               " iterations and " + std::to_string(depth) + " dt halvings",
                           it);
  ++st.halvings;
  Matrix half = iso_with_fallback(B, W, 0.5 * h, cfg, depth + 1, st);
  return iso_with_fallback(B, half, 0.5 * h, cfg, depth + 1, st);
}

}  // namespace

Matrix step(const basis::BasisSet& B, const Matrix& W, const FlowConfig& cfg, StepStats* stats) {
  StepStats st;
  Matrix out;
  if (cfg.integrator == Integrator::RK4) {
    out = rk4_step(B, W, cfg.dt, cfg.bracket());
  } else if (cfg.integrator == Integrator::Isospectral4) {
    const double c = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - c), w0 = -c / (2.0 - c);
    out = iso_with_fallback(B, W, w1 * cfg.dt, cfg, 0, st);
    out = iso_with_fallback(B, out, w0 * cfg.dt, cfg, 0, st);
    out = iso_with_fallback(B, out, w1 * cfg.dt, cfg, 0, st);
  } else {
    out = iso_with_fallback(B, W, cfg.dt, cfg, 0, st);
  }
  if (stats) *stats = st;
  return out;
}

QuantizedField step(const QuantizedField& W, const FlowConfig& cfg) {
  const auto& B = basis::shared_basis(W.N());
  return B.from_matrix(step(B, B.to_matrix(W), cfg));
}

Diagnostics diagnose(const basis::BasisSet& B, const Matrix& W, double t, int kmax) {
  Diagnostics d;
  d.t = t;
  QuantizedField w = B.from_matrix(W);
  d.H = hamiltonian(w);
  d.M = {w(1, 1), w(1, 0), w(1, -1)};
  Matrix pw = W;
  for (int k = 2; k <= kmax; ++k) {
    pw = pw * W;
    d.C.push_back(pw.trace());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(cplx(0.0, -1.0) * W, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  d.spectrum.assign(ev.data(), ev.data() + ev.size());
  for (double x : d.spectrum) d.spectral_radius = std::max(d.spectral_radius, std::fabs(x));
  d.skew_defect = (W + W.adjoint()).cwiseAbs().maxCoeff();
  d.trace = std::abs(W.trace());
  return d;
}

Trajectory simulate(const QuantizedField& W0, const FlowConfig& cfg) {
  cfg.validate();
  if (W0.N() != cfg.N) throw std::invalid_argument("simulate: initial condition level differs from config N");
  const auto& B = basis::shared_basis(cfg.N);
  const int kmax = cfg.casimir_max();
  Trajectory tr;
  tr.N = cfg.N;
  Matrix W = B.to_matrix(W0);
  auto record = [&](long n) {
    const double t = double(n) * cfg.dt;
    tr.times.push_back(t);
    tr.states.push_back(B.from_matrix(W));
    tr.diagnostics.push_back(diagnose(B, W, t, kmax));
  };
  record(0);
  const long nsteps = cfg.steps();
  for (long n = 1; n <= nsteps; ++n) {
    StepStats st;
    W = step(B, W, cfg, &st);
    tr.fixed_point_iterations += st.iterations;
    tr.halvings += st.halvings;
    if (n % cfg.monitor_stride == 0 || n == nsteps) record(n);
  }
  return tr;
}

Trajectory accelerate(Trajectory traj, int N) {
  const double f = std::pow(double(N), -1.5);
  for (auto& t : traj.times) t *= f;
  for (auto& d : traj.diagnostics) d.t *= f;
  return traj;
}

DriftReport drift_at(const Trajectory& traj, std::size_t i) {
  DriftReport r;
  if (i >= traj.diagnostics.size()) throw std::out_of_range("drift_at: frame index out of range");
  const auto& d0 = traj.diagnostics.front();
  const auto& d = traj.diagnostics[i];
  const double wnorm = traj.states.front().coeffs().norm();
  auto rel = [](double diff, double ref, double scale) {
    double den = std::fabs(ref) >= 1e-8 * scale ? std::fabs(ref) : scale;
    return den > 0.0 ? diff / den : diff;
  };
  const double m0 = std::sqrt(std::norm(d0.M[0]) + std::norm(d0.M[1]) + std::norm(d0.M[2]));
  r.H = rel(std::fabs(d.H - d0.H), d0.H, wnorm * wnorm);
  const double dm = std::sqrt(std::norm(d.M[0] - d0.M[0]) + std::norm(d.M[1] - d0.M[1]) + std::norm(d.M[2] - d0.M[2]));
  r.M = rel(dm, m0, wnorm);
  r.casimir.assign(d0.C.size(), 0.0);
  for (std::size_t k = 0; k < d.C.size(); ++k) {
    const double sc = std::pow(wnorm, double(k + 2));
    r.casimir[k] = rel(std::abs(d.C[k] - d0.C[k]), std::abs(d0.C[k]), sc);
    r.casimir_max = std::max(r.casimir_max, r.casimir[k]);
  }
  for (std::size_t j = 0; j < d.spectrum.size(); ++j)
    r.spectrum = std::max(r.spectrum, std::fabs(d.spectrum[j] - d0.spectrum[j]));
  r.skew = d.skew_defect;
  r.trace = d.trace;
  return r;
}

DriftReport drift(const Trajectory& traj) {
  DriftReport r;
  if (traj.diagnostics.empty()) return r;
  r.casimir.assign(traj.diagnostics.front().C.size(), 0.0);
  for (std::size_t i = 0; i < traj.diagnostics.size(); ++i) {
    const DriftReport f = drift_at(traj, i);
    r.H = std::max(r.H, f.H);
    r.M = std::max(r.M, f.M);
    for (std::size_t k = 0; k < f.casimir.size(); ++k) r.casimir[k] = std::max(r.casimir[k], f.casimir[k]);
    r.casimir_max = std::max(r.casimir_max, f.casimir_max);
    r.spectrum = std::max(r.spectrum, f.spectrum);
    r.skew = std::max(r.skew, f.skew);
    r.trace = std::max(r.trace, f.trace);
  }
  return r;
}

QuantizedField default_initial_condition(int N, std::uint64_t seed) {
  auto rng = make_rng(seed, streams::kInitialCondition, 0);
  std::normal_distribution<double> nd;
  Eigen::VectorXd g(mode_count(N - 1));
  for (auto& x : g) x = nd(rng);
  g /= g.norm();
  return QuantizedField::from_real(N, g);
}

}  // namespace zeitlin::dynamics
