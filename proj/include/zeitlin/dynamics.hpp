#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeitlin/basis.hpp"
#include "zeitlin/structconst.hpp"

namespace zeitlin::dynamics {

using basis::cplx;
using basis::Matrix;
using basis::QuantizedField;

// Isospectral4 is the symmetric triple-jump composition of the midpoint step.
enum class Integrator { IsospectralMidpoint, Isospectral4, RK4 };

Integrator parse_integrator(const std::string& name);  // "isospectral" | "isospectral4" | "rk4"
std::string integrator_name(Integrator i);

struct FlowConfig {
  int N = 0;
  double dt = 1e-3;
  double T_final = 1.0;
  Integrator integrator = Integrator::Isospectral4;
  structconst::BracketScale scale = structconst::BracketScale::N32;
  int monitor_stride = 1;
  int kmax = 0;  // 0: min(6, N)
  double tol = 1e-12;
  int max_iter = 50;
  int max_halvings = 6;

  void validate() const;  // throws std::invalid_argument
  int casimir_max() const;
  double bracket() const { return structconst::bracket_scale(N, scale); }
  long steps() const;
};

class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations) : std::runtime_error(what), iterations_(iterations) {}
  int iterations() const { return iterations_; }

 private:
  int iterations_;
};

struct Diagnostics {
  double t = 0.0;
  double H = 0.0;
  std::array<cplx, 3> M{};   // coefficients on T_{1,1}, T_{1,0}, T_{1,-1}
  std::vector<cplx> C;       // Tr(W^k), k = 2..kmax
  std::vector<double> spectrum;  // eigenvalues of -iW, ascending
  double spectral_radius = 0.0;
  double skew_defect = 0.0;  // max |W + W^*|
  double trace = 0.0;        // |Tr W|
};

struct Trajectory {
  int N = 0;
  std::vector<double> times;
  std::vector<QuantizedField> states;
  std::vector<Diagnostics> diagnostics;
  long fixed_point_iterations = 0;
  int halvings = 0;
};

// P with Delta_N P = W, i.e. coefficients -w_{lm} / (l(l+1)).
QuantizedField stream_function(const QuantizedField& W);
Matrix stream_matrix(const basis::BasisSet& B, const Matrix& W);

// s_N [P, W].
QuantizedField vector_field(const QuantizedField& W, double sN);
Matrix vector_field(const basis::BasisSet& B, const Matrix& W, double sN);

// H = -1/2 Tr(P^* W).
double hamiltonian(const QuantizedField& W);

struct StepStats {
  int iterations = 0;
  int halvings = 0;
};

Matrix step(const basis::BasisSet& B, const Matrix& W, const FlowConfig& cfg, StepStats* stats = nullptr);
QuantizedField step(const QuantizedField& W, const FlowConfig& cfg);

Diagnostics diagnose(const basis::BasisSet& B, const Matrix& W, double t, int kmax);

// Records state and diagnostics at t = 0 and every monitor_stride steps
// (plus the final step).
Trajectory simulate(const QuantizedField& W0, const FlowConfig& cfg);

// Relabels t -> t / N^{3/2}, so the result at time t is W(N^{3/2} t).
Trajectory accelerate(Trajectory traj, int N);

struct DriftReport {
  double H = 0.0;
  double M = 0.0;
  std::vector<double> casimir;  // k = 2..kmax
  double casimir_max = 0.0;
  double spectrum = 0.0;  // absolute, max over eigenvalues
  double skew = 0.0;
  double trace = 0.0;
};

// Relative drift against t = 0: |q(t) - q(0)| / |q(0)|. For quantities with
// |q(0)| below 1e-8 of their natural scale (|W|^k for C_k, |W| for M) the
// scale is used instead.
DriftReport drift(const Trajectory& traj);
// Frame i against frame 0 with the same rule.
DriftReport drift_at(const Trajectory& traj, std::size_t i);

// Unit-Frobenius-norm mu_N sample, the default initial condition.
QuantizedField default_initial_condition(int N, std::uint64_t seed);

}  // namespace zeitlin::dynamics
