#pragma once

#include <cstdint>
#include <vector>

#include "zeitlin/basis.hpp"
#include "zeitlin/measures.hpp"
#include "zeitlin/structconst.hpp"

namespace zeitlin::remainder {

using basis::cplx;
using basis::QuantizedField;
using structconst::BracketScale;

// Coefficients c = continuous_C - discrete_C of the remainder, grouped by the
// output shell lb. Entry (l, m, lp, mp) feeds output mode (lb, m + mp).
struct RemainderShard {
  struct Entry {
    int l, m, lp, mp;
    double value;
  };
  int N = 0, lb = 0;
  std::vector<Entry> entries;
};

RemainderShard build_shard(int N, int lb, BracketScale s = BracketScale::N32);

// All shards for one level. Only meant for small N; the sums below stream
// shards instead of keeping them.
class RemainderCoeffs {
 public:
  static RemainderCoeffs build(int N, BracketScale s = BracketScale::N32);

  int N() const { return N_; }
  BracketScale scale() const { return scale_; }
  const RemainderShard& shard(int lb) const { return shards_.at(lb - 1); }
  std::size_t size() const;
  double lookup(const structconst::TripleIndex& t) const;  // 0 when absent

 private:
  int N_ = 0;
  BracketScale scale_ = BracketScale::N32;
  std::vector<RemainderShard> shards_;
};

// r = s_N [Pi psi, Pi w] - Pi sqrt(16 pi){psi, w} with psi_{lm} = w_{lm} / (l(l+1)),
// contracted from the coefficients. Throws std::invalid_argument when the
// levels differ.
QuantizedField remainder_field(const RemainderCoeffs& rc, const QuantizedField& W);
QuantizedField remainder_field(const QuantizedField& W, BracketScale s = BracketScale::N32);

// The same quantity from the matrix commutator and a quadrature bracket.
QuantizedField remainder_field_direct(const QuantizedField& W, BracketScale s = BracketScale::N32);

struct ExpectationReport {
  int N = 0;
  double kappa = 0.0;
  double value = 0.0;          // E |r|^2_{H^-kappa}
  double first_term_max = 0.0; // max_lb |sum_{l,m} (-1)^m c(l,m,l,-m; lb,0) / (l(l+1))|
  double collapse_max = 0.0;   // max |sum_m (-1)^m 3j(l l lb; m -m 0) - (-1)^l sqrt(2l+1) delta_{lb,0}|
  double far = 0.0;            // part with l >= 2 lb (log lb + 1)
  double near = 0.0;           // the rest
  std::vector<double> shells;  // per-lb contributions, index lb
};

// Reduced evaluation sum_lb (lb(lb+1))^-kappa * 1/2 sum_{l,lp} red^2 (1/l(l+1) - 1/lp(lp+1))^2,
// using sum_{m,mp,mb} 3j^2 = 1. Throws std::logic_error if the first Wick
// term exceeds first_term_tol. With double-precision 3j symbols it stays
// below 1e-10 up to N = 33 and grows past it from N = 37.
ExpectationReport expected_remainder(int N, double kappa, BracketScale s = BracketScale::N32,
                                     double first_term_tol = 1e-10);
double expected_remainder_sq(int N, double kappa, BracketScale s = BracketScale::N32);

// Entry-by-entry evaluation of the symmetrized sum over streamed shards.
double expected_remainder_sq_direct(int N, double kappa, BracketScale s = BracketScale::N32);
double expected_remainder_sq_direct_serial(int N, double kappa, BracketScale s = BracketScale::N32);

// First term of the Wick expansion per shell, index lb (entry 0 unused).
std::vector<double> first_wick_term(int N, BracketScale s = BracketScale::N32);

// l is "far" from lb when l >= 2 lb (log lb + 1).
bool far_from(int l, int lb);

measures::Estimate mc_remainder_sq(int N, double kappa, int count, std::uint64_t seed,
                                   BracketScale s = BracketScale::N32);

struct RateReport {
  std::vector<int> Ns;
  std::vector<double> values;
  double fitted_exponent = 0.0;      // least-squares slope of log value vs log N
  std::vector<double> envelope;      // shape of the bound without the constant
  double C = 0.0;                    // fitted on the first half of Ns (log-space least squares)
  double C_max = 0.0;                // max value / envelope over the first half
  std::vector<double> bound_values;  // C * envelope
  bool decreasing = false;
  bool below_envelope = false;       // second half of Ns under C * envelope
  bool pass = false;
  // Sphere only: the far / near split, each against its own envelope.
  std::vector<double> far, near;
  bool far_below = false, near_below = false;
};

// Calibrates C on the first half of Ns and validates on the second half.
RateReport calibrate(const std::vector<int>& Ns, const std::vector<double>& values,
                     const std::vector<double>& envelope);

// Envelope N^{5-2k} log N + N^{7-2k} log^5 N.
RateReport rate_check_sphere(const std::vector<int>& Ns, double kappa, BracketScale s = BracketScale::N32);

// Torus lattice, n and k in the centred box |x|, |y| <= (N-1)/2.
// E|r|^2_{-s} = sum_n |n|^{-2s} sum_k C^2 (|n-k|^2 - |k|^2) / (|k|^4 |n-k|^2)
// over k, n - k in the box and nonzero.
double torus_expected_remainder_sq(int N, double s);
double torus_expected_remainder_sq_serial(int N, double s);
measures::Estimate torus_mc_remainder_sq(int N, double s, int count, std::uint64_t seed);

// Envelope N^{8-2s} log N.
RateReport rate_check_torus(const std::vector<int>& Ns, double s);

}  // namespace zeitlin::remainder
