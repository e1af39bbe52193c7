#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "zeitlin/basis.hpp"
#include "zeitlin/structconst.hpp"

namespace zeitlin::harmonics {

using cplx = std::complex<double>;

// sqrt(16 pi): s_N [.,.] on su(N) tracks this multiple of the Poisson bracket.
inline const double kBracketNormalization = std::sqrt(16.0 * M_PI);

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Gauss-Legendre in x = cos(theta) times uniform longitude.
struct Grid {
  int n_theta = 0, n_phi = 0;
  std::vector<double> x, w;  // nodes and weights on [-1, 1]
};

Grid make_grid(int n_theta, int n_phi);

// Orthonormal associated Legendre functions with the Condon-Shortley phase at
// one colatitude, for 0 <= m <= l <= lmax:
//   P(l,m)   = Pbar_l^m(cos theta)
//   Q(l,m)   = Pbar_l^m / sin theta   (m >= 1, regular at the poles)
//   dP(l,m)  = d/dtheta Pbar_l^m
class Legendre {
 public:
  Legendre(int lmax, double theta);

  double P(int l, int m) const { return p_[pos(l, m)]; }
  double Q(int l, int m) const { return q_[pos(l, m)]; }
  double dP(int l, int m) const { return dp_[pos(l, m)]; }

  // Signed-m versions consistent with Y_{l,-m} = (-1)^m conj(Y_{l,m}).
  double P_signed(int l, int m) const { return m >= 0 ? P(l, m) : parity_sign(m) * P(l, -m); }
  double Q_signed(int l, int m) const { return m >= 0 ? Q(l, m) : parity_sign(m) * Q(l, -m); }
  double dP_signed(int l, int m) const { return m >= 0 ? dP(l, m) : parity_sign(m) * dP(l, -m); }

 private:
  static int pos(int l, int m) { return l * (l + 1) / 2 + m; }
  std::vector<double> p_, q_, dp_;
};

cplx Y(int l, int m, double theta, double phi);

// Raw integral of conj(Y_c) {Y_a, Y_b} over the sphere on the given grid.
cplx bracket_integral(const structconst::TripleIndex& idx, const Grid& grid);

// Structure constant of the normalized bracket sqrt(16 pi){.,.}:
// sqrt(16 pi) * integral = i * value. Throws ResolutionError when the grid is
// below the exactness bound for the triple.
double quadrature_bracket_oracle(const structconst::TripleIndex& idx, const Grid& grid);
double quadrature_bracket_oracle(const structconst::TripleIndex& idx);  // grid sized automatically

// Projection of sqrt(16 pi){f, g} onto l <= lmax_out, by quadrature.
basis::SmoothField projected_bracket(const basis::SmoothField& f, const basis::SmoothField& g, int lmax_out);

}  // namespace zeitlin::harmonics
