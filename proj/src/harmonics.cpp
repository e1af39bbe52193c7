#include "zeitlin/harmonics.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>

namespace zeitlin::harmonics {

Grid make_grid(int n_theta, int n_phi) {
  if (n_theta < 1 || n_phi < 1) throw std::domain_error("make_grid: node counts must be positive");
  Grid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  g.x.resize(n_theta);
  g.w.resize(n_theta);
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> table(
      gsl_integration_glfixed_table_alloc(n_theta), &gsl_integration_glfixed_table_free);
  if (!table) throw std::runtime_error("make_grid: GSL table allocation failed");
  for (int i = 0; i < n_theta; ++i) gsl_integration_glfixed_point(-1.0, 1.0, i, &g.x[i], &g.w[i], table.get());
  return g;
}

Legendre::Legendre(int lmax, double theta) {
  const int n = (lmax + 1) * (lmax + 2) / 2;
  p_.assign(n, 0.0);
  q_.assign(n, 0.0);
  dp_.assign(n, 0.0);
  const double x = std::cos(theta), st = std::sin(theta);

  // m = 0 column.
  p_[pos(0, 0)] = 1.0 / std::sqrt(4.0 * M_PI);
  if (lmax >= 1) p_[pos(1, 0)] = std::sqrt(3.0) * x * p_[pos(0, 0)];
  for (int l = 2; l <= lmax; ++l) {
    double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l));
    double ap = std::sqrt((4.0 * (l - 1) * (l - 1) - 1.0) / (double(l - 1) * (l - 1)));
    p_[pos(l, 0)] = a * (x * p_[pos(l - 1, 0)] - p_[pos(l - 2, 0)] / ap);
  }

  // m >= 1 columns, computed as Q = Pbar / sin(theta).
  double pmm = p_[pos(0, 0)];
  for (int m = 1; m <= lmax; ++m) {
    double qmm = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * pmm;
    q_[pos(m, m)] = qmm;
    pmm = qmm * st;
    if (m + 1 <= lmax) q_[pos(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * qmm;
    for (int l = m + 2; l <= lmax; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double ap = std::sqrt((4.0 * (l - 1) * (l - 1) - 1.0) / (double(l - 1) * (l - 1) - double(m) * m));
      q_[pos(l, m)] = a * (x * q_[pos(l - 1, m)] - q_[pos(l - 2, m)] / ap);
    }
    for (int l = m; l <= lmax; ++l) p_[pos(l, m)] = q_[pos(l, m)] * st;
  }

  for (int l = 1; l <= lmax; ++l) {
    dp_[pos(l, 0)] = std::sqrt(double(l) * (l + 1)) * p_[pos(l, 1)];
    for (int m = 1; m <= l; ++m) {
      double prev = (l - 1 >= m) ? q_[pos(l - 1, m)] : 0.0;
      dp_[pos(l, m)] = l * x * q_[pos(l, m)] -
                       std::sqrt((double(l) * l - double(m) * m) * (2.0 * l + 1.0) / (2.0 * l - 1.0)) * prev;
    }
  }
}

cplx Y(int l, int m, double theta, double phi) {
  Legendre lg(l, theta);
  return lg.P_signed(l, m) * std::polar(1.0, m * phi);
}

cplx bracket_integral(const structconst::TripleIndex& t, const Grid& grid) {
  const int lmax = std::max({t.l, t.lp, t.lb});
  cplx acc = 0.0;
  const double dphi = 2.0 * M_PI / grid.n_phi;
  for (int j = 0; j < grid.n_theta; ++j) {
    Legendre lg(lmax, std::acos(grid.x[j]));
    const double pc = lg.P_signed(t.lb, t.mb);
    const double qa = t.m != 0 ? lg.Q_signed(t.l, t.m) : 0.0;
    const double qb = t.mp != 0 ? lg.Q_signed(t.lp, t.mp) : 0.0;
    // {Y_a, Y_b} = i e^{i(m+m')phi} (m Q_a dP_b - m' dP_a Q_b)
    const double radial = t.m * qa * lg.dP_signed(t.lp, t.mp) - t.mp * lg.dP_signed(t.l, t.m) * qb;
    cplx ring = 0.0;
    for (int k = 0; k < grid.n_phi; ++k) ring += std::polar(1.0, (t.m + t.mp - t.mb) * k * dphi);
    acc += grid.w[j] * dphi * pc * cplx(0.0, radial) * ring;
  }
  return acc;
}

double quadrature_bracket_oracle(const structconst::TripleIndex& t, const Grid& grid) {
  if (!t.valid()) throw std::domain_error("quadrature_bracket_oracle: invalid index");
  const int L = t.l + t.lp + t.lb;
  const int maxm = std::max({std::abs(t.m), std::abs(t.mp), std::abs(t.mb)});
  if (grid.n_theta < 2 * L) throw ResolutionError("quadrature grid: need >= " + std::to_string(2 * L) + " colatitude nodes");
  if (grid.n_phi < 4 * maxm) throw ResolutionError("quadrature grid: need >= " + std::to_string(4 * maxm) + " longitude nodes");
  cplx v = kBracketNormalization * bracket_integral(t, grid);
  return v.imag();
}

double quadrature_bracket_oracle(const structconst::TripleIndex& t) {
  const int L = t.l + t.lp + t.lb;
  const int maxm = std::max({std::abs(t.m), std::abs(t.mp), std::abs(t.mb)});
  return quadrature_bracket_oracle(t, make_grid(2 * L, std::max(4, 4 * maxm)));
}

basis::SmoothField projected_bracket(const basis::SmoothField& f, const basis::SmoothField& g, int lmax_out) {
  const int Lf = f.lmax(), Lg = g.lmax();
  const int total = Lf + Lg + lmax_out;
  const int lmax = std::max({Lf, Lg, lmax_out});
  Grid grid = make_grid(total + 2, 2 * total + 1);
  const double dphi = 2.0 * M_PI / grid.n_phi;
  basis::SmoothField out(lmax_out);

  for (int j = 0; j < grid.n_theta; ++j) {
    Legendre lg(lmax, std::acos(grid.x[j]));
    for (int k = 0; k < grid.n_phi; ++k) {
      const double phi = k * dphi;
      // Values of d_theta h and (1/sin theta) d_phi h.
      auto eval = [&](const basis::SmoothField& h, cplx& dth, cplx& dph) {
        dth = 0.0;
        dph = 0.0;
        for (int l = 1; l <= h.lmax(); ++l) {
          for (int m = -l; m <= l; ++m) {
            const cplx c = h(l, m);
            if (c == cplx(0.0)) continue;
            const cplx e = std::polar(1.0, m * phi);
            dth += c * lg.dP_signed(l, m) * e;
            if (m != 0) dph += c * cplx(0.0, m) * lg.Q_signed(l, m) * e;
          }
        }
      };
      cplx fth, fph, gth, gph;
      eval(f, fth, fph);
      eval(g, gth, gph);
      const cplx br = fph * gth - fth * gph;
      const double wt = grid.w[j] * dphi * kBracketNormalization;
      for (int l = 0; l <= lmax_out; ++l)
        for (int m = -l; m <= l; ++m)
          out(l, m) += wt * lg.P_signed(l, m) * std::polar(1.0, -m * phi) * br;
    }
  }
  return out;
}

}  // namespace zeitlin::harmonics
