#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "zeitlin/measures.hpp"

namespace zeitlin::circulation {

using cplx = std::complex<double>;

enum class CurveFamily { Latitude, GreatCircle, SmallCircle, Ellipse };

// Closed curves on the unit sphere, all built in a frame whose pole is the
// axis (axis_theta, axis_phi):
//   latitude      circle of colatitude `radius` about the north pole
//   great_circle  equator of the axis frame
//   small_circle  circle of angular radius `radius` about the axis
//   ellipse       image of (a cos t, b sin t) under the exponential map at the axis
// `rotation` turns the curve about its axis; `reversed` flips orientation.
struct CurveSpec {
  CurveFamily family = CurveFamily::Latitude;
  double radius = M_PI / 3;
  double axis_theta = 0.0, axis_phi = 0.0;
  double a = 0.6, b = 0.3;
  double rotation = 0.0;
  bool reversed = false;
  int nodes = 0;  // 0: automatic

  void validate() const;
};

// "family:key=value,key=value", e.g. "latitude:radius=1.0" or
// "ellipse:a=0.7,b=0.4,axis_theta=0.5".
CurveSpec parse_curve(const std::string& text);
std::string curve_name(CurveFamily f);

Eigen::Vector3d curve_point(const CurveSpec& c, double t);    // t in [0, 2 pi)
Eigen::Vector3d curve_tangent(const CurveSpec& c, double t);  // d/dt

// Area of the region to the left of the curve; the variance only depends on
// A (4 pi - A), so orientation does not matter.
double enclosed_area(const CurveSpec& c);

// Gamma(v_{lm}) for the L2-normalized velocity harmonics v_{lm} = n x grad Y_{lm} / sqrt(l(l+1)),
// by periodic trapezoid quadrature, at SmoothField positions (entry 0 unused).
std::vector<cplx> circulation_coefficients(const CurveSpec& c, int lmax, int nodes);

struct CirculationReport {
  int lmax = 0, nodes = 0;
  double variance = 0.0;        // sum_{l<=lmax} sum_m |Gamma_lm|^2 / (l(l+1))
  double tail_estimate = 0.0;   // fitted A / lmax from the last shells
  double quadrature_error = 0.0;
  std::vector<double> shells;   // per-l contributions
  double area = 0.0;
  double full_variance = 0.0;   // A (4 pi - A) / (4 pi), the lmax -> infinity limit
};

// Throws harmonics::ResolutionError if doubling the nodes moves any
// coefficient by more than 1e-10.
CirculationReport circulation_variance(const CurveSpec& c, int lmax);

struct CirculationMC {
  int count = 0;
  measures::Estimate variance;
  double spectral = 0.0;
  double z = 0.0;
  double max_imag = 0.0;
  bool pass = false;
};

// Empirical variance of Gamma(v), v = K * omega, for omega band-limited white
// noise on l <= lmax.
CirculationMC circulation_mc(const CurveSpec& c, int lmax, int count, std::uint64_t seed);

// Integral of Y_{l0} over the cap theta < theta0, by the Legendre identity
// int_x^1 P_l = (P_{l-1}(x) - P_{l+1}(x)) / (2l+1).
double cap_integral(int l, double theta0);

}  // namespace zeitlin::circulation
