#include "zeitlin/circulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "zeitlin/harmonics.hpp"

namespace zeitlin::circulation {

namespace {

Eigen::Matrix3d frame(const CurveSpec& c) {
  using Eigen::AngleAxisd;
  using Eigen::Vector3d;
  const double th = c.family == CurveFamily::Latitude ? 0.0 : c.axis_theta;
  const double ph = c.family == CurveFamily::Latitude ? 0.0 : c.axis_phi;
  return (AngleAxisd(ph, Vector3d::UnitZ()) * AngleAxisd(th, Vector3d::UnitY()) *
          AngleAxisd(c.rotation, Vector3d::UnitZ()))
      .toRotationMatrix();
}

double local_radius(const CurveSpec& c) { return c.family == CurveFamily::GreatCircle ? M_PI / 2 : c.radius; }

// Point and derivative in the axis frame, unreversed.
void local(const CurveSpec& c, double t, Eigen::Vector3d& p, Eigen::Vector3d& dp) {
  if (c.family == CurveFamily::Ellipse) {
    const double x = c.a * std::cos(t), y = c.b * std::sin(t);
    const double dx = -c.a * std::sin(t), dy = c.b * std::cos(t);
    const double rho = std::hypot(x, y);
    const double s = std::sin(rho) / rho;
    const double ds = (rho * std::cos(rho) - std::sin(rho)) / (rho * rho);
    const double drho = (x * dx + y * dy) / rho;
    p = {s * x, s * y, std::cos(rho)};
    dp = {ds * drho * x + s * dx, ds * drho * y + s * dy, -std::sin(rho) * drho};
    return;
  }
  const double r = local_radius(c);
  p = {std::sin(r) * std::cos(t), std::sin(r) * std::sin(t), std::cos(r)};
  dp = {-std::sin(r) * std::sin(t), std::sin(r) * std::cos(t), 0.0};
}

int auto_nodes(int lmax) {
  int n = std::max(64, 4 * lmax + 16);
  return n + (n % 2);
}

}  // namespace

void CurveSpec::validate() const {
  switch (family) {
    case CurveFamily::Latitude:
    case CurveFamily::SmallCircle:
      if (!(radius > 0.0 && radius < M_PI)) throw std::invalid_argument("curve.radius must lie in (0, pi)");
      break;
    case CurveFamily::Ellipse:
      if (!(a > 0.0 && b > 0.0 && a < M_PI && b < M_PI)) throw std::invalid_argument("curve.a, curve.b must lie in (0, pi)");
      break;
    case CurveFamily::GreatCircle:
      break;
  }
  if (nodes < 0) throw std::invalid_argument("curve.nodes must be >= 0");
}

std::string curve_name(CurveFamily f) {
  switch (f) {
    case CurveFamily::Latitude: return "latitude";
    case CurveFamily::GreatCircle: return "great_circle";
    case CurveFamily::SmallCircle: return "small_circle";
    case CurveFamily::Ellipse: return "ellipse";
  }
  return "?";
}

CurveSpec parse_curve(const std::string& text) {
  CurveSpec c;
  const auto colon = text.find(':');
  const std::string fam = text.substr(0, colon);
  static const std::map<std::string, CurveFamily> families = {{"latitude", CurveFamily::Latitude},
                                                               {"great_circle", CurveFamily::GreatCircle},
                                                               {"small_circle", CurveFamily::SmallCircle},
                                                               {"ellipse", CurveFamily::Ellipse}};
  auto it = families.find(fam);
  if (it == families.end()) throw std::invalid_argument("curve: unknown family '" + fam + "'");
  c.family = it->second;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument("curve: expected key=value, got '" + kv + "'");
      const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
      double v;
      try {
        v = std::stod(val);
      } catch (const std::exception&) {
        throw std::invalid_argument("curve." + key + ": not a number");
      }
      if (key == "radius" || key == "theta") c.radius = v;
      else if (key == "axis_theta") c.axis_theta = v;
      else if (key == "axis_phi") c.axis_phi = v;
      else if (key == "a") c.a = v;
      else if (key == "b") c.b = v;
      else if (key == "rotation") c.rotation = v;
      else if (key == "reversed") c.reversed = v != 0.0;
      else if (key == "nodes") c.nodes = static_cast<int>(v);
      else throw std::invalid_argument("curve: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

Eigen::Vector3d curve_point(const CurveSpec& c, double t) {
  Eigen::Vector3d p, dp;
  local(c, c.reversed ? -t : t, p, dp);
  return frame(c) * p;
}

Eigen::Vector3d curve_tangent(const CurveSpec& c, double t) {
  Eigen::Vector3d p, dp;
  local(c, c.reversed ? -t : t, p, dp);
  return (c.reversed ? -1.0 : 1.0) * (frame(c) * dp);
}

double enclosed_area(const CurveSpec& c) {
  double A;
  if (c.family == CurveFamily::Ellipse) {
    // Polar area about the axis: int (1 - cos rho) dphi with dphi/dt = ab / rho^2.
    const int n = 4096;
    A = 0.0;
    for (int j = 0; j < n; ++j) {
      const double t = (j + 0.5) * 2 * M_PI / n;
      const double x = c.a * std::cos(t), y = c.b * std::sin(t);
      const double rho2 = x * x + y * y;
      A += (1.0 - std::cos(std::sqrt(rho2))) * c.a * c.b / rho2;
    }
    A *= 2 * M_PI / n;
  } else {
    A = 2 * M_PI * (1.0 - std::cos(local_radius(c)));
  }
  return c.reversed ? 4 * M_PI - A : A;
}

std::vector<cplx> circulation_coefficients(const CurveSpec& c, int lmax, int nodes) {
  if (lmax < 1) throw std::invalid_argument("circulation: lmax must be >= 1");
  std::vector<cplx> g((lmax + 1) * (lmax + 1), 0.0);
  const double h = 2 * M_PI / nodes;
  for (int j = 0; j < nodes; ++j) {
    const double t = (j + 0.5) * h;
    const Eigen::Vector3d x = curve_point(c, t), dx = curve_tangent(c, t);
    const double theta = std::acos(std::clamp(x.z(), -1.0, 1.0));
    const double phi = std::atan2(x.y(), x.x());
    const Eigen::Vector3d eth(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta));
    const Eigen::Vector3d eph(-std::sin(phi), std::cos(phi), 0.0);
    const double tth = dx.dot(eth), tph = dx.dot(eph);
    harmonics::Legendre lg(lmax, theta);
    for (int l = 1; l <= lmax; ++l) {
      const double inv = 1.0 / std::sqrt(eigenvalue(l));
      for (int m = 0; m <= l; ++m) {
        const cplx e = std::polar(1.0, m * phi);
        // (n x grad Y) . dx = d_theta Y (e_phi . dx) - (1/sin) d_phi Y (e_theta . dx)
        const cplx dth = lg.dP(l, m) * e;
        const cplx dph = m == 0 ? cplx(0.0) : cplx(0.0, m) * lg.Q(l, m) * e;
        g[basis::SmoothField::position(l, m)] += h * inv * (dth * tph - dph * tth);
      }
    }
  }
  for (int l = 1; l <= lmax; ++l)
    for (int m = 1; m <= l; ++m)
      g[basis::SmoothField::position(l, -m)] = double(parity_sign(m)) * std::conj(g[basis::SmoothField::position(l, m)]);
  return g;
}

CirculationReport circulation_variance(const CurveSpec& c, int lmax) {
  c.validate();
  if (lmax < 2) throw std::invalid_argument("circulation_variance: lmax must be >= 2");
  CirculationReport r;
  r.lmax = lmax;
  r.nodes = c.nodes > 0 ? c.nodes : auto_nodes(lmax);
  auto g = circulation_coefficients(c, lmax, r.nodes);
  auto g2 = circulation_coefficients(c, lmax, 2 * r.nodes);
  double scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    r.quadrature_error = std::max(r.quadrature_error, std::abs(g[i] - g2[i]));
    scale = std::max(scale, std::abs(g2[i]));
  }
  if (r.quadrature_error > 1e-10 * std::max(1.0, scale))
    throw harmonics::ResolutionError("circulation: curve quadrature under-resolved with " + std::to_string(r.nodes) +
                                     " nodes");
  r.shells.assign(lmax + 1, 0.0);
  for (int l = 1; l <= lmax; ++l) {
    for (int m = -l; m <= l; ++m) r.shells[l] += std::norm(g2[basis::SmoothField::position(l, m)]);
    r.shells[l] /= eigenvalue(l);
    r.variance += r.shells[l];
  }
  const int from = std::max(1, (3 * lmax) / 4);
  double A = 0.0;
  for (int l = from; l <= lmax; ++l) A += r.shells[l] * double(l) * l;
  A /= double(lmax - from + 1);
  r.tail_estimate = A / (lmax + 0.5);
  r.area = enclosed_area(c);
  r.full_variance = r.area * (4 * M_PI - r.area) / (4 * M_PI);
  return r;
}

CirculationMC circulation_mc(const CurveSpec& c, int lmax, int count, std::uint64_t seed) {
  auto rep = circulation_variance(c, lmax);
  auto g = circulation_coefficients(c, lmax, 2 * rep.nodes);
  std::vector<double> x2(count), im(count);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(seed, streams::kCirculationMC, static_cast<std::uint64_t>(i));
    std::normal_distribution<double> nd;
    cplx gamma = 0.0;
    for (int l = 1; l <= lmax; ++l) {
      const double inv = 1.0 / std::sqrt(eigenvalue(l));
      gamma -= nd(rng) * g[basis::SmoothField::position(l, 0)] * inv;
      for (int m = 1; m <= l; ++m) {
        const double gc = nd(rng), gs = nd(rng);
        const cplx w = cplx(gc, gs) / std::sqrt(2.0);
        const cplx wn = double(parity_sign(m)) * std::conj(w);
        gamma -= (w * g[basis::SmoothField::position(l, m)] + wn * g[basis::SmoothField::position(l, -m)]) * inv;
      }
    }
    x2[i] = gamma.real() * gamma.real();
    im[i] = std::fabs(gamma.imag());
  }
  CirculationMC r;
  r.count = count;
  r.variance = measures::estimate(x2);
  r.spectral = rep.variance;
  r.z = std::fabs(r.variance.mean - r.spectral) / r.variance.se;
  for (double v : im) r.max_imag = std::max(r.max_imag, v);
  r.pass = r.z <= 4.0 && r.max_imag < 1e-10;
  return r;
}

double cap_integral(int l, double theta0) {
  const double x = std::cos(theta0);
  const double norm = std::sqrt((2.0 * l + 1.0) / (4 * M_PI));
  if (l == 0) return 2 * M_PI * norm * (1.0 - x);
  return 2 * M_PI * norm * (std::legendre(l - 1, x) - std::legendre(l + 1, x)) / (2.0 * l + 1.0);
}

}  // namespace zeitlin::circulation
