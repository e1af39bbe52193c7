#include "zeitlin/basis.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "zeitlin/structconst.hpp"
#include "zeitlin/structure_table.hpp"
#include "zeitlin/wigner.hpp"

namespace zeitlin::basis {

namespace {

void same_level(int a, int b) {
  if (a != b) throw std::invalid_argument("level mismatch: N=" + std::to_string(a) + " vs N=" + std::to_string(b));
}

constexpr double kSqrt2 = 1.41421356237309504880;

}  // namespace

QuantizedField::QuantizedField(int N) : N_(N), c_(Eigen::VectorXcd::Zero(mode_count(N - 1))) {
  if (N < 2) throw std::domain_error("QuantizedField: N must be >= 2");
}

QuantizedField QuantizedField::mode(int N, int l, int m, cplx c) {
  QuantizedField w(N);
  if (l < 1 || l > N - 1 || std::abs(m) > l) throw std::domain_error("QuantizedField::mode: index out of range");
  w(l, m) = c;
  return w;
}

QuantizedField QuantizedField::from_coeffs(int N, Eigen::VectorXcd c) {
  QuantizedField w(N);
  if (c.size() != w.c_.size()) throw std::invalid_argument("QuantizedField: coefficient length mismatch");
  w.c_ = std::move(c);
  return w;
}

QuantizedField QuantizedField::from_real(int N, const Eigen::VectorXd& g) {
  QuantizedField w(N);
  if (g.size() != w.c_.size()) throw std::invalid_argument("QuantizedField::from_real: length mismatch");
  for (int l = 1; l <= N - 1; ++l) {
    w(l, 0) = g[flat_index(l, 0)];
    for (int m = 1; m <= l; ++m) {
      cplx z = cplx(g[flat_index(l, m)], g[flat_index(l, -m)]) / kSqrt2;
      w(l, m) = z;
      w(l, -m) = double(parity_sign(m)) * std::conj(z);
    }
  }
  return w;
}

Eigen::VectorXd QuantizedField::real_coordinates() const {
  Eigen::VectorXd g(c_.size());
  for (int l = 1; l <= lmax(); ++l) {
    g[flat_index(l, 0)] = (*this)(l, 0).real();
    for (int m = 1; m <= l; ++m) {
      // Average the two halves so the map is the orthogonal projection
      // onto real fields.
      cplx z = 0.5 * ((*this)(l, m) + double(parity_sign(m)) * std::conj((*this)(l, -m)));
      g[flat_index(l, m)] = kSqrt2 * z.real();
      g[flat_index(l, -m)] = kSqrt2 * z.imag();
    }
  }
  return g;
}

double QuantizedField::reality_defect() const {
  double d = 0.0;
  for (int l = 1; l <= lmax(); ++l)
    for (int m = -l; m <= l; ++m)
      d = std::max(d, std::abs(std::conj((*this)(l, m)) - double(parity_sign(m)) * (*this)(l, -m)));
  return d;
}

QuantizedField& QuantizedField::operator+=(const QuantizedField& o) {
  same_level(N_, o.N_);
  c_ += o.c_;
  return *this;
}

QuantizedField& QuantizedField::operator-=(const QuantizedField& o) {
  same_level(N_, o.N_);
  c_ -= o.c_;
  return *this;
}

QuantizedField& QuantizedField::operator*=(cplx s) {
  c_ *= s;
  return *this;
}

BasisSet::BasisSet(int N) : N_(N) {
  if (N < 2) throw std::domain_error("build_basis: N must be >= 2");
  fill(1);
  // Pin the global sign on the probe [T_{1,1}, T_{1,0}] -> T_{1,1}.
  structconst::TripleIndex probe{1, 1, 1, 0, 1, 1};
  Matrix a = dense(1, 1), b = dense(1, 0), c = dense(1, 1);
  Matrix br = structconst::bracket_scale(N, structconst::BracketScale::N32) * (a * b - b * a);
  double got = trace_inner(c, br).imag();
  double want = structconst::discrete_C(N, probe);
  if (got * want < 0) fill(-1);
}

void BasisSet::fill(int eps) {
  eps_ = eps;
  bands_.assign(modes(), {});
  const int two_s = N_ - 1;
  using wigner::HalfInt;
  const HalfInt s = HalfInt::from_twice(two_s);
  for (int l = 1; l <= N_ - 1; ++l) {
    const double norm = std::sqrt(2.0 * l + 1.0);
    for (int m = -l; m <= l; ++m) {
      auto& band = bands_[flat_index(l, m)];
      const int row0 = band_row0(m);
      const int len = N_ - std::abs(m);
      band.resize(len);
      for (int r = 0; r < len; ++r) {
        const int i = row0 + r;
        const int twice_m1 = two_s - 2 * i;
        const int twice_m2 = twice_m1 - 2 * m;
        double y = parity_sign(i) * norm *
                   wigner::three_j(s, HalfInt::integer(l), s, HalfInt::from_twice(-twice_m1), HalfInt::integer(m),
                                   HalfInt::from_twice(twice_m2));
        band[r] = cplx(0.0, eps * y);
      }
    }
  }
}

Matrix BasisSet::dense(int l, int m) const {
  Matrix M = Matrix::Zero(N_, N_);
  const auto& band = bands_[flat_index(l, m)];
  const int row0 = band_row0(m);
  for (int r = 0; r < static_cast<int>(band.size()); ++r) M(row0 + r, row0 + r + m) = band[r];
  return M;
}

Matrix BasisSet::to_matrix(const QuantizedField& w) const {
  same_level(N_, w.N());
  Matrix M = Matrix::Zero(N_, N_);
  for (int l = 1; l <= N_ - 1; ++l) {
    for (int m = -l; m <= l; ++m) {
      const int k = flat_index(l, m);
      const cplx c = w.coeffs()[k];
      if (c == cplx(0.0)) continue;
      const auto& band = bands_[k];
      const int row0 = band_row0(m);
      for (int r = 0; r < static_cast<int>(band.size()); ++r) M(row0 + r, row0 + r + m) += c * band[r];
    }
  }
  return M;
}

cplx BasisSet::project(int k, const Matrix& M) const {
  const HarmonicIndex h = from_flat(k);
  const auto& band = bands_[k];
  const int row0 = band_row0(h.m);
  cplx acc = 0.0;
  for (int r = 0; r < static_cast<int>(band.size()); ++r) acc += std::conj(band[r]) * M(row0 + r, row0 + r + h.m);
  return acc;
}

QuantizedField BasisSet::from_matrix(const Matrix& M) const {
  if (M.rows() != N_ || M.cols() != N_) throw std::invalid_argument("from_matrix: shape mismatch");
  QuantizedField w(N_);
  for (int k = 0; k < modes(); ++k) w.coeffs()[k] = project(k, M);
  return w;
}

BasisSet build_basis(int N) { return BasisSet(N); }

const BasisSet& shared_basis(int N) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<BasisSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[N];
  if (!slot) slot = std::make_unique<BasisSet>(N);
  return *slot;
}

cplx inner(const QuantizedField& a, const QuantizedField& b) {
  same_level(a.N(), b.N());
  return a.coeffs().dot(b.coeffs());  // Eigen's dot conjugates the left operand
}

cplx trace_inner(const Matrix& a, const Matrix& b) { return (a.adjoint() * b).trace(); }

QuantizedField laplacian_pow(const QuantizedField& w, double s) {
  QuantizedField out = w;
  for (int l = 1; l <= w.lmax(); ++l) {
    const double f = std::pow(eigenvalue(l), s);
    for (int m = -l; m <= l; ++m) out(l, m) *= f;
  }
  return out;
}

double sobolev_norm(const QuantizedField& w, double s) {
  double acc = 0.0;
  for (int l = 1; l <= w.lmax(); ++l) {
    const double f = std::pow(eigenvalue(l), s);
    for (int m = -l; m <= l; ++m) acc += f * std::norm(w(l, m));
  }
  return std::sqrt(acc);
}

SmoothField::SmoothField(int lmax) : lmax_(lmax), c_(Eigen::VectorXcd::Zero((lmax + 1) * (lmax + 1))) {
  if (lmax < 0) throw std::domain_error("SmoothField: negative lmax");
}

SmoothField SmoothField::laplacian_pow(double s) const {
  SmoothField out = *this;
  for (int l = 0; l <= lmax_; ++l) {
    const double f = (l == 0) ? (s == 0.0 ? 1.0 : 0.0) : std::pow(eigenvalue(l), s);
    for (int m = -l; m <= l; ++m) out(l, m) *= f;
  }
  return out;
}

QuantizedField project(const SmoothField& f, int N) {
  QuantizedField w(N);
  const int top = std::min(f.lmax(), N - 1);
  for (int l = 1; l <= top; ++l)
    for (int m = -l; m <= l; ++m) w(l, m) = f(l, m);
  return w;
}

SmoothField lift(const QuantizedField& w) {
  SmoothField f(w.lmax());
  for (int l = 1; l <= w.lmax(); ++l)
    for (int m = -l; m <= l; ++m) f(l, m) = w(l, m);
  return f;
}

double orthonormality_residual(const BasisSet& B) {
  const int d = B.modes();
  double worst = 0.0;
  for (int a = 0; a < d; ++a) {
    const int ma = from_flat(a).m;
    for (int b = a; b < d; ++b) {
      if (from_flat(b).m != ma) continue;  // different diagonals never overlap
      const auto &x = B.band(a), &y = B.band(b);
      cplx acc = 0.0;
      for (std::size_t r = 0; r < x.size(); ++r) acc += std::conj(x[r]) * y[r];
      worst = std::max(worst, std::abs(acc - (a == b ? 1.0 : 0.0)));
    }
  }
  return worst;
}

std::vector<cplx> commutator_band(const BasisSet& B, int a, int b) {
  const int N = B.N();
  const int ma = from_flat(a).m, mb = from_flat(b).m, mc = ma + mb;
  std::vector<cplx> out(std::max(0, N - std::abs(mc)), 0.0);
  if (out.empty()) return out;
  const auto &A = B.band(a), &Bb = B.band(b);
  const int ra = BasisSet::band_row0(ma), rb = BasisSet::band_row0(mb), rc = BasisSet::band_row0(mc);
  auto get = [N](const std::vector<cplx>& band, int row0, int m, int i) -> cplx {
    int r = i - row0;
    if (r < 0 || r >= static_cast<int>(band.size()) || i + m < 0 || i + m >= N) return 0.0;
    return band[r];
  };
  for (int r = 0; r < static_cast<int>(out.size()); ++r) {
    const int i = rc + r;
    out[r] = get(A, ra, ma, i) * get(Bb, rb, mb, i + ma) - get(Bb, rb, mb, i) * get(A, ra, ma, i + mb);
  }
  return out;
}

namespace {

double closure_row(const BasisSet& B, const structconst::StructureTable& table, int a) {
  const int d = B.modes();
  const HarmonicIndex ha = from_flat(a);
  double worst = 0.0;
  for (int b = a + 1; b < d; ++b) {
    const HarmonicIndex hb = from_flat(b);
    const int mc = ha.m + hb.m;
    if (std::abs(mc) > B.N() - 1) continue;
    std::vector<cplx> br = commutator_band(B, a, b);
    for (auto& v : br) v *= table.scale();
    const int lb_min = std::max({1, std::abs(ha.l - hb.l), std::abs(mc)});
    const int lb_max = std::min(B.N() - 1, ha.l + hb.l);
    for (int lb = lb_min; lb <= lb_max; ++lb) {
      double c = table.lookup({ha.l, ha.m, hb.l, hb.m, lb, mc});
      if (c == 0.0) continue;
      const auto& t = B.band(flat_index(lb, mc));
      for (std::size_t r = 0; r < br.size(); ++r) br[r] -= cplx(0.0, c) * t[r];
    }
    for (const auto& v : br) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace

double closure_residual(const BasisSet& B, const structconst::StructureTable& table) {
  if (table.continuous() || table.level() != B.N()) throw std::invalid_argument("closure_residual: table level mismatch");
  double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 8) reduction(max : worst)
  for (int a = 0; a < B.modes(); ++a) worst = std::max(worst, closure_row(B, table, a));
  return worst;
}

double closure_residual_serial(const BasisSet& B, const structconst::StructureTable& table) {
  if (table.continuous() || table.level() != B.N()) throw std::invalid_argument("closure_residual: table level mismatch");
  double worst = 0.0;
  for (int a = 0; a < B.modes(); ++a) worst = std::max(worst, closure_row(B, table, a));
  return worst;
}

}  // namespace zeitlin::basis
