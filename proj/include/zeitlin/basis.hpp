#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "zeitlin/index.hpp"

namespace zeitlin::basis {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Element of su(N), or of its complexification when the coefficients break
// the reality constraint. Coefficients are over T_{l,m}, 1 <= l <= N-1, in
// flat_index order.
class QuantizedField {
 public:
  QuantizedField() = default;
  explicit QuantizedField(int N);

  static QuantizedField mode(int N, int l, int m, cplx c = 1.0);
  static QuantizedField from_coeffs(int N, Eigen::VectorXcd c);

  // Real orthonormal basis E_a: E_{l0} = T_{l0}; for m > 0 the pair
  // (T_{lm} + (-1)^m T_{l,-m})/sqrt2 and i(T_{lm} - (-1)^m T_{l,-m})/sqrt2,
  // stored at the flat positions of (l,m) and (l,-m) respectively.
  static QuantizedField from_real(int N, const Eigen::VectorXd& g);
  Eigen::VectorXd real_coordinates() const;

  int N() const { return N_; }
  int lmax() const { return N_ - 1; }
  int size() const { return static_cast<int>(c_.size()); }

  cplx operator()(int l, int m) const { return c_[flat_index(l, m)]; }
  cplx& operator()(int l, int m) { return c_[flat_index(l, m)]; }
  const Eigen::VectorXcd& coeffs() const { return c_; }
  Eigen::VectorXcd& coeffs() { return c_; }

  // max |conj(w_{lm}) - (-1)^m w_{l,-m}|
  double reality_defect() const;

  QuantizedField& operator+=(const QuantizedField& o);
  QuantizedField& operator-=(const QuantizedField& o);
  QuantizedField& operator*=(cplx s);
  friend QuantizedField operator+(QuantizedField a, const QuantizedField& b) { return a += b; }
  friend QuantizedField operator-(QuantizedField a, const QuantizedField& b) { return a -= b; }
  friend QuantizedField operator*(cplx s, QuantizedField a) { return a *= s; }

 private:
  int N_ = 0;
  Eigen::VectorXcd c_;
};

// Orthonormal spherical matrices T_{l,m} = i * eps * Y_{l,m} where
// (Y_{l,m})_{m1 m2} = (-1)^{s-m1} sqrt(2l+1) 3j(s l s; -m1 m m2), s=(N-1)/2,
// row i <-> m1 = s - i. Each T_{l,m} lives on the single diagonal j = i + m,
// so only that band is stored.
class BasisSet {
 public:
  explicit BasisSet(int N);

  int N() const { return N_; }
  int modes() const { return mode_count(N_ - 1); }
  int phase() const { return eps_; }

  // Band of T at flat index k: values at (row0 + r, row0 + r + m), r = 0..len-1.
  const std::vector<cplx>& band(int k) const { return bands_[k]; }
  static int band_row0(int m) { return m >= 0 ? 0 : -m; }

  Matrix dense(int l, int m) const;
  Matrix to_matrix(const QuantizedField& w) const;
  QuantizedField from_matrix(const Matrix& M) const;

  // Tr(T_k^* M)
  cplx project(int k, const Matrix& M) const;

 private:
  void fill(int eps);

  int N_;
  int eps_ = 1;
  std::vector<std::vector<cplx>> bands_;
};

BasisSet build_basis(int N);

// Shared immutable basis per level, built on first request.
const BasisSet& shared_basis(int N);

cplx inner(const QuantizedField& a, const QuantizedField& b);
cplx trace_inner(const Matrix& a, const Matrix& b);  // Tr(a^* b)

// (-Delta_N)^s on coefficients.
QuantizedField laplacian_pow(const QuantizedField& w, double s);
double sobolev_norm(const QuantizedField& w, double s);

// Truncated spherical-harmonic expansion, coefficients over l = 0..lmax in
// position l*l + l + m.
class SmoothField {
 public:
  SmoothField() = default;
  explicit SmoothField(int lmax);

  static int position(int l, int m) { return l * l + l + m; }

  int lmax() const { return lmax_; }
  cplx operator()(int l, int m) const { return c_[position(l, m)]; }
  cplx& operator()(int l, int m) { return c_[position(l, m)]; }
  const Eigen::VectorXcd& coeffs() const { return c_; }
  Eigen::VectorXcd& coeffs() { return c_; }

  double l2_norm() const { return c_.norm(); }
  SmoothField laplacian_pow(double s) const;  // l = 0 mode dropped for s < 0

 private:
  int lmax_ = 0;
  Eigen::VectorXcd c_;
};

QuantizedField project(const SmoothField& f, int N);
SmoothField lift(const QuantizedField& w);

// max |Tr(T_a^* T_b) - delta_ab| over all pairs.
double orthonormality_residual(const BasisSet& B);

}  // namespace zeitlin::basis

namespace zeitlin::structconst {
class StructureTable;
}

namespace zeitlin::basis {

// Band of [T_a, T_b]; it sits on the diagonal offset m_a + m_b.
std::vector<cplx> commutator_band(const BasisSet& B, int a, int b);

// max over pairs a < b and matrix entries of
// |s_N [T_a, T_b] - sum_c i C_{ab}^c T_c| using table constants.
double closure_residual(const BasisSet& B, const structconst::StructureTable& table);
double closure_residual_serial(const BasisSet& B, const structconst::StructureTable& table);

}  // namespace zeitlin::basis
