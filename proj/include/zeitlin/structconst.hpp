#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "zeitlin/index.hpp"

namespace zeitlin::structconst {

struct TripleIndex {
  int l = 1, m = 0, lp = 1, mp = 0, lb = 1, mb = 0;

  int L() const { return l + lp + lb; }
  bool valid() const;       // ranges of l and m
  bool admissible() const;  // valid, triangle, mb = m + mp
};

// s_N multiplying the matrix commutator.
enum class BracketScale { N32, Np1_32 };

double bracket_scale(int N, BracketScale s);
BracketScale parse_scale(std::string_view name);
std::string_view scale_name(BracketScale s);

bool triangle(int l, int lp, int lb);
double triangle_delta(int l, int lp, int lb);

// Reduced constant P; defined as 0 for even L.
double P_factor(int l, int lp, int lb);

// Both constants factor as reduced(l,lp,lb) * (-1)^mb * 3j(l lp lb; m mp -mb).
double continuous_reduced(int l, int lp, int lb);
double discrete_reduced(int N, int l, int lp, int lb, BracketScale s = BracketScale::N32);

double continuous_C(const TripleIndex& idx);
double discrete_C(int N, const TripleIndex& idx, BracketScale s = BracketScale::N32);

// The two closed forms of the discrete constant. discrete_C uses the first and
// cross-checks against the second in debug builds.
double discrete_C_6j(int N, const TripleIndex& idx, BracketScale s = BracketScale::N32);
double discrete_C_expanded(int N, const TripleIndex& idx, BracketScale s = BracketScale::N32);

double stirling_P_estimate(int l, int lp, int lb);

struct DiffBoundReport {
  int N = 0;
  double r1_max = 0.0, r2_max = 0.0;
  TripleIndex r1_arg, r2_arg;
  std::size_t odd_triples = 0;   // admissible entries with odd L
  std::size_t even_triples = 0;  // admissible entries with even L (both ratios 0)
};

DiffBoundReport diff_bound_check(int N, BracketScale s = BracketScale::N32);
DiffBoundReport diff_bound_check_serial(int N, BracketScale s = BracketScale::N32);

struct LatticeVec {
  int x = 0, y = 0;
};

inline int cross(LatticeVec n, LatticeVec k) { return n.y * k.x - k.y * n.x; }

double torus_C(int N, LatticeVec n, LatticeVec k);

}  // namespace zeitlin::structconst
