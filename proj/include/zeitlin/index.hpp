#pragma once

#include <cstddef>
#include <cstdlib>

namespace zeitlin {

// (l, m) with l >= 1. Flat position l*l + l + m - 1 enumerates l = 1, 2, ...
// and m = -l..l in increasing order.
struct HarmonicIndex {
  int l = 1;
  int m = 0;

  friend bool operator==(HarmonicIndex a, HarmonicIndex b) { return a.l == b.l && a.m == b.m; }
};

inline constexpr int flat_index(int l, int m) { return l * l + l + m - 1; }
inline constexpr int flat_index(HarmonicIndex h) { return flat_index(h.l, h.m); }

inline HarmonicIndex from_flat(int k) {
  int l = 1;
  while ((l + 1) * (l + 1) - 1 <= k) ++l;
  return {l, k - (l * l + l - 1)};
}

// Number of modes with 1 <= l <= lmax, i.e. dim su(N) for lmax = N-1.
inline constexpr int mode_count(int lmax) { return (lmax + 1) * (lmax + 1) - 1; }

inline constexpr int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

inline constexpr double eigenvalue(int l) { return static_cast<double>(l) * (l + 1); }

}  // namespace zeitlin
