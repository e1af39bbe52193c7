#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "zeitlin/structconst.hpp"

namespace zeitlin::structconst {

// Structure constants over admissible odd-L triples, stored once per
// unordered pair a < b of flat indices. Discrete tables keep unit-scale values
// (s_N = 1) so that one cache file serves every bracket scale.
class StructureTable {
 public:
  struct Entry {
    int lb;
    double value;
  };

  static StructureTable build(int N, BracketScale s = BracketScale::N32);
  static StructureTable build_serial(int N, BracketScale s = BracketScale::N32);
  static StructureTable build_continuous(int lmax);

  // Loads a cached discrete table when present and valid, otherwise builds
  // and writes it. Returns the table; `hit` reports which path was taken.
  static StructureTable cached(int N, BracketScale s, const std::filesystem::path& dir, bool* hit = nullptr);

  bool continuous() const { return level_ == 0; }
  int level() const { return level_; }
  int lmax() const { return lmax_; }
  int modes() const { return mode_count(lmax_); }
  double scale() const { return scale_; }
  BracketScale scale_kind() const { return scale_kind_; }

  // Full constant including s_N and antisymmetry; 0 for inadmissible input.
  double lookup(const TripleIndex& t) const;

  std::size_t size() const { return entries_.size(); }

  // Visits stored canonical entries (a < b in flat order) with scaled values.
  template <class F>
  void for_each(F&& f) const {
    for_each_unit([&](const TripleIndex& t, double v) { f(t, scale_ * v); });
  }

  // Same, with the unit-scale values as stored.
  template <class F>
  void for_each_unit(F&& f) const {
    for (int a = 0; a < modes(); ++a) {
      HarmonicIndex ha = from_flat(a);
      for (int b = a + 1; b < modes(); ++b) {
        std::size_t p = pair_index(a, b);
        if (offsets_[p] == offsets_[p + 1]) continue;
        HarmonicIndex hb = from_flat(b);
        for (std::size_t i = offsets_[p]; i < offsets_[p + 1]; ++i) {
          const Entry& e = entries_[i];
          f(TripleIndex{ha.l, ha.m, hb.l, hb.m, e.lb, ha.m + hb.m}, e.value);
        }
      }
    }
  }

  std::uint32_t checksum() const;
  void save(const std::filesystem::path& file) const;
  static StructureTable load(const std::filesystem::path& file, BracketScale s = BracketScale::N32);

  friend bool operator==(const StructureTable& a, const StructureTable& b) {
    return a.level_ == b.level_ && a.lmax_ == b.lmax_ && a.offsets_ == b.offsets_ &&
           a.entries_.size() == b.entries_.size() &&
           std::equal(a.entries_.begin(), a.entries_.end(), b.entries_.begin(),
                      [](const Entry& x, const Entry& y) { return x.lb == y.lb && x.value == y.value; });
  }

 private:
  struct Record {
    int a, b, lb;
    double value;
  };

  std::size_t pair_index(int a, int b) const {
    const std::size_t d = modes();
    return static_cast<std::size_t>(a) * d - static_cast<std::size_t>(a) * (a + 1) / 2 + (b - a - 1);
  }
  void assemble(std::vector<std::vector<Record>>& shards);
  static StructureTable build_impl(int level, int lmax, BracketScale s, bool parallel);

  int level_ = 0;
  int lmax_ = 0;
  double scale_ = 1.0;
  BracketScale scale_kind_ = BracketScale::N32;
  std::vector<std::uint64_t> offsets_;
  std::vector<Entry> entries_;
};

std::filesystem::path default_cache_dir();

}  // namespace zeitlin::structconst
