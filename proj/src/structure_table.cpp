#include "zeitlin/structure_table.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "zeitlin/wigner.hpp"

namespace zeitlin::structconst {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'Z', 'S', 'T', 'C'};
constexpr std::uint32_t kVersion = 1;

double unit_reduced(int level, int l, int lp, int lb) {
  if (level == 0) return continuous_reduced(l, lp, lb);
  return discrete_reduced(level, l, lp, lb, BracketScale::N32) / bracket_scale(level, BracketScale::N32);
}

}  // namespace

StructureTable StructureTable::build_impl(int level, int lmax, BracketScale s, bool parallel) {
  StructureTable t;
  t.level_ = level;
  t.lmax_ = lmax;
  t.scale_kind_ = s;
  t.scale_ = level == 0 ? 1.0 : bracket_scale(level, s);

  std::vector<std::vector<Record>> shards(lmax + 1);
  auto fill = [&](int lb) {
    auto& out = shards[lb];
    for (int l = 1; l <= lmax; ++l) {
      for (int lp = std::max(1, std::abs(l - lb)); lp <= std::min(lmax, l + lb); ++lp) {
        if ((l + lp + lb) % 2 == 0) continue;
        const double red = unit_reduced(level, l, lp, lb);
        for (int m = -l; m <= l; ++m) {
          const int a = flat_index(l, m);
          for (int mp = std::max(-lp, -lb - m); mp <= std::min(lp, lb - m); ++mp) {
            const int b = flat_index(lp, mp);
            if (b <= a) continue;
            const int mb = m + mp;
            double v = red * parity_sign(mb) * wigner::three_j(l, lp, lb, m, mp, -mb);
            if (v != 0.0) out.push_back({a, b, lb, v});
          }
        }
      }
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int lb = 1; lb <= lmax; ++lb) fill(lb);
  } else {
    for (int lb = 1; lb <= lmax; ++lb) fill(lb);
  }
  t.assemble(shards);
  return t;
}

void StructureTable::assemble(std::vector<std::vector<Record>>& shards) {
  const std::size_t d = modes();
  const std::size_t npairs = d * (d - 1) / 2;
  offsets_.assign(npairs + 1, 0);
  for (const auto& sh : shards)
    for (const auto& r : sh) ++offsets_[pair_index(r.a, r.b) + 1];
  for (std::size_t p = 0; p < npairs; ++p) offsets_[p + 1] += offsets_[p];
  entries_.resize(offsets_[npairs]);
  std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Shards are visited in increasing lb, so each pair's entries end up sorted.
  for (auto& sh : shards) {
    for (const auto& r : sh) entries_[cursor[pair_index(r.a, r.b)]++] = {r.lb, r.value};
    std::vector<Record>().swap(sh);
  }
}

StructureTable StructureTable::build(int N, BracketScale s) {
  if (N < 2) throw std::domain_error("StructureTable: N must be >= 2");
  return build_impl(N, N - 1, s, true);
}

StructureTable StructureTable::build_serial(int N, BracketScale s) {
  if (N < 2) throw std::domain_error("StructureTable: N must be >= 2");
  return build_impl(N, N - 1, s, false);
}

StructureTable StructureTable::build_continuous(int lmax) {
  if (lmax < 1) throw std::domain_error("StructureTable: lmax must be >= 1");
  return build_impl(0, lmax, BracketScale::N32, true);
}

double StructureTable::lookup(const TripleIndex& t) const {
  if (!t.valid()) throw std::domain_error("StructureTable::lookup: invalid index");
  if (t.l > lmax_ || t.lp > lmax_ || t.lb > lmax_)
    throw std::domain_error("StructureTable::lookup: index beyond table lmax");
  if (!t.admissible() || t.L() % 2 == 0) return 0.0;
  int a = flat_index(t.l, t.m), b = flat_index(t.lp, t.mp);
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const std::size_t p = pair_index(a, b);
  for (std::size_t i = offsets_[p]; i < offsets_[p + 1]; ++i)
    if (entries_[i].lb == t.lb) return sign * scale_ * entries_[i].value;
  return 0.0;
}

namespace {

struct RecordOnDisk {
  std::int32_t idx[6];
  double value;
};
static_assert(sizeof(RecordOnDisk) == 32);

std::vector<unsigned char> serialize(const StructureTable& t, int N) {
  std::vector<unsigned char> buf;
  auto put = [&](const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    buf.insert(buf.end(), c, c + n);
  };
  const std::uint32_t version = kVersion, n = static_cast<std::uint32_t>(N);
  const std::uint64_t count = t.size();
  put(kMagic, 4);
  put(&version, 4);
  put(&n, 4);
  put(&count, 8);
  t.for_each_unit([&](const TripleIndex& x, double v) {
    RecordOnDisk r{{x.l, x.m, x.lp, x.mp, x.lb, x.mb}, v};
    put(&r, sizeof r);
  });
  return buf;
}

}  // namespace

std::uint32_t StructureTable::checksum() const {
  auto buf = serialize(*this, level_);
  return static_cast<std::uint32_t>(::crc32(0L, buf.data(), static_cast<uInt>(buf.size())));
}

void StructureTable::save(const std::filesystem::path& file) const {
  if (continuous()) throw std::logic_error("StructureTable::save: only discrete tables are cached");
  auto buf = serialize(*this, level_);
  std::uint32_t crc = static_cast<std::uint32_t>(::crc32(0L, buf.data(), static_cast<uInt>(buf.size())));
  const auto* c = reinterpret_cast<const unsigned char*>(&crc);
  buf.insert(buf.end(), c, c + 4);
  auto tmp = file;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

StructureTable StructureTable::load(const std::filesystem::path& file, BracketScale s) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (buf.size() < 24) throw std::runtime_error(file.string() + ": truncated header");
  if (std::memcmp(buf.data(), kMagic, 4) != 0) throw std::runtime_error(file.string() + ": bad magic");
  std::uint32_t version, n, crc;
  std::uint64_t count;
  std::memcpy(&version, buf.data() + 4, 4);
  std::memcpy(&n, buf.data() + 8, 4);
  std::memcpy(&count, buf.data() + 12, 8);
  if (version != kVersion) throw std::runtime_error(file.string() + ": unsupported version");
  if (buf.size() != 20 + count * sizeof(RecordOnDisk) + 4) throw std::runtime_error(file.string() + ": size mismatch");
  std::memcpy(&crc, buf.data() + buf.size() - 4, 4);
  if (crc != static_cast<std::uint32_t>(::crc32(0L, buf.data(), static_cast<uInt>(buf.size() - 4))))
    throw std::runtime_error(file.string() + ": CRC mismatch");

  const int N = static_cast<int>(n);
  StructureTable t;
  t.level_ = N;
  t.lmax_ = N - 1;
  t.scale_kind_ = s;
  t.scale_ = bracket_scale(N, s);
  std::vector<std::vector<Record>> shards(1);
  shards[0].reserve(count);
  const int d = t.modes();
  for (std::uint64_t i = 0; i < count; ++i) {
    RecordOnDisk r;
    std::memcpy(&r, buf.data() + 20 + i * sizeof r, sizeof r);
    TripleIndex x{r.idx[0], r.idx[1], r.idx[2], r.idx[3], r.idx[4], r.idx[5]};
    if (!x.admissible() || x.l > t.lmax_ || x.lp > t.lmax_ || x.lb > t.lmax_)
      throw std::runtime_error(file.string() + ": inadmissible record");
    int a = flat_index(x.l, x.m), b = flat_index(x.lp, x.mp);
    if (a >= b || b >= d) throw std::runtime_error(file.string() + ": non-canonical record");
    shards[0].push_back({a, b, x.lb, r.value});
  }
  // Records were written pair-major with increasing lb; a stable assemble
  // therefore reproduces the original layout.
  t.assemble(shards);
  return t;
}

StructureTable StructureTable::cached(int N, BracketScale s, const std::filesystem::path& dir, bool* hit) {
  const auto file = dir / ("zstc_N" + std::to_string(N) + ".bin");
  if (std::filesystem::exists(file)) {
    try {
      auto t = load(file, s);
      if (t.level() == N) {
        if (hit) *hit = true;
        return t;
      }
    } catch (const std::runtime_error&) {
      // Corrupt or stale cache; rebuild below.
    }
  }
  if (hit) *hit = false;
  auto t = build(N, s);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (!ec) t.save(file);
  return t;
}

std::filesystem::path default_cache_dir() {
  if (const char* e = std::getenv("ZEITLIN_CACHE_DIR"); e && *e) return e;
  if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x) return std::filesystem::path(x) / "zeitlin";
  if (const char* h = std::getenv("HOME"); h && *h) return std::filesystem::path(h) / ".cache" / "zeitlin";
  return ".zeitlin-cache";
}

}  // namespace zeitlin::structconst
