#pragma once

#include <cstdint>
#include <random>

namespace zeitlin {

// Generator for one (seed, stream, index) triple. Each sample gets its own
// engine so results do not depend on how work is split across threads.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(stream), hi(stream), lo(index), hi(index)};
  return std::mt19937_64(seq);
}

// Stream ids used by the library so different experiments never share draws.
namespace streams {
inline constexpr std::uint64_t kSampleMu = 1;
inline constexpr std::uint64_t kWickQuads = 2;
inline constexpr std::uint64_t kRemainderMC = 3;
inline constexpr std::uint64_t kTorusMC = 4;
inline constexpr std::uint64_t kCirculationMC = 5;
inline constexpr std::uint64_t kStationarity = 6;
inline constexpr std::uint64_t kInitialCondition = 7;
inline constexpr std::uint64_t kWeakLimit = 8;
}  // namespace streams

}  // namespace zeitlin
