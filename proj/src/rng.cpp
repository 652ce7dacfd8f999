#include "causal_lab/rng.hpp"

#include <cmath>
#include <numbers>

namespace clab {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

// 53 random bits mapped to the open interval (0, 1).
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

SeedLineage SeedLineage::with(Purpose purpose, std::uint32_t index) const noexcept {
  SeedLineage out = *this;
  out.substream = (static_cast<std::uint32_t>(purpose) << 24) | (index & 0x00FFFFFFu);
  return out;
}

SeedLineage SeedLineage::with_replication(std::uint32_t rep) const noexcept {
  SeedLineage out = *this;
  out.replication = rep;
  return out;
}

std::string SeedLineage::to_string() const {
  return std::to_string(master_seed) + "/" + std::to_string(replication) + "/" +
         std::to_string(substream);
}

CounterStream::CounterStream(SeedLineage lineage) noexcept
    : lineage_(lineage),
      key_{static_cast<std::uint32_t>(lineage.master_seed),
           static_cast<std::uint32_t>(lineage.master_seed >> 32)} {}

Philox4x32::Counter CounterStream::block(std::int64_t draw, std::uint32_t blk) const noexcept {
  // Offset so that negative (pre-sample) draws map to distinct counters.
  const auto shifted = static_cast<std::uint32_t>(static_cast<std::uint64_t>(draw) + 0x80000000ull);
  return Philox4x32::generate({shifted, lineage_.replication, blk, lineage_.substream}, key_);
}

double CounterStream::uniform(std::int64_t draw, std::uint32_t k) const noexcept {
  const auto b = block(draw, k / 2);
  const std::size_t w = (k % 2) * 2;
  const std::uint64_t bits = (static_cast<std::uint64_t>(b[w]) << 32) | b[w + 1];
  return to_open_unit(bits);
}

double CounterStream::normal(std::int64_t draw, std::uint32_t k) const noexcept {
  const double u1 = uniform(draw, k);
  const double u2 = uniform(draw, k + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterStream::normal(std::int64_t draw) const noexcept { return normal(draw, 0); }

double CounterStream::sign(std::int64_t draw) const noexcept {
  return (block(draw, 0)[0] & 1u) ? 1.0 : -1.0;
}

}  // namespace clab
