#pragma once

// Counter-based random streams.
//
// Every random number in the project is a pure function of
// (master seed, replication index, substream, draw index, block), evaluated
// with Philox4x32-10. Replications can therefore be generated in any order and
// on any number of workers without changing a single bit of output.

#include <array>
#include <cstdint>
#include <string>

namespace clab {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  [[nodiscard]] static Counter generate(Counter counter, Key key) noexcept;
};

/// Logical purpose of a substream. Keeps e.g. innovations and oracle
/// Brownian increments of the same replication independent.
enum class Purpose : std::uint32_t {
  Innovations = 1,
  Brownian = 2,
  Coupling = 3,
  ProjectionOuter = 4,
  ProjectionInner = 5,
  LongRun = 6,
  Conditional = 7,
  Calibration = 8,
};

/// Identity of one random stream: master seed + replication index + substream.
struct SeedLineage {
  std::uint64_t master_seed = 0;
  std::uint32_t replication = 0;
  std::uint32_t substream = 0;

  /// Same seed and replication, different purpose/index. `index` is truncated to 24 bits.
  [[nodiscard]] SeedLineage with(Purpose purpose, std::uint32_t index = 0) const noexcept;
  [[nodiscard]] SeedLineage with_replication(std::uint32_t rep) const noexcept;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const SeedLineage&, const SeedLineage&) = default;
};

/// Immutable view of a stream. Draw indices are signed so pre-sample
/// innovations (time <= 0) live in the same stream as the observed ones.
class CounterStream {
 public:
  explicit CounterStream(SeedLineage lineage) noexcept;

  [[nodiscard]] const SeedLineage& lineage() const noexcept { return lineage_; }

  /// Raw 128-bit block for (draw, block).
  [[nodiscard]] Philox4x32::Counter block(std::int64_t draw, std::uint32_t block = 0) const noexcept;

  /// k-th uniform on the open interval (0, 1) attached to `draw`; two uniforms per block.
  [[nodiscard]] double uniform(std::int64_t draw, std::uint32_t k = 0) const noexcept;

  /// Standard normal for `draw` via Box-Muller on uniforms 0 and 1.
  [[nodiscard]] double normal(std::int64_t draw) const noexcept;

  /// Standard normal built from uniforms (k, k+1) of `draw`.
  [[nodiscard]] double normal(std::int64_t draw, std::uint32_t k) const noexcept;

  /// +1 or -1 with equal probability.
  [[nodiscard]] double sign(std::int64_t draw) const noexcept;

 private:
  SeedLineage lineage_;
  Philox4x32::Key key_;
};

/// Sequential uniforms attached to one draw index; used by rejection samplers
/// that need a data-dependent number of uniforms.
class DrawCursor {
 public:
  DrawCursor(const CounterStream& stream, std::int64_t draw, std::uint32_t first = 0) noexcept
      : stream_(&stream), draw_(draw), next_(first) {}

  double uniform() noexcept { return stream_->uniform(draw_, next_++); }
  double normal() noexcept {
    const double z = stream_->normal(draw_, next_);
    next_ += 2;
    return z;
  }

 private:
  const CounterStream* stream_;
  std::int64_t draw_;
  std::uint32_t next_;
};

}  // namespace clab
