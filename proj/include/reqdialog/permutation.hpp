#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace reqdialog {

/// 64-bit linear congruential generator (Knuth's MMIX constants). The state
/// starts at the seed; each draw advances it once and yields the high 32 bits.
class LinearGenerator {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr std::uint64_t kIncrement = 1442695040888963407ULL;

  explicit constexpr LinearGenerator(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint32_t next() noexcept {
    state_ = state_ * kMultiplier + kIncrement;
    return static_cast<std::uint32_t>(state_ >> 32);
  }

  /// Value in [0, bound) by multiply-shift; bound must be in [1, 2^32].
  constexpr std::uint32_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint32_t>((static_cast<std::uint64_t>(next()) * bound) >> 32);
  }

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates from the back: for i = n-1 .. 1, swap items[i] with
/// items[below(i+1)].
template <typename T>
void seeded_shuffle(std::span<T> items, std::uint64_t seed) {
  LinearGenerator gen(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = gen.below(i);
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace reqdialog
