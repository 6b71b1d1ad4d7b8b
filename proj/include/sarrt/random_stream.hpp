#ifndef SARRT_RANDOM_STREAM_HPP
#define SARRT_RANDOM_STREAM_HPP

#include <cstdint>

namespace sarrt {

namespace detail {

// murmur3 / splitmix64 finalizer: a bijection on 64-bit words with full avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kSlotGamma = 0xD1B54A32D192ED03ULL;

constexpr double to_unit_interval(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Combines two words into one well-mixed key (seed/trial/n derivation).
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return detail::mix64(detail::mix64(a + detail::kGoldenGamma) ^ (b * detail::kSlotGamma + 0x632BE59BD9B4E019ULL));
}

class RandomStream;

/// Sequential view of the uniforms addressed to one label. Each `next()`
/// consumes the following slot; slot numbering restarts at 0 for every label.
class DrawCursor {
public:
  DrawCursor(const RandomStream& stream, std::uint64_t label) noexcept;

  double next() noexcept;

  std::uint64_t label() const noexcept { return label_; }
  std::uint64_t slots_used() const noexcept { return slot_; }

private:
  std::uint64_t label_base_;
  std::uint64_t label_;
  std::uint64_t slot_ = 0;
};

/// Counter-based generator keyed by (seed, trial). The uniform at
/// (label, slot) is a pure function of the key, so any two consumers that
/// agree on the addressing see identical randomness in any order.
class RandomStream {
public:
  constexpr RandomStream(std::uint64_t seed, std::uint64_t trial) noexcept
      : key_(hash_combine(seed, trial)), seed_(seed), trial_(trial) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }
  constexpr std::uint64_t trial() const noexcept { return trial_; }

  /// Uniform in [0, 1) with 53 random bits.
  constexpr double uniform(std::uint64_t label, std::uint64_t slot) const noexcept {
    return detail::to_unit_interval(slot_bits(label_base(label), slot));
  }

  DrawCursor cursor(std::uint64_t label) const noexcept { return DrawCursor(*this, label); }

  /// Stream for an independent purpose (start-label selection etc.) sharing
  /// the seed but not the key.
  constexpr RandomStream derive(std::uint64_t purpose) const noexcept {
    return RandomStream(hash_combine(seed_, purpose), trial_);
  }

private:
  friend class DrawCursor;

  constexpr std::uint64_t label_base(std::uint64_t label) const noexcept {
    return detail::mix64(key_ + (label + 1) * detail::kGoldenGamma);
  }
  static constexpr std::uint64_t slot_bits(std::uint64_t base, std::uint64_t slot) noexcept {
    return detail::mix64(base + (slot + 1) * detail::kSlotGamma);
  }

  std::uint64_t key_;
  std::uint64_t seed_;
  std::uint64_t trial_;
};

inline DrawCursor::DrawCursor(const RandomStream& stream, std::uint64_t label) noexcept
    : label_base_(stream.label_base(label)), label_(label) {}

inline double DrawCursor::next() noexcept {
  return detail::to_unit_interval(RandomStream::slot_bits(label_base_, slot_++));
}

}  // namespace sarrt

#endif
