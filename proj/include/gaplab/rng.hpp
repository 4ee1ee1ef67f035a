#pragma once

// Counter-based random streams.
//
// Every draw is a pure function of (root seed, label path, counter index), so
// two computations that name the same stream see the same numbers no matter
// which thread runs them or in what order. Coupled runs over correlated
// instances rely on this: shared randomness is derived, never communicated.

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace gaplab {

namespace detail {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine(std::uint64_t key, std::uint64_t label) noexcept {
  return mix64(key + kGolden * (mix64(label ^ 0x632be59bd9b4e019ULL) | 1ULL));
}

/// FNV-1a, used to turn string tags into labels.
constexpr std::uint64_t hash_tag(std::string_view tag) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace detail

/// Root seed plus a structured label path (experiment id, replicate, step,
/// tree node, ...). Identical (root, labels) always yields identical draws.
class Seed {
 public:
  Seed() : Seed(0) {}
  explicit Seed(std::uint64_t root) : root_(root), key_(detail::mix64(root + detail::kGolden)) {}

  [[nodiscard]] Seed child(std::uint64_t label) const {
    Seed s = *this;
    s.labels_.push_back(label);
    s.key_ = detail::combine(key_, label);
    return s;
  }
  [[nodiscard]] Seed child(std::string_view tag) const { return child(detail::hash_tag(tag)); }

  template <class... Labels>
  [[nodiscard]] Seed derive(Labels... labels) const {
    Seed s = *this;
    ((s = s.child(labels)), ...);
    return s;
  }

  [[nodiscard]] std::uint64_t root() const noexcept { return root_; }
  [[nodiscard]] const std::vector<std::uint64_t>& labels() const noexcept { return labels_; }
  /// Stream key: a hash of root and the full label path.
  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }

  friend bool operator==(const Seed& a, const Seed& b) {
    return a.root_ == b.root_ && a.labels_ == b.labels_;
  }

 private:
  std::uint64_t root_;
  std::vector<std::uint64_t> labels_;
  std::uint64_t key_;
};

/// Stream whose i-th output is mix64(key + (i+1)*golden). Satisfies
/// UniformRandomBitGenerator; random access through at().
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}
  explicit CounterRng(const Seed& seed) noexcept : CounterRng(seed.key()) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  [[nodiscard]] result_type at(std::uint64_t index) const noexcept {
    return detail::mix64(key_ + (index + 1) * detail::kGolden);
  }
  result_type operator()() noexcept { return at(counter_++); }

  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  [[nodiscard]] double uniform01_at(std::uint64_t index) const noexcept {
    return static_cast<double>(at(index) >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept {
    if (p <= 0.0) {
      ++counter_;
      return false;
    }
    if (p >= 1.0) {
      ++counter_;
      return true;
    }
    return uniform01() < p;
  }

  /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t uniform_int(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace gaplab
