#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gaplab/errors.hpp"
#include "gaplab/graph.hpp"
#include "gaplab/rng.hpp"

namespace gaplab {

/// Bijection on {0, ..., n-1} with its inverse cached.
class Permutation {
 public:
  Permutation() = default;

  static Permutation identity(std::size_t n) {
    std::vector<Vertex> images(n);
    std::iota(images.begin(), images.end(), Vertex{0});
    return Permutation(std::move(images), images_are_valid{});
  }

  /// Throws std::invalid_argument unless `images` is a bijection.
  static Permutation from_images(std::vector<Vertex> images) {
    std::vector<bool> seen(images.size(), false);
    for (Vertex v : images) {
      if (v >= images.size() || seen[v]) throw std::invalid_argument("not a permutation");
      seen[v] = true;
    }
    return Permutation(std::move(images), images_are_valid{});
  }

  [[nodiscard]] std::size_t size() const noexcept { return forward_.size(); }
  Vertex operator()(Vertex i) const noexcept { return forward_[i]; }
  [[nodiscard]] Vertex preimage(Vertex j) const noexcept { return inverse_[j]; }
  [[nodiscard]] std::span<const Vertex> images() const noexcept { return forward_; }

  [[nodiscard]] Permutation inverse() const {
    Permutation p;
    p.forward_ = inverse_;
    p.inverse_ = forward_;
    return p;
  }

  [[nodiscard]] std::size_t fixed_points() const noexcept {
    std::size_t f = 0;
    for (std::size_t i = 0; i < size(); ++i) f += forward_[i] == i;
    return f;
  }

  /// Number of 2-cycles in the cycle decomposition.
  [[nodiscard]] std::size_t transpositions() const noexcept {
    std::size_t t = 0;
    for (std::size_t i = 0; i < size(); ++i) {
      const Vertex j = forward_[i];
      t += j > i && forward_[j] == i;
    }
    return t;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.forward_ == b.forward_; }

 private:
  struct images_are_valid {};
  Permutation(std::vector<Vertex> images, images_are_valid) : forward_(std::move(images)), inverse_(forward_.size()) {
    for (std::size_t i = 0; i < forward_.size(); ++i) inverse_[forward_[i]] = static_cast<Vertex>(i);
  }

  std::vector<Vertex> forward_;
  std::vector<Vertex> inverse_;
};

/// (outer ∘ inner)(i) = outer(inner(i)).
inline Permutation compose(const Permutation& outer, const Permutation& inner) {
  detail::require_same_size(outer.size(), inner.size(), "compose");
  std::vector<Vertex> images(inner.size());
  for (std::size_t i = 0; i < images.size(); ++i) images[i] = outer(inner(static_cast<Vertex>(i)));
  return Permutation::from_images(std::move(images));
}

inline std::size_t fixed_points(const Permutation& pi) { return pi.fixed_points(); }
inline std::size_t transpositions(const Permutation& pi) { return pi.transpositions(); }

/// #{i : a(i) = b(i)}, which equals the fixed points of a⁻¹ ∘ b.
inline std::size_t permutation_overlap(const Permutation& a, const Permutation& b) {
  detail::require_same_size(a.size(), b.size(), "permutation_overlap");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) agree += a(static_cast<Vertex>(i)) == b(static_cast<Vertex>(i));
  return agree;
}

/// Hamming distance on the symmetric group.
inline std::size_t permutation_distance(const Permutation& a, const Permutation& b) {
  return a.size() - permutation_overlap(a, b);
}

/// Uniform random permutation (Fisher–Yates).
inline Permutation random_permutation(std::size_t n, CounterRng& rng) {
  std::vector<Vertex> images(n);
  std::iota(images.begin(), images.end(), Vertex{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(images[i - 1], images[rng.uniform_int(i)]);
  }
  return Permutation::from_images(std::move(images));
}

}  // namespace gaplab
