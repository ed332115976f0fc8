#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pseudofree/error.hpp"

namespace pseudofree {

using Point = std::uint32_t;

/// A bijection of {0, ..., n-1}. Products compose right to left:
/// (g * h)(x) = g(h(x)).
class Permutation {
 public:
  Permutation() = default;

  explicit Permutation(std::vector<Point> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (Point x : images_) {
      if (x >= images_.size() || seen[x])
        fail(ErrorKind::InvalidPermutation, "images do not form a bijection");
      seen[x] = true;
    }
  }

  static Permutation identity(std::size_t n) {
    Permutation p;
    p.images_.resize(n);
    std::iota(p.images_.begin(), p.images_.end(), Point{0});
    return p;
  }

  /// Cycles are 0-based and need not be disjoint; they are composed right to
  /// left like any other product.
  static Permutation from_cycles(std::size_t n, const std::vector<std::vector<Point>>& cycles) {
    Permutation result = identity(n);
    for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
      const auto& cycle = *it;
      Permutation c = identity(n);
      std::vector<bool> used(n, false);
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        if (cycle[i] >= n)
          fail(ErrorKind::InvalidPermutation, "cycle point " + std::to_string(cycle[i] + 1) +
                                                  " outside domain of size " + std::to_string(n));
        if (used[cycle[i]]) fail(ErrorKind::InvalidPermutation, "repeated point inside a cycle");
        used[cycle[i]] = true;
        c.images_[cycle[i]] = cycle[(i + 1) % cycle.size()];
      }
      result = c * result;
    }
    return result;
  }

  std::size_t degree() const noexcept { return images_.size(); }
  const std::vector<Point>& images() const noexcept { return images_; }
  Point operator()(Point x) const { return images_[x]; }

  Permutation operator*(const Permutation& rhs) const {
    if (rhs.degree() != degree()) fail(ErrorKind::InvalidPermutation, "degree mismatch in product");
    Permutation out;
    out.images_.resize(images_.size());
    for (std::size_t x = 0; x < images_.size(); ++x) out.images_[x] = images_[rhs.images_[x]];
    return out;
  }

  Permutation inverse() const {
    Permutation out;
    out.images_.resize(images_.size());
    for (std::size_t x = 0; x < images_.size(); ++x) out.images_[images_[x]] = static_cast<Point>(x);
    return out;
  }

  bool is_identity() const noexcept {
    for (std::size_t x = 0; x < images_.size(); ++x)
      if (images_[x] != x) return false;
    return true;
  }

  /// Embed into a domain of size n, acting on [offset, offset + degree()).
  Permutation shifted(std::size_t n, std::size_t offset) const {
    Permutation out = identity(n);
    for (std::size_t x = 0; x < images_.size(); ++x)
      out.images_[x + offset] = static_cast<Point>(images_[x] + offset);
    return out;
  }

  std::vector<std::vector<Point>> cycles() const {
    std::vector<std::vector<Point>> out;
    std::vector<bool> seen(images_.size(), false);
    for (Point start = 0; start < images_.size(); ++start) {
      if (seen[start] || images_[start] == start) continue;
      std::vector<Point> cycle;
      for (Point x = start; !seen[x]; x = images_[x]) {
        seen[x] = true;
        cycle.push_back(x);
      }
      out.push_back(std::move(cycle));
    }
    return out;
  }

  /// Cycle notation, 1-based; the identity prints as "()".
  std::string to_string() const {
    auto cs = cycles();
    if (cs.empty()) return "()";
    std::ostringstream os;
    for (const auto& c : cs) {
      os << '(';
      for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i] + 1;
      os << ')';
    }
    return os.str();
  }

  auto operator<=>(const Permutation&) const = default;
  bool operator==(const Permutation&) const = default;

 private:
  std::vector<Point> images_;
};

struct PermutationHash {
  std::size_t operator()(const Permutation& p) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Point x : p.images()) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

}  // namespace pseudofree
