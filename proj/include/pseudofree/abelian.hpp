#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pseudofree/error.hpp"

namespace pseudofree {

/// Trial division; inputs here are group orders and torsion coefficients.
inline std::map<std::uint64_t, std::uint64_t> factorize(std::uint64_t n) {
  std::map<std::uint64_t, std::uint64_t> out;
  if (n == 0) fail(ErrorKind::InvalidParameters, "cannot factor 0");
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      ++out[p];
      n /= p;
    }
  }
  if (n > 1) ++out[n];
  return out;
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// base^exp mod m; operands must stay below 2^32.
inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp) {
    if (exp & 1) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (const auto& [p, e] : factorize(n)) out.push_back(p);
  return out;
}

/// A positive integer kept as prime -> exponent. Order 1 is the empty map.
class FactoredOrder {
 public:
  FactoredOrder() = default;

  static FactoredOrder of(std::uint64_t n) {
    FactoredOrder f;
    f.exponents_ = factorize(n);
    return f;
  }

  static FactoredOrder from_map(const std::map<std::uint64_t, std::uint64_t>& m) {
    FactoredOrder f;
    for (const auto& [p, e] : m) {
      if (!is_prime(p)) fail(ErrorKind::InvalidParameters, std::to_string(p) + " is not prime");
      if (e > 0) f.exponents_[p] = e;
    }
    return f;
  }

  const std::map<std::uint64_t, std::uint64_t>& exponents() const noexcept { return exponents_; }

  std::uint64_t exponent(std::uint64_t p) const {
    auto it = exponents_.find(p);
    return it == exponents_.end() ? 0 : it->second;
  }

  bool is_one() const noexcept { return exponents_.empty(); }

  FactoredOrder& operator*=(const FactoredOrder& rhs) {
    for (const auto& [p, e] : rhs.exponents_) exponents_[p] += e;
    return *this;
  }

  friend FactoredOrder operator*(FactoredOrder lhs, const FactoredOrder& rhs) { return lhs *= rhs; }

  FactoredOrder pow(std::uint64_t k) const {
    FactoredOrder out;
    if (k == 0) return out;
    for (const auto& [p, e] : exponents_) out.exponents_[p] = e * k;
    return out;
  }

  /// Absent when the value does not fit in 64 bits.
  std::optional<std::uint64_t> to_integer() const {
    std::uint64_t v = 1;
    for (const auto& [p, e] : exponents_)
      for (std::uint64_t i = 0; i < e; ++i)
        if (__builtin_mul_overflow(v, p, &v)) return std::nullopt;
    return v;
  }

  std::string to_string() const {
    if (exponents_.empty()) return "1";
    std::ostringstream os;
    bool first = true;
    for (const auto& [p, e] : exponents_) {
      if (!first) os << " * ";
      first = false;
      os << p;
      if (e > 1) os << '^' << e;
    }
    return os.str();
  }

  bool operator==(const FactoredOrder&) const = default;

 private:
  std::map<std::uint64_t, std::uint64_t> exponents_;
};

/// A finitely generated abelian group Z^free_rank + Z/d1 + ... + Z/dt with
/// d1 | d2 | ... | dt and every di >= 2. The empty group is trivial.
class AbelianGroup {
 public:
  AbelianGroup() = default;

  /// Accepts any list of cyclic orders (1s are dropped) and normalizes it to
  /// invariant factors.
  static AbelianGroup from_cyclic(const std::vector<std::uint64_t>& orders, int free_rank = 0) {
    std::map<std::uint64_t, std::vector<std::uint64_t>> prime_powers;
    for (std::uint64_t d : orders) {
      if (d == 0) fail(ErrorKind::InvalidParameters, "cyclic order 0 is not finite");
      for (const auto& [p, e] : factorize(d)) {
        std::uint64_t q = 1;
        for (std::uint64_t i = 0; i < e; ++i) q *= p;
        prime_powers[p].push_back(q);
      }
    }
    std::size_t width = 0;
    for (auto& [p, qs] : prime_powers) {
      std::sort(qs.begin(), qs.end(), std::greater<>());
      width = std::max(width, qs.size());
    }
    // factors_[width-1] is the largest; the j-th largest of every prime goes
    // into the same slot.
    std::vector<std::uint64_t> factors(width, 1);
    for (const auto& [p, qs] : prime_powers)
      for (std::size_t j = 0; j < qs.size(); ++j) factors[width - 1 - j] *= qs[j];
    AbelianGroup g;
    g.free_rank_ = free_rank;
    g.factors_ = std::move(factors);
    return g;
  }

  static AbelianGroup free(int rank) { return from_cyclic({}, rank); }
  static AbelianGroup cyclic(std::uint64_t n) { return from_cyclic({n}); }
  static AbelianGroup trivial() { return {}; }

  int free_rank() const noexcept { return free_rank_; }
  const std::vector<std::uint64_t>& invariant_factors() const noexcept { return factors_; }
  bool is_finite() const noexcept { return free_rank_ == 0; }
  bool is_trivial() const noexcept { return free_rank_ == 0 && factors_.empty(); }

  FactoredOrder order() const {
    if (free_rank_ > 0) fail(ErrorKind::InfiniteEntry, "group " + to_string() + " is infinite");
    FactoredOrder f;
    for (std::uint64_t d : factors_) f *= FactoredOrder::of(d);
    return f;
  }

  std::string to_string() const {
    if (is_trivial()) return "0";
    std::ostringstream os;
    bool first = true;
    if (free_rank_ > 0) {
      os << 'Z';
      if (free_rank_ > 1) os << '^' << free_rank_;
      first = false;
    }
    for (std::uint64_t d : factors_) {
      if (!first) os << " x ";
      first = false;
      os << 'Z' << d;
    }
    return os.str();
  }

  bool operator==(const AbelianGroup&) const = default;

 private:
  int free_rank_ = 0;
  std::vector<std::uint64_t> factors_;
};

}  // namespace pseudofree
