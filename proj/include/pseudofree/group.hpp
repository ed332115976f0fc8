#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "pseudofree/abelian.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/permutation.hpp"

namespace pseudofree {

inline constexpr std::size_t kDefaultOrderCap = 2000;

/// A subset of a group's elements, addressed by element index.
class ElementSet {
 public:
  ElementSet() = default;
  explicit ElementSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  std::size_t universe() const noexcept { return universe_; }
  void insert(std::size_t i) { words_[i / 64] |= (std::uint64_t{1} << (i % 64)); }
  bool contains(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  bool is_subset_of(const ElementSet& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  ElementSet intersect(const ElementSet& other) const {
    ElementSet out(universe_);
    for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] = words_[i] & other.words_[i];
    return out;
  }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        out.push_back(w * 64 + static_cast<std::size_t>(__builtin_ctzll(bits)));
        bits &= bits - 1;
      }
    }
    return out;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto w : words_) h = (h ^ w) * 1099511628211ull;
    return h;
  }

  bool operator==(const ElementSet&) const = default;
  /// Lexicographic on the sorted index list.
  bool lex_less(const ElementSet& other) const { return indices() < other.indices(); }

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct ElementSetHash {
  std::size_t operator()(const ElementSet& s) const noexcept { return s.hash(); }
};

/// A finite permutation group with its full element list and Cayley table.
/// Elements are sorted lexicographically by image vector, so the identity
/// is always index 0. Copies share the immutable data.
class PermGroup {
 public:
  using Index = std::uint32_t;

  /// Closure of `gens`; `degree` is used only when `gens` is empty.
  static PermGroup generate(std::vector<Permutation> gens, std::size_t degree = 1,
                            std::size_t order_cap = kDefaultOrderCap) {
    if (!gens.empty()) degree = gens.front().degree();
    for (const auto& g : gens)
      if (g.degree() != degree)
        fail(ErrorKind::InvalidPermutation, "generators act on domains of different sizes");

    auto data = std::make_shared<Data>();
    data->degree = degree;
    data->generators = gens;

    // Breadth-first enumeration by right multiplication with generators.
    std::vector<Permutation> elems{Permutation::identity(degree)};
    std::vector<std::size_t> parent{0}, via{0};
    std::unordered_map<Permutation, std::size_t, PermutationHash> where{{elems[0], 0}};
    std::vector<std::vector<std::size_t>> right(1);
    for (std::size_t i = 0; i < elems.size(); ++i) {
      right[i].resize(gens.size());
      for (std::size_t s = 0; s < gens.size(); ++s) {
        Permutation y = elems[i] * gens[s];
        auto [it, fresh] = where.emplace(y, elems.size());
        if (fresh) {
          if (elems.size() + 1 > order_cap)
            fail(ErrorKind::OrderCapExceeded,
                 "group order exceeds cap " + std::to_string(order_cap));
          elems.push_back(std::move(y));
          parent.push_back(i);
          via.push_back(s);
          right.emplace_back();
        }
        right[i][s] = it->second;
      }
    }

    const std::size_t n = elems.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return elems[a] < elems[b]; });
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;

    data->elements.reserve(n);
    for (std::size_t i = 0; i < n; ++i) data->elements.push_back(elems[order[i]]);
    for (std::size_t i = 0; i < n; ++i) data->lookup.emplace(data->elements[i], i);

    // a * b = (a * parent(b)) * gen(b), filled in BFS order of b.
    data->table.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<std::size_t> prod(n);  // prod[b] = a * b, both in BFS indexing
      prod[0] = order[a];
      for (std::size_t b = 1; b < n; ++b) prod[b] = right[prod[parent[b]]][via[b]];
      for (std::size_t b = 0; b < n; ++b) data->table[a * n + rank[b]] = static_cast<Index>(rank[prod[b]]);
    }

    data->inverse.resize(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (data->table[a * n + b] == 0) {
          data->inverse[a] = static_cast<Index>(b);
          break;
        }

    data->element_order.resize(n);
    for (std::size_t a = 0; a < n; ++a) {
      std::size_t k = 1;
      for (std::size_t x = a; x != 0; x = data->table[x * n + a]) ++k;
      data->element_order[a] = k;
    }
    return PermGroup(std::move(data));
  }

  std::size_t order() const noexcept { return data_->elements.size(); }
  std::size_t degree() const noexcept { return data_->degree; }
  const std::vector<Permutation>& generators() const noexcept { return data_->generators; }
  const std::vector<Permutation>& elements() const noexcept { return data_->elements; }
  const Permutation& element(std::size_t i) const { return data_->elements[i]; }

  static constexpr std::size_t identity() noexcept { return 0; }

  std::size_t mul(std::size_t a, std::size_t b) const { return data_->table[a * order() + b]; }
  std::size_t inv(std::size_t a) const { return data_->inverse[a]; }
  std::size_t element_order(std::size_t a) const { return data_->element_order[a]; }

  std::size_t pow(std::size_t a, std::uint64_t k) const {
    std::size_t result = 0;
    for (std::uint64_t i = 0; i < k % element_order(a); ++i) result = mul(result, a);
    return result;
  }

  std::size_t conjugate(std::size_t g, std::size_t h) const { return mul(mul(g, h), inv(g)); }

  std::optional<std::size_t> index_of(const Permutation& p) const {
    auto it = data_->lookup.find(p);
    if (it == data_->lookup.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::size_t> generator_indices() const {
    std::vector<std::size_t> out;
    for (const auto& g : data_->generators) out.push_back(*index_of(g));
    return out;
  }

  ElementSet all() const {
    ElementSet s(order());
    for (std::size_t i = 0; i < order(); ++i) s.insert(i);
    return s;
  }

  /// The subgroup generated by the given element indices.
  ElementSet closure(const std::vector<std::size_t>& gens) const {
    ElementSet s(order());
    s.insert(0);
    std::vector<std::size_t> queue{0};
    for (std::size_t i = 0; i < queue.size(); ++i)
      for (std::size_t g : gens) {
        std::size_t y = mul(queue[i], g);
        if (!s.contains(y)) {
          s.insert(y);
          queue.push_back(y);
        }
      }
    return s;
  }

  /// A new group on the same domain, generated by the given elements.
  PermGroup subgroup(const std::vector<std::size_t>& gens) const {
    std::vector<Permutation> perms;
    for (std::size_t g : gens) perms.push_back(element(g));
    return generate(std::move(perms), degree(), order());
  }

  bool is_abelian() const {
    for (std::size_t a = 0; a < order(); ++a)
      for (std::size_t b = a + 1; b < order(); ++b)
        if (mul(a, b) != mul(b, a)) return false;
    return true;
  }

  bool is_cyclic() const {
    for (std::size_t a = 0; a < order(); ++a)
      if (element_order(a) == order()) return true;
    return false;
  }

  bool is_normal(const ElementSet& h) const {
    for (std::size_t g : generator_indices())
      for (std::size_t x : h.indices())
        if (!h.contains(conjugate(g, x))) return false;
    return true;
  }

  ElementSet center_set() const {
    ElementSet z(order());
    auto gens = generator_indices();
    for (std::size_t a = 0; a < order(); ++a) {
      bool central = true;
      for (std::size_t g : gens)
        if (mul(a, g) != mul(g, a)) {
          central = false;
          break;
        }
      if (central) z.insert(a);
    }
    return z;
  }

  ElementSet commutator_set() const {
    std::vector<std::size_t> comms;
    ElementSet seen(order());
    for (std::size_t a = 0; a < order(); ++a)
      for (std::size_t b = 0; b < order(); ++b) {
        std::size_t c = mul(mul(inv(a), inv(b)), mul(a, b));
        if (!seen.contains(c)) {
          seen.insert(c);
          comms.push_back(c);
        }
      }
    return closure(comms);
  }

  PermGroup center() const { return subgroup(center_set().indices()); }
  PermGroup commutator_subgroup() const { return subgroup(commutator_set().indices()); }

  /// G/[G,G] in invariant-factor form, read off from the counts of cosets
  /// whose p^k-th power is trivial.
  AbelianGroup abelianization() const {
    ElementSet derived = commutator_set();
    const std::size_t quotient = order() / derived.size();
    std::vector<std::uint64_t> cyclic_orders;
    for (const auto& [p, e] : factorize(quotient)) {
      // omega[k] = log_p |{x in G/D : x^(p^k) = 1}|
      std::vector<std::uint64_t> omega{0};
      std::uint64_t pk = 1;
      while (omega.back() < e) {
        pk *= p;
        std::size_t count = 0;
        for (std::size_t a = 0; a < order(); ++a)
          if (derived.contains(pow(a, pk))) ++count;
        std::uint64_t cosets = count / derived.size(), lg = 0;
        while (cosets > 1) {
          cosets /= p;
          ++lg;
        }
        omega.push_back(lg);
      }
      // Factors of order at least p^k: omega[k] - omega[k-1].
      for (std::size_t k = 1; k < omega.size(); ++k) {
        std::uint64_t at_least_k = omega[k] - omega[k - 1];
        std::uint64_t at_least_next = k + 1 < omega.size() ? omega[k + 1] - omega[k] : 0;
        std::uint64_t q = 1;
        for (std::size_t i = 0; i < k; ++i) q *= p;
        for (std::uint64_t j = 0; j < at_least_k - at_least_next; ++j) cyclic_orders.push_back(q);
      }
    }
    return AbelianGroup::from_cyclic(cyclic_orders);
  }

  std::map<std::size_t, std::size_t> element_order_counts() const {
    std::map<std::size_t, std::size_t> out;
    for (std::size_t a = 0; a < order(); ++a) ++out[element_order(a)];
    return out;
  }

  /// Isomorphism invariant: order, abelianization, element-order
  /// statistics, center and derived-subgroup orders. Two groups with
  /// different labels are never isomorphic; equal labels are resolved by an
  /// explicit isomorphism search where needed.
  std::string label() const {
    std::call_once(data_->label_once, [this] { data_->label = compute_label(); });
    return data_->label;
  }

  std::string generators_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < generators().size(); ++i) os << (i ? ", " : "") << generators()[i].to_string();
    return os.str();
  }

 private:
  std::string compute_label() const {
    std::ostringstream os;
    os << order() << '|';
    const auto ab = abelianization().invariant_factors();
    if (ab.empty()) os << '1';
    for (std::size_t i = 0; i < ab.size(); ++i) os << (i ? "x" : "") << ab[i];
    os << '|';
    bool first = true;
    for (const auto& [o, c] : element_order_counts()) {
      os << (first ? "" : ",") << o << ':' << c;
      first = false;
    }
    os << "|z" << center_set().size() << "|d" << commutator_set().size();
    return os.str();
  }

  struct Data {
    std::size_t degree = 1;
    std::vector<Permutation> generators;
    std::vector<Permutation> elements;
    std::unordered_map<Permutation, std::size_t, PermutationHash> lookup;
    std::vector<Index> table;
    std::vector<Index> inverse;
    std::vector<std::size_t> element_order;
    mutable std::once_flag label_once;
    mutable std::string label;
  };

  explicit PermGroup(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

inline PermGroup group_from_generators(std::vector<Permutation> gens, std::size_t order_cap = kDefaultOrderCap) {
  return PermGroup::generate(std::move(gens), 1, order_cap);
}

}  // namespace pseudofree
