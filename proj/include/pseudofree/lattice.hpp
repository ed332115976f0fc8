#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/rational.hpp>

#include "pseudofree/abelian.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/group.hpp"

namespace pseudofree {

struct Subgroup {
  ElementSet elements;
  std::vector<std::size_t> generators;  // element indices in the parent
  std::size_t order = 0;
  std::string label;
};

/// Every subgroup of a finite group, sorted by (order, label, element set),
/// with inclusion, conjugacy classes and the maximal subgroups.
class SubgroupLattice {
 public:
  explicit SubgroupLattice(PermGroup group) : group_(std::move(group)) { build(); }

  const PermGroup& group() const noexcept { return group_; }
  const std::vector<Subgroup>& subgroups() const noexcept { return subgroups_; }
  const Subgroup& operator[](std::size_t i) const { return subgroups_[i]; }
  std::size_t size() const noexcept { return subgroups_.size(); }

  std::size_t trivial() const noexcept { return 0; }
  std::size_t whole() const noexcept { return subgroups_.size() - 1; }

  /// Subgroup i is contained in subgroup j.
  bool includes(std::size_t j, std::size_t i) const {
    return subgroups_[i].order <= subgroups_[j].order &&
           subgroups_[j].order % subgroups_[i].order == 0 &&
           subgroups_[i].elements.is_subset_of(subgroups_[j].elements);
  }

  const std::vector<std::vector<std::size_t>>& conjugacy_classes() const noexcept { return classes_; }
  std::size_t class_of(std::size_t i) const { return class_of_[i]; }
  bool is_normal(std::size_t i) const { return classes_[class_of_[i]].size() == 1; }
  const std::vector<std::size_t>& maximal() const noexcept { return maximal_; }

  std::optional<std::size_t> index_of(const ElementSet& s) const {
    auto it = lookup_.find(s);
    if (it == lookup_.end()) return std::nullopt;
    return it->second;
  }

  PermGroup as_group(std::size_t i) const { return group_.subgroup(subgroups_[i].generators); }

  bool is_abelian(std::size_t i) const {
    const auto& gens = subgroups_[i].generators;
    for (std::size_t a : gens)
      for (std::size_t b : gens)
        if (group_.mul(a, b) != group_.mul(b, a)) return false;
    return true;
  }

  bool is_cyclic(std::size_t i) const {
    for (std::size_t x : subgroups_[i].elements.indices())
      if (group_.element_order(x) == subgroups_[i].order) return true;
    return false;
  }

  /// Abelian of order p^r with every nontrivial element of order p.
  bool is_elementary_abelian(std::size_t i, std::uint64_t p) const {
    if (!is_abelian(i)) return false;
    for (std::size_t x : subgroups_[i].elements.indices())
      if (x != 0 && group_.element_order(x) != p) return false;
    return true;
  }

 private:
  void build() {
    const PermGroup& g = group_;
    std::unordered_map<ElementSet, std::size_t, ElementSetHash> seen;
    std::vector<Subgroup> found;
    auto add = [&](ElementSet s, std::vector<std::size_t> gens) {
      auto [it, fresh] = seen.emplace(s, found.size());
      if (fresh) {
        Subgroup sub;
        sub.order = s.size();
        sub.elements = std::move(s);
        sub.generators = std::move(gens);
        found.push_back(std::move(sub));
      }
      return fresh;
    };

    add(g.closure({}), {});
    std::vector<std::size_t> cyclic;  // indices into `found`
    for (std::size_t a = 1; a < g.order(); ++a) {
      ElementSet s = g.closure({a});
      if (add(s, {a})) cyclic.push_back(found.size() - 1);
    }
    // Join closure: every subgroup is generated by cyclic subgroups.
    for (std::size_t i = 0; i < found.size(); ++i) {
      for (std::size_t c : cyclic) {
        const std::size_t gen = found[c].generators.front();
        if (found[i].elements.contains(gen)) continue;
        auto gens = found[i].generators;
        gens.push_back(gen);
        ElementSet joined = g.closure(gens);
        add(std::move(joined), std::move(gens));
      }
    }

    for (auto& sub : found) sub.label = g.subgroup(sub.generators).label();
    std::sort(found.begin(), found.end(), [](const Subgroup& a, const Subgroup& b) {
      if (a.order != b.order) return a.order < b.order;
      if (a.label != b.label) return a.label < b.label;
      return a.elements.lex_less(b.elements);
    });
    subgroups_ = std::move(found);
    for (std::size_t i = 0; i < subgroups_.size(); ++i) lookup_.emplace(subgroups_[i].elements, i);

    const std::size_t n = subgroups_.size();
    class_of_.assign(n, n);
    const bool abelian = g.is_abelian();
    for (std::size_t i = 0; i < n; ++i) {
      if (class_of_[i] != n) continue;
      const std::size_t cls = classes_.size();
      classes_.push_back({i});
      class_of_[i] = cls;
      if (abelian) continue;
      const auto members = subgroups_[i].elements.indices();
      for (std::size_t x = 1; x < g.order(); ++x) {
        ElementSet conj(g.order());
        for (std::size_t h : members) conj.insert(g.conjugate(x, h));
        std::size_t j = lookup_.at(conj);
        if (class_of_[j] == n) {
          class_of_[j] = cls;
          classes_[cls].push_back(j);
        }
      }
      std::sort(classes_[cls].begin(), classes_[cls].end());
    }

    for (std::size_t i = 0; i + 1 < n; ++i) {
      bool is_max = true;
      for (std::size_t j = i + 1; j + 1 < n && is_max; ++j)
        if (subgroups_[j].order > subgroups_[i].order && includes(j, i)) is_max = false;
      if (is_max) maximal_.push_back(i);
    }
  }

  PermGroup group_;
  std::vector<Subgroup> subgroups_;
  std::unordered_map<ElementSet, std::size_t, ElementSetHash> lookup_;
  std::vector<std::vector<std::size_t>> classes_;
  std::vector<std::size_t> class_of_;
  std::vector<std::size_t> maximal_;
};

inline SubgroupLattice all_subgroups(const PermGroup& g) { return SubgroupLattice(g); }

inline bool is_cyclic(const PermGroup& g) { return g.is_cyclic(); }
inline AbelianGroup abelianization(const PermGroup& g) { return g.abelianization(); }
inline PermGroup center(const PermGroup& g) { return g.center(); }
inline PermGroup commutator_subgroup(const PermGroup& g) { return g.commutator_subgroup(); }

/// Periodic cohomology criterion: every abelian subgroup is cyclic.
inline bool has_periodic_cohomology(const SubgroupLattice& lat) {
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (lat.is_abelian(i) && !lat.is_cyclic(i)) return false;
  return true;
}
inline bool has_periodic_cohomology(const PermGroup& g) { return has_periodic_cohomology(SubgroupLattice(g)); }

/// Largest r such that (C_p)^r embeds in the group.
inline std::size_t p_rank(const SubgroupLattice& lat, std::uint64_t p) {
  if (!is_prime(p)) fail(ErrorKind::InvalidParameters, std::to_string(p) + " is not prime");
  std::size_t best = 0;
  for (std::size_t i = 1; i < lat.size(); ++i) {
    if (!lat.is_elementary_abelian(i, p)) continue;
    std::size_t r = 0;
    for (std::size_t o = lat[i].order; o > 1; o /= p) ++r;
    best = std::max(best, r);
  }
  return best;
}
inline std::size_t p_rank(const PermGroup& g, std::uint64_t p) { return p_rank(SubgroupLattice(g), p); }

/// The involutions of the subgroup: unique and contained in every nontrivial
/// subgroup of it for generalized quaternion 2-groups.
inline bool is_generalized_quaternion(const SubgroupLattice& lat, std::size_t i) {
  const auto& sub = lat[i];
  if (sub.order < 8 || (sub.order & (sub.order - 1)) != 0) return false;
  std::optional<std::size_t> involution;
  for (std::size_t x : sub.elements.indices()) {
    if (lat.group().element_order(x) != 2) continue;
    if (involution) return false;
    involution = x;
  }
  if (!involution || lat.is_cyclic(i)) return false;
  for (std::size_t j = 1; j < lat.size(); ++j)
    if (lat.includes(i, j) && !lat[j].elements.contains(*involution)) return false;
  return true;
}

enum class ForbiddenKind { NonabelianMetacyclicPQ, ElemAbelianRank2, GeneralizedQuaternion };

inline const char* to_string(ForbiddenKind k) {
  switch (k) {
    case ForbiddenKind::NonabelianMetacyclicPQ: return "NonabelianMetacyclicPQ";
    case ForbiddenKind::ElemAbelianRank2: return "ElemAbelianRank2";
    case ForbiddenKind::GeneralizedQuaternion: return "GeneralizedQuaternion";
  }
  return "?";
}

struct ForbiddenSubgroup {
  ForbiddenKind kind;
  std::size_t subgroup;  // lattice index
  std::uint64_t p = 0;   // the prime of C_p x C_p, or the normal C_p of a pq group
  std::uint64_t q = 0;   // quotient prime of a pq group
};

/// Smallest forbidden subgroup in lattice order, or nothing.
inline std::optional<ForbiddenSubgroup> find_forbidden_subgroup(const SubgroupLattice& lat) {
  for (std::size_t i = 1; i < lat.size(); ++i) {
    const std::size_t n = lat[i].order;
    auto f = factorize(n);
    if (f.size() == 2 && f.begin()->second == 1 && f.rbegin()->second == 1 && !lat.is_abelian(i)) {
      // In a nonabelian group of order pq the normal Sylow is for the larger prime.
      return ForbiddenSubgroup{ForbiddenKind::NonabelianMetacyclicPQ, i, f.rbegin()->first, f.begin()->first};
    }
    if (f.size() == 1 && f.begin()->second == 2 && lat.is_elementary_abelian(i, f.begin()->first) &&
        !lat.is_cyclic(i))
      return ForbiddenSubgroup{ForbiddenKind::ElemAbelianRank2, i, f.begin()->first, 0};
    if (is_generalized_quaternion(lat, i)) return ForbiddenSubgroup{ForbiddenKind::GeneralizedQuaternion, i, 2, 0};
  }
  return std::nullopt;
}

enum class DichotomyKind { NormalMaximal, IntersectingPair };

struct DichotomyResult {
  DichotomyKind kind;
  std::size_t first = 0;   // the normal maximal subgroup, or the first of the pair
  std::size_t second = 0;  // second of the pair
  std::size_t witness = 0; // shared nontrivial element of the pair
};

/// Either a normal maximal subgroup (largest first) or two distinct maximal
/// subgroups sharing a nontrivial element. One of the two always exists.
inline DichotomyResult maximal_dichotomy(const SubgroupLattice& lat) {
  if (lat.group().order() == 1) fail(ErrorKind::InvalidParameters, "the trivial group has no maximal subgroups");
  const auto& maxes = lat.maximal();
  // maxes ascend by (order, label): the first normal one seen at the top
  // order wins.
  std::optional<std::size_t> best;
  for (std::size_t m : maxes)
    if (lat.is_normal(m) && (!best || lat[m].order > lat[*best].order)) best = m;
  if (best) return {DichotomyKind::NormalMaximal, *best, 0, 0};
  for (std::size_t a = 0; a < maxes.size(); ++a)
    for (std::size_t b = a + 1; b < maxes.size(); ++b) {
      auto common = lat[maxes[a]].elements.intersect(lat[maxes[b]].elements).indices();
      if (common.size() > 1) return {DichotomyKind::IntersectingPair, maxes[a], maxes[b], common[1]};
    }
  fail(ErrorKind::InternalContradiction,
       "no normal maximal subgroup and no intersecting maximal pair in group " + lat.group().label());
}
inline DichotomyResult maximal_dichotomy(const PermGroup& g) { return maximal_dichotomy(SubgroupLattice(g)); }

enum class CountingStatus { NotApplicable, Evaluated, HypothesisHolds };

inline const char* to_string(CountingStatus s) {
  switch (s) {
    case CountingStatus::NotApplicable: return "NotApplicable";
    case CountingStatus::Evaluated: return "Evaluated";
    case CountingStatus::HypothesisHolds: return "HypothesisHolds";
  }
  return "?";
}

using Rational = boost::rational<std::int64_t>;

struct CountingReport {
  CountingStatus status = CountingStatus::NotApplicable;
  std::string reason;
  std::vector<std::size_t> class_orders;  // m_i, one per conjugacy class of maximal subgroups
  Rational lhs{0};
  Rational rhs{0};
  bool contradiction = false;
};

/// Element-count identity 1 - 1/|G| = sum_i (1 - 1/m_i) over conjugacy classes
/// of maximal subgroups, evaluated when maximal subgroups pairwise meet
/// trivially and at least one is not normal. HypothesisHolds flags a group
/// where additionally none is normal; the identity must then still fail.
inline CountingReport dichotomy_counting_check(const SubgroupLattice& lat) {
  CountingReport rep;
  const auto& maxes = lat.maximal();
  const std::int64_t n = static_cast<std::int64_t>(lat.group().order());
  if (n == 1) {
    rep.reason = "trivial group";
    return rep;
  }
  for (std::size_t a = 0; a < maxes.size(); ++a)
    for (std::size_t b = a + 1; b < maxes.size(); ++b)
      if (lat[maxes[a]].elements.intersect(lat[maxes[b]].elements).size() > 1) {
        rep.reason = "two maximal subgroups intersect nontrivially";
        return rep;
      }
  std::size_t normal = 0;
  std::vector<std::size_t> classes;
  for (std::size_t m : maxes) {
    if (lat.is_normal(m)) ++normal;
    std::size_t c = lat.class_of(m);
    if (std::find(classes.begin(), classes.end(), c) == classes.end()) {
      classes.push_back(c);
      rep.class_orders.push_back(lat[m].order);
    }
  }
  if (normal == maxes.size()) {
    rep.reason = "every maximal subgroup is normal";
    return rep;
  }
  rep.status = normal == 0 ? CountingStatus::HypothesisHolds : CountingStatus::Evaluated;
  rep.lhs = Rational(1) - Rational(1, n);
  for (std::size_t m : rep.class_orders) rep.rhs += Rational(1) - Rational(1, static_cast<std::int64_t>(m));
  // With r = 1 the identity forces m_1 = |G|; otherwise RHS >= 1 > LHS.
  if (rep.class_orders.size() == 1)
    rep.contradiction = rep.class_orders.front() != lat.group().order() && rep.lhs != rep.rhs;
  else
    rep.contradiction = rep.rhs >= Rational(1) && rep.lhs < Rational(1);
  return rep;
}
inline CountingReport dichotomy_counting_check(const PermGroup& g) {
  return dichotomy_counting_check(SubgroupLattice(g));
}

/// 1 -> C_k -> G -> C_q -> 1 with b a b^-1 = a^r and b^q = a^s.
struct ExtensionShape {
  std::uint64_t k = 0;
  std::uint64_t q = 0;
  std::uint64_t r = 0;
  std::uint64_t s = 0;
  bool operator==(const ExtensionShape&) const = default;
};

namespace detail {
inline std::optional<std::uint64_t> discrete_log(const PermGroup& g, std::size_t base, std::size_t target) {
  std::size_t x = 0;
  for (std::uint64_t e = 0; e < g.element_order(base); ++e) {
    if (x == target) return e;
    x = g.mul(x, base);
  }
  return std::nullopt;
}
}  // namespace detail

/// Uses the largest normal cyclic maximal subgroup of prime index; among
/// complements prefers the smallest s, so split extensions report s = 0.
inline std::optional<ExtensionShape> metacyclic_shape(const SubgroupLattice& lat) {
  const PermGroup& g = lat.group();
  if (g.order() == 1) return std::nullopt;
  const auto& maxes = lat.maximal();
  std::optional<std::size_t> chosen;
  for (std::size_t m : maxes) {
    if (!lat.is_normal(m) || !lat.is_cyclic(m) || !is_prime(g.order() / lat[m].order)) continue;
    if (!chosen || lat[m].order > lat[*chosen].order) chosen = m;
  }
  if (!chosen) return std::nullopt;
  const auto& h = lat[*chosen];
  ExtensionShape shape;
  shape.k = h.order;
  shape.q = g.order() / h.order;
  std::size_t a = 0;
  for (std::size_t x : h.elements.indices())
    if (g.element_order(x) == h.order) {
      a = x;
      break;
    }
  std::optional<std::size_t> best_b;
  for (std::size_t b = 1; b < g.order(); ++b) {
    if (h.elements.contains(b)) continue;
    auto s = detail::discrete_log(g, a, g.pow(b, shape.q));
    if (!s) fail(ErrorKind::InternalContradiction, "b^q escaped the normal subgroup");
    if (!best_b || *s < shape.s) {
      best_b = b;
      shape.s = *s;
    }
  }
  auto r = detail::discrete_log(g, a, g.conjugate(*best_b, a));
  if (!r) fail(ErrorKind::InternalContradiction, "conjugation does not preserve the normal subgroup");
  shape.r = h.order == 1 ? 1 : *r;
  return shape;
}
inline std::optional<ExtensionShape> metacyclic_shape(const PermGroup& g) { return metacyclic_shape(SubgroupLattice(g)); }

/// Brute-force isomorphism test by searching generator images.
inline bool isomorphic(const PermGroup& g, const PermGroup& h) {
  if (g.order() != h.order() || g.label() != h.label()) return false;
  if (g.order() == 1) return true;
  // Greedy generating set: repeatedly add an element of largest order
  // outside the current subgroup.
  std::vector<std::size_t> gens;
  ElementSet current = g.closure({});
  while (current.size() < g.order()) {
    std::size_t pick = 0;
    for (std::size_t x = 1; x < g.order(); ++x)
      if (!current.contains(x) && (pick == 0 || g.element_order(x) > g.element_order(pick))) pick = x;
    gens.push_back(pick);
    current = g.closure(gens);
  }

  std::vector<std::size_t> images(gens.size());
  const std::size_t none = g.order();
  // Extends the map over <gens[0..t)>; false on inconsistency.
  auto consistent = [&](std::size_t t, std::vector<std::size_t>& phi) {
    phi.assign(g.order(), none);
    phi[0] = 0;
    std::vector<std::size_t> queue{0};
    for (std::size_t i = 0; i < queue.size(); ++i) {
      std::size_t x = queue[i];
      for (std::size_t s = 0; s < t; ++s) {
        std::size_t y = g.mul(x, gens[s]);
        std::size_t img = h.mul(phi[x], images[s]);
        if (phi[y] == none) {
          phi[y] = img;
          queue.push_back(y);
        } else if (phi[y] != img) {
          return false;
        }
      }
    }
    std::vector<bool> hit(h.order(), false);
    for (std::size_t x : queue) {
      if (hit[phi[x]]) return false;
      hit[phi[x]] = true;
    }
    return true;
  };

  std::vector<std::size_t> phi;
  auto search = [&](auto&& self, std::size_t t) -> bool {
    if (t == gens.size()) return true;
    for (std::size_t y = 1; y < h.order(); ++y) {
      if (h.element_order(y) != g.element_order(gens[t])) continue;
      images[t] = y;
      if (consistent(t + 1, phi) && self(self, t + 1)) return true;
    }
    return false;
  };
  return search(search, 0);
}

/// Assigns each isomorphism class a stable key: the invariant label, plus
/// "#k" when k earlier non-isomorphic groups shared that label. Only groups
/// of order <= 64 are separated by explicit isomorphism search.
class IsomorphismRegistry {
 public:
  static constexpr std::size_t kSearchLimit = 64;

  std::optional<std::string> key(const PermGroup& g) {
    const std::string label = g.label();
    if (g.order() > kSearchLimit) return std::nullopt;
    std::lock_guard lock(mutex_);
    auto& reps = classes_[label];
    for (std::size_t i = 0; i < reps.size(); ++i)
      if (isomorphic(g, reps[i]))
        return i == 0 ? label : label + "#" + std::to_string(i);
    reps.push_back(g);
    return reps.size() == 1 ? label : label + "#" + std::to_string(reps.size() - 1);
  }

 private:
  std::mutex mutex_;
  std::map<std::string, std::vector<PermGroup>> classes_;
};

/// Short human-readable name by recognized family, else "G<order>".
inline std::string describe(const SubgroupLattice& lat) {
  const PermGroup& g = lat.group();
  const std::size_t n = g.order();
  if (g.is_cyclic()) return "C(" + std::to_string(n) + ")";
  if (g.is_abelian()) {
    auto f = factorize(n);
    const auto ab = g.abelianization().invariant_factors();
    if (f.size() == 1 && std::all_of(ab.begin(), ab.end(), [&](auto d) { return d == f.begin()->first; }))
      return "ElemAb(" + std::to_string(f.begin()->first) + "," + std::to_string(ab.size()) + ")";
    std::string out;
    for (std::size_t i = 0; i < ab.size(); ++i) out += (i ? " x C(" : "C(") + std::to_string(ab[i]) + ")";
    return out;
  }
  if (is_generalized_quaternion(lat, lat.whole())) return "Q(" + std::to_string(n) + ")";
  auto f = factorize(n);
  if (f.size() == 2 && f.begin()->second == 1 && f.rbegin()->second == 1) {
    if (auto shape = metacyclic_shape(lat))
      return "Meta(" + std::to_string(shape->k) + "," + std::to_string(shape->q) + "," + std::to_string(shape->r) + ")";
  }
  if (n % 2 == 0 && n >= 6) {
    // Dihedral: a cyclic subgroup of index 2 and only involutions outside it.
    for (std::size_t m : lat.maximal()) {
      if (lat[m].order * 2 != n || !lat.is_cyclic(m)) continue;
      bool dihedral = true;
      for (std::size_t x = 1; x < n && dihedral; ++x)
        if (!lat[m].elements.contains(x) && g.element_order(x) != 2) dihedral = false;
      if (dihedral) return "D(" + std::to_string(n) + ")";
    }
  }
  return "G" + std::to_string(n) + "[" + g.label() + "]";
}

}  // namespace pseudofree
