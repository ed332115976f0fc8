#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pseudofree/families.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/lattice.hpp"

namespace pseudofree {

struct CatalogEntry {
  std::string name;  // group-spec text that rebuilds the group
  PermGroup group;
};

namespace detail {
inline std::string perm_spec(const PermGroup& g) {
  std::string out = "perm: ";
  if (g.generators().empty()) return out + "()";
  for (std::size_t i = 0; i < g.generators().size(); ++i) out += (i ? ", " : "") + g.generators()[i].to_string();
  return out;
}
}  // namespace detail

/// Named-family constructions up to `max_order`, a few direct products, and
/// one representative of every conjugacy class of subgroups of S(5). This is
/// a test population, not a list of all isomorphism types.
inline std::vector<CatalogEntry> catalog(std::uint64_t max_order = 64, bool include_s5 = true) {
  std::vector<CatalogEntry> out;
  auto add = [&](const FamilySpec& spec) { out.push_back({spec.to_string(), named_group(spec)}); };

  for (std::uint64_t n = 1; n <= max_order; ++n) add({Family::Cyclic, {n}});
  for (std::uint64_t m = 4; m <= max_order; m += 2) add({Family::Dihedral, {m}});
  for (std::uint64_t m = 8; m <= max_order; m += 4) add({Family::Quaternion, {m}});
  for (std::uint64_t q = 2; q <= max_order; ++q) {
    if (!is_prime(q)) continue;
    for (std::uint64_t p = 2; p * q <= max_order; ++p)
      if (is_prime(p) && p != q)
        if (auto r = smallest_twist(p, q)) add({Family::Meta, {p, q, *r}});
  }
  for (std::uint64_t p : {2, 3, 5, 7}) {
    std::uint64_t size = p * p;
    for (std::uint64_t rank = 2; size <= max_order; ++rank, size *= p) add({Family::ElemAb, {p, rank}});
  }
  for (std::uint64_t n : {3, 4, 5}) {
    std::uint64_t order = 1;
    for (std::uint64_t i = 2; i <= n; ++i) order *= i;
    if (order / 2 <= max_order && n >= 4) add({Family::Alternating, {n}});
    if (order <= max_order) add({Family::Symmetric, {n}});
  }

  struct Product {
    FamilySpec left, right;
  };
  const std::vector<Product> products = {
      {{Family::Cyclic, {2}}, {Family::Cyclic, {4}}},      {{Family::Cyclic, {2}}, {Family::Cyclic, {6}}},
      {{Family::Cyclic, {4}}, {Family::Cyclic, {4}}},      {{Family::Cyclic, {3}}, {Family::Cyclic, {6}}},
      {{Family::Cyclic, {2}}, {Family::Quaternion, {8}}},  {{Family::Cyclic, {3}}, {Family::Quaternion, {8}}},
      {{Family::Cyclic, {5}}, {Family::Quaternion, {8}}},  {{Family::Cyclic, {7}}, {Family::Quaternion, {8}}},
      {{Family::Cyclic, {3}}, {Family::Quaternion, {16}}}, {{Family::Cyclic, {2}}, {Family::Dihedral, {8}}},
      {{Family::Cyclic, {3}}, {Family::Symmetric, {3}}},   {{Family::Cyclic, {5}}, {Family::Symmetric, {3}}},
      {{Family::Symmetric, {3}}, {Family::Symmetric, {3}}}, {{Family::Cyclic, {2}}, {Family::Alternating, {4}}},
      {{Family::Cyclic, {3}}, {Family::Meta, {5, 2, 4}}},  {{Family::Cyclic, {5}}, {Family::Quaternion, {12}}},
  };
  for (const auto& [l, r] : products) {
    PermGroup g = direct_product(named_group(l), named_group(r));
    if (g.order() <= max_order) out.push_back({l.to_string() + " x " + r.to_string(), g});
  }

  if (include_s5) {
    SubgroupLattice lat(named_group({Family::Symmetric, {5}}));
    for (const auto& cls : lat.conjugacy_classes()) {
      PermGroup h = lat.as_group(cls.front());
      out.push_back({detail::perm_spec(h), h});
    }
  }
  return out;
}

}  // namespace pseudofree
