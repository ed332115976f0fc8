#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "pseudofree/catalog.hpp"
#include "pseudofree/families.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/lattice.hpp"

using namespace pseudofree;

namespace {

Permutation cyc(std::size_t n, std::vector<std::vector<Point>> one_based) {
  for (auto& c : one_based)
    for (auto& x : c) --x;
  return Permutation::from_cycles(n, one_based);
}

// Oracle: count subsets of the element list closed under products, working
// on the permutations directly rather than the Cayley table.
std::size_t brute_force_subgroup_count(const PermGroup& g) {
  const auto& elems = g.elements();
  const std::size_t n = elems.size();
  REQUIRE(n <= 12);
  std::size_t count = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (!(mask & 1u)) continue;  // identity is element 0
    std::set<Permutation> members;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) members.insert(elems[i]);
    bool closed = true;
    for (const auto& a : members)
      for (const auto& b : members)
        if (!members.count(a * b)) closed = false;
    if (closed) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("group_from_generators builds closures", "[group]") {
  auto c6 = group_from_generators({cyc(6, {{1, 2, 3, 4, 5, 6}})});
  CHECK(c6.order() == 6);
  CHECK(c6.is_cyclic());

  auto s3 = group_from_generators({cyc(3, {{1, 2, 3}}), cyc(3, {{1, 2}})});
  CHECK(s3.order() == 6);
  CHECK_FALSE(s3.is_abelian());

  auto trivial = group_from_generators({});
  CHECK(trivial.order() == 1);
  CHECK(trivial.is_cyclic());
}

TEST_CASE("identity is element 0 and the table is associative", "[group]") {
  auto g = named_group({Family::Symmetric, {4}});
  REQUIRE(g.element(0).is_identity());
  for (std::size_t a = 0; a < g.order(); a += 5)
    for (std::size_t b = 0; b < g.order(); b += 3) {
      CHECK(g.element(g.mul(a, b)) == g.element(a) * g.element(b));
      for (std::size_t c = 0; c < g.order(); c += 7) CHECK(g.mul(g.mul(a, b), c) == g.mul(a, g.mul(b, c)));
    }
  for (std::size_t a = 0; a < g.order(); ++a) CHECK(g.mul(a, g.inv(a)) == 0);
}

TEST_CASE("generation errors", "[group]") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), Error);
  CHECK_THROWS_AS(group_from_generators({cyc(3, {{1, 2}}), cyc(4, {{1, 2}})}), Error);
  try {
    named_group({Family::Symmetric, {7}});
    FAIL("expected the order cap to trip");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrderCapExceeded);
  }
}

TEST_CASE("named families", "[group]") {
  auto meta = named_group({Family::Meta, {3, 2, 2}});
  CHECK(meta.order() == 6);
  CHECK_FALSE(meta.is_abelian());
  CHECK(meta.degree() == 5);

  auto v4 = named_group({Family::ElemAb, {2, 2}});
  CHECK(v4.order() == 4);
  CHECK_FALSE(v4.is_cyclic());

  // Exhaustive scan: Q(8) has exactly one element of order 2.
  auto q8 = named_group({Family::Quaternion, {8}});
  CHECK(q8.order() == 8);
  std::size_t involutions = 0;
  for (const auto& p : q8.elements())
    if (!p.is_identity() && (p * p).is_identity()) ++involutions;
  CHECK(involutions == 1);

  CHECK(named_group({Family::Quaternion, {12}}).order() == 12);
  CHECK(named_group({Family::Dihedral, {10}}).order() == 10);
  CHECK(named_group({Family::Dihedral, {4}}).order() == 4);
  CHECK(named_group({Family::Alternating, {5}}).order() == 60);

  try {
    named_group({Family::Meta, {5, 3, 2}});
    FAIL("Meta(5,3,r) must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidParameters);
  }
  CHECK_THROWS_AS(named_group({Family::Meta, {7, 3, 3}}), Error);
  CHECK_THROWS_AS(named_group({Family::Meta, {4, 2, 3}}), Error);
}

TEST_CASE("all_subgroups matches brute-force closure", "[lattice]") {
  auto c6 = named_group({Family::Cyclic, {6}});
  auto lat = all_subgroups(c6);
  REQUIRE(lat.size() == 4);
  std::vector<std::size_t> orders;
  for (const auto& s : lat.subgroups()) orders.push_back(s.order);
  CHECK(orders == std::vector<std::size_t>{1, 2, 3, 6});

  auto s3 = named_group({Family::Symmetric, {3}});
  CHECK(all_subgroups(s3).size() == 6);
  CHECK(brute_force_subgroup_count(s3) == 6);

  auto q8 = named_group({Family::Quaternion, {8}});
  auto ql = all_subgroups(q8);
  CHECK(ql.size() == 6);
  CHECK(brute_force_subgroup_count(q8) == 6);
  std::size_t c4 = 0;
  for (const auto& s : ql.subgroups()) c4 += s.order == 4;
  CHECK(c4 == 3);

  for (const auto& spec : std::vector<FamilySpec>{{Family::Dihedral, {8}}, {Family::Alternating, {4}},
                                                  {Family::Dihedral, {12}}, {Family::Quaternion, {12}}}) {
    auto g = named_group(spec);
    CHECK(all_subgroups(g).size() == brute_force_subgroup_count(g));
  }
  CHECK(all_subgroups(named_group({Family::Symmetric, {4}})).size() == 30);
  CHECK(all_subgroups(named_group({Family::Symmetric, {5}})).size() == 156);
  CHECK(all_subgroups(named_group({Family::Symmetric, {5}})).conjugacy_classes().size() == 19);
}

TEST_CASE("abelianization and commutators", "[group]") {
  auto q8 = named_group({Family::Quaternion, {8}});
  CHECK(q8.abelianization().invariant_factors() == std::vector<std::uint64_t>{2, 2});

  // Oracle: commutator closure on raw permutations, then the quotient order.
  std::set<Permutation> derived{Permutation::identity(q8.degree())};
  for (const auto& a : q8.elements())
    for (const auto& b : q8.elements()) derived.insert(a.inverse() * b.inverse() * a * b);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& a : std::set<Permutation>(derived))
      for (const auto& b : std::set<Permutation>(derived)) grew |= derived.insert(a * b).second;
  }
  CHECK(q8.order() / derived.size() == 4);
  CHECK(q8.commutator_subgroup().order() == derived.size());

  CHECK(named_group({Family::Cyclic, {6}}).abelianization().invariant_factors() == std::vector<std::uint64_t>{6});
  auto meta = named_group({Family::Meta, {3, 2, 2}});
  auto comm = meta.commutator_subgroup();
  CHECK(comm.order() == 3);
  CHECK(comm.is_cyclic());
  CHECK(named_group({Family::Dihedral, {8}}).center().order() == 2);

  auto c2c4 = direct_product(named_group({Family::Cyclic, {2}}), named_group({Family::Cyclic, {4}}));
  CHECK(c2c4.abelianization().invariant_factors() == std::vector<std::uint64_t>{2, 4});
  auto c2c6 = direct_product(named_group({Family::Cyclic, {2}}), named_group({Family::Cyclic, {6}}));
  CHECK(c2c6.abelianization().invariant_factors() == std::vector<std::uint64_t>{2, 6});
}

TEST_CASE("periodicity and p-rank", "[lattice]") {
  CHECK(has_periodic_cohomology(named_group({Family::Quaternion, {8}})));
  CHECK_FALSE(has_periodic_cohomology(named_group({Family::ElemAb, {2, 2}})));
  CHECK(has_periodic_cohomology(named_group({Family::Cyclic, {12}})));

  CHECK(p_rank(named_group({Family::Alternating, {4}}), 2) == 2);
  CHECK(p_rank(named_group({Family::Quaternion, {8}}), 2) == 1);
  CHECK(p_rank(named_group({Family::Cyclic, {6}}), 5) == 0);
  CHECK(p_rank(named_group({Family::ElemAb, {3, 3}}), 3) == 3);
}

TEST_CASE("find_forbidden_subgroup", "[lattice]") {
  auto a4 = all_subgroups(named_group({Family::Alternating, {4}}));
  auto f = find_forbidden_subgroup(a4);
  REQUIRE(f);
  CHECK(f->kind == ForbiddenKind::ElemAbelianRank2);
  CHECK(f->p == 2);
  CHECK(a4[f->subgroup].order == 4);

  auto meta = all_subgroups(named_group({Family::Meta, {7, 3, 2}}));
  f = find_forbidden_subgroup(meta);
  REQUIRE(f);
  CHECK(f->kind == ForbiddenKind::NonabelianMetacyclicPQ);
  CHECK(f->subgroup == meta.whole());
  CHECK(f->p == 7);
  CHECK(f->q == 3);

  auto q8 = all_subgroups(named_group({Family::Quaternion, {8}}));
  f = find_forbidden_subgroup(q8);
  REQUIRE(f);
  CHECK(f->kind == ForbiddenKind::GeneralizedQuaternion);

  CHECK_FALSE(find_forbidden_subgroup(all_subgroups(named_group({Family::Cyclic, {15}}))));
}

TEST_CASE("maximal_dichotomy", "[lattice]") {
  auto d10 = all_subgroups(named_group({Family::Dihedral, {10}}));
  auto r = maximal_dichotomy(d10);
  CHECK(r.kind == DichotomyKind::NormalMaximal);
  CHECK(d10[r.first].order == 5);

  auto q8 = all_subgroups(named_group({Family::Quaternion, {8}}));
  r = maximal_dichotomy(q8);
  // Every maximal subgroup of Q8 is normal, so the normal alternative wins;
  // the intersecting pair still exists and is checked below.
  CHECK(r.kind == DichotomyKind::NormalMaximal);
  CHECK(q8[r.first].order == 4);

  auto c7 = all_subgroups(named_group({Family::Cyclic, {7}}));
  r = maximal_dichotomy(c7);
  CHECK(r.kind == DichotomyKind::NormalMaximal);
  CHECK(r.first == c7.trivial());

  auto a5 = all_subgroups(named_group({Family::Alternating, {5}}));
  r = maximal_dichotomy(a5);
  REQUIRE(r.kind == DichotomyKind::IntersectingPair);
  CHECK(r.first != r.second);
  CHECK(r.witness != 0);
  CHECK(a5[r.first].elements.contains(r.witness));
  CHECK(a5[r.second].elements.contains(r.witness));

  CHECK_THROWS_AS(maximal_dichotomy(named_group({Family::Cyclic, {1}})), Error);
}

TEST_CASE("dichotomy_counting_check", "[lattice]") {
  auto s3 = dichotomy_counting_check(named_group({Family::Symmetric, {3}}));
  CHECK(s3.status == CountingStatus::Evaluated);
  CHECK(s3.lhs == Rational(5, 6));
  CHECK(s3.rhs == Rational(7, 6));
  CHECK(s3.contradiction);

  CHECK(dichotomy_counting_check(named_group({Family::Cyclic, {4}})).status == CountingStatus::NotApplicable);
  CHECK(dichotomy_counting_check(named_group({Family::Quaternion, {8}})).status == CountingStatus::NotApplicable);
}

TEST_CASE("metacyclic_shape", "[lattice]") {
  auto shape = metacyclic_shape(named_group({Family::Meta, {3, 2, 2}}));
  REQUIRE(shape);
  CHECK(*shape == ExtensionShape{3, 2, 2, 0});

  shape = metacyclic_shape(named_group({Family::Cyclic, {6}}));
  REQUIRE(shape);
  CHECK(shape->r == 1);
  CHECK(shape->k * shape->q == 6);

  CHECK_FALSE(metacyclic_shape(named_group({Family::Alternating, {4}})));

  shape = metacyclic_shape(named_group({Family::Quaternion, {8}}));
  REQUIRE(shape);
  CHECK(*shape == ExtensionShape{4, 2, 3, 2});

  // Dicyclic group of order 12 is a non-split extension of C_6 by C_2.
  shape = metacyclic_shape(named_group({Family::Quaternion, {12}}));
  REQUIRE(shape);
  CHECK(shape->k == 6);
  CHECK(shape->s == 3);
}

TEST_CASE("metacyclic_shape round trip", "[lattice][property]") {
  for (std::uint64_t p : {3, 5, 7, 11, 13, 19, 31})
    for (std::uint64_t q : {2, 3, 5}) {
      if ((p - 1) % q) continue;
      for (std::uint64_t r = 2; r < p; ++r) {
        if (pow_mod(r, q, p) != 1) continue;
        auto shape = metacyclic_shape(named_group({Family::Meta, {p, q, r}}));
        REQUIRE(shape);
        CHECK(shape->k == p);
        CHECK(shape->q == q);
        CHECK(shape->s == 0);
        std::set<std::uint64_t> from_r, from_shape;
        for (std::uint64_t e = 0; e < q; ++e) {
          from_r.insert(pow_mod(r, e, p));
          from_shape.insert(pow_mod(shape->r, e, p));
        }
        CHECK(from_r == from_shape);
      }
    }
}

TEST_CASE("isomorphism search", "[lattice]") {
  auto d6 = named_group({Family::Dihedral, {6}});
  auto s3 = named_group({Family::Symmetric, {3}});
  auto meta = named_group({Family::Meta, {3, 2, 2}});
  CHECK(isomorphic(d6, s3));
  CHECK(isomorphic(meta, s3));
  CHECK_FALSE(isomorphic(named_group({Family::Cyclic, {6}}), s3));
  CHECK(isomorphic(named_group({Family::Dihedral, {4}}), named_group({Family::ElemAb, {2, 2}})));
  CHECK_FALSE(isomorphic(named_group({Family::Dihedral, {8}}), named_group({Family::Quaternion, {8}})));

  IsomorphismRegistry reg;
  CHECK(reg.key(d6) == reg.key(s3));
  CHECK(reg.key(d6) != reg.key(named_group({Family::Cyclic, {6}})));
}

TEST_CASE("describe recognizes families", "[lattice]") {
  CHECK(describe(all_subgroups(named_group({Family::ElemAb, {2, 2}}))) == "ElemAb(2,2)");
  CHECK(describe(all_subgroups(named_group({Family::Quaternion, {8}}))) == "Q(8)");
  CHECK(describe(all_subgroups(named_group({Family::Cyclic, {5}}))) == "C(5)");
  CHECK(describe(all_subgroups(named_group({Family::Dihedral, {8}}))) == "D(8)");
  CHECK(describe(all_subgroups(named_group({Family::Meta, {7, 3, 2}}))).rfind("Meta(7,3,", 0) == 0);
}

TEST_CASE("catalog-wide lattice invariants", "[lattice][property]") {
  auto cat = catalog();
  REQUIRE(cat.size() >= 100);
  std::size_t hypothesis_holds = 0;
  for (const auto& entry : cat) {
    INFO(entry.name);
    const auto& g = entry.group;
    SubgroupLattice lat(g);
    for (const auto& s : lat.subgroups()) CHECK(g.order() % s.order == 0);

    // Periodicity: abelian-subgroup scan agrees with the p-rank route.
    bool rank_route = true;
    for (auto p : prime_divisors(g.order())) rank_route &= p_rank(lat, p) <= 1;
    CHECK(has_periodic_cohomology(lat) == rank_route);

    if (g.order() > 1) {
      auto r = maximal_dichotomy(lat);
      if (r.kind == DichotomyKind::NormalMaximal) CHECK(lat.is_normal(r.first));
    }
    if (dichotomy_counting_check(lat).status == CountingStatus::HypothesisHolds) ++hypothesis_holds;

    // Closure: subgroups of a listed subgroup are listed.
    if (g.order() <= 24 && g.order() > 1) {
      std::size_t mid = lat.size() / 2;
      SubgroupLattice inner(lat.as_group(mid));
      for (const auto& s : inner.subgroups()) {
        ElementSet mapped(g.order());
        for (std::size_t x : s.elements.indices()) mapped.insert(*g.index_of(inner.group().element(x)));
        CHECK(lat.index_of(mapped).has_value());
      }
    }
  }
  CHECK(hypothesis_holds == 0);
}
