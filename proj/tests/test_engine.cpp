#include <catch2/catch_amalgamated.hpp>

#include "pseudofree/catalog.hpp"
#include "pseudofree/engine.hpp"

using namespace pseudofree;

namespace {

PermGroup named(Family f, std::vector<std::uint64_t> params) { return named_group(FamilySpec{f, std::move(params)}); }

std::vector<std::string> rules(const Verdict& v) {
  std::vector<std::string> out;
  for (const auto& s : v.trace) out.push_back(s.summary());
  return out;
}

bool contains_in_order(const std::vector<std::string>& trace, const std::vector<std::string>& wanted) {
  std::size_t k = 0;
  for (const auto& s : trace)
    if (k < wanted.size() && s == wanted[k]) ++k;
  return k == wanted.size();
}

}  // namespace

TEST_CASE("engine examples") {
  const auto c6 = decide_pseudofree(named(Family::Cyclic, {6}), 3);
  CHECK(c6.kind == VerdictKind::CyclicSemifree);
  CHECK(c6.fixed_points == 5);
  CHECK(c6.summary() == "CyclicSemifree(5)");

  const auto s3 = decide_pseudofree(named(Family::Meta, {3, 2, 2}), 3);
  CHECK(s3.kind == VerdictKind::Excluded);
  REQUIRE_FALSE(s3.trace.empty());
  CHECK(s3.trace.back().summary() == "MetacyclicOrbitInfeasible(3,2,3)");

  const auto q8 = decide_pseudofree(named(Family::Quaternion, {8}), 3);
  CHECK(q8.kind == VerdictKind::Excluded);
  CHECK(contains_in_order(rules(q8), {"QuaternionCenterCase1", "SemifreeCyclicityFail(8192 vs 1024)"}));

  const auto v4 = decide_pseudofree(named(Family::ElemAb, {2, 2}), 4);
  CHECK(v4.kind == VerdictKind::Excluded);
  CHECK(v4.trace.back().summary() == "ElemAbelianContradiction(2)");

  const auto a4 = decide_pseudofree(named(Family::Alternating, {4}), 3);
  CHECK(a4.kind == VerdictKind::Excluded);
  CHECK(a4.trace.back().summary() == "SubgroupExcluded(ElemAb(2,2))");

  // All proper subgroups cyclic, no forbidden subgroup: falls back to Case 1.
  const auto q12 = decide_pseudofree(named(Family::Quaternion, {12}), 3);
  CHECK(q12.kind == VerdictKind::Excluded);
  CHECK(contains_in_order(rules(q12), {"Case1Merge(C(4), C(4))", "SemifreeCyclicityFail(27648 vs 1024)"}));

  CHECK(decide_pseudofree(named(Family::Meta, {7, 3, 2}), 5).kind == VerdictKind::Excluded);
  CHECK(decide_pseudofree(named(Family::Cyclic, {1}), 3).kind == VerdictKind::CyclicSemifree);
}

TEST_CASE("small b2 is out of scope") {
  for (std::uint64_t b2 : {0, 1, 2}) {
    const auto v = decide_pseudofree(named(Family::ElemAb, {3, 2}), b2);
    CHECK(v.kind == VerdictKind::OutOfScope);
    CHECK(v.trace.empty());
    CHECK(replay_verdict(v));
  }
  const auto text = explain(decide_pseudofree(named(Family::Cyclic, {5}), 1));
  CHECK(text.find("CP^2") != std::string::npos);
  CHECK(text.find("C3 x C3") != std::string::npos);
}

TEST_CASE("explain") {
  const auto c6 = explain(decide_pseudofree(named(Family::Cyclic, {6}), 3));
  CHECK(c6.find("Lefschetz: Λ(g)=χ(X)=b₂+2=5") != std::string::npos);
  const auto q8 = explain(decide_pseudofree(named(Family::Quaternion, {8}), 3));
  CHECK(q8.find("2^13") != std::string::npos);
  CHECK(q8.find("2^10") != std::string::npos);
  CHECK(q8.find("FAILED") == std::string::npos);
}

TEST_CASE("replay rejects tampered steps") {
  auto q8 = decide_pseudofree(named(Family::Quaternion, {8}), 3);
  REQUIRE(replay_verdict(q8));
  for (auto& s : q8.trace) {
    ObstructionStep bad = s;
    switch (s.rule) {
      case Rule::SemifreeCyclicityFail: bad.collapsed = FactoredOrder::of(1024); break;
      case Rule::NormalMaximalExtension: bad.shape->r += 1; break;
      case Rule::Case1Merge: bad.witness = Permutation::identity(s.subject.degree); break;
      default: bad.citation.clear(); break;
    }
    CHECK_FALSE(replay_step(bad));
  }
  auto s3 = decide_pseudofree(named(Family::Meta, {3, 2, 2}), 3);
  auto bad = s3.trace.back();
  bad.b2 = 2;  // orbit equations are solvable at b2 = 2
  CHECK_FALSE(replay_step(bad));
  auto lef = decide_pseudofree(named(Family::Cyclic, {4}), 3).trace.front();
  lef.fixed_points = 4;
  CHECK_FALSE(replay_step(lef));
}

TEST_CASE("catalog survey agrees with cyclicity and replays") {
  const auto entries = catalog();
  REQUIRE(entries.size() >= 100);
  for (std::uint64_t b2 : {3, 4, 5}) {
    const auto report = survey(entries, b2);
    INFO("b2=" << b2);
    CHECK(report.errors() == 0);
    CHECK(report.consistent());
    for (const auto& row : report.rows) {
      INFO(row.name);
      REQUIRE(row.verdict);
      CHECK(replay_verdict(*row.verdict));
    }
  }
}

TEST_CASE("survey is deterministic across thread counts") {
  const auto entries = catalog(24, true);
  const auto one = survey(entries, 3, 1);
  const auto many = survey(entries, 3, 8);
  REQUIRE(one.rows.size() == many.rows.size());
  for (std::size_t i = 0; i < one.rows.size(); ++i) {
    INFO(one.rows[i].name);
    CHECK(one.rows[i].verdict == many.rows[i].verdict);
  }
  CHECK_THROWS_AS(survey(entries, 2), Error);
}

TEST_CASE("recursion only visits proper subgroups") {
  for (const auto& entry : catalog(32, false)) {
    const auto v = decide_pseudofree(entry.group, 3);
    for (const auto& s : v.trace)
      if (s.rule == Rule::SubgroupExcluded) CHECK(s.subgroups.front().build().order() < entry.group.order());
  }
}
