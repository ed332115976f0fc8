#include <catch2/catch_amalgamated.hpp>

#include "pseudofree/forms.hpp"

using namespace pseudofree;

namespace {

// Oracle straight from the definition: enumerate every pair (u, v).
bool brute_force_guaranteed(const FormModP& fm) {
  if (fm.p != 2 && fm.p != 3) return true;
  if (fm.p == 2 && fm.rank() == 0) return false;
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < fm.rank(); ++i) total *= fm.p;
  for (std::uint64_t a = 1; a < total; ++a) {
    const auto u = detail::vector_at(a, fm.p, fm.rank());
    const bool square_zero = fm.dot(u, u) == 0;
    if ((fm.p == 3) == square_zero) continue;
    bool partner = false;
    for (std::uint64_t b = 1; b < total && !partner; ++b) {
      const auto v = detail::vector_at(b, fm.p, fm.rank());
      if (fm.dot(u, v) != 0) continue;
      // v independent of u: not a multiple c*u.
      bool multiple = false;
      for (std::uint64_t c = 0; c < fm.p; ++c) {
        bool same = true;
        for (std::size_t i = 0; i < fm.rank(); ++i)
          if (v[i] != c * u[i] % fm.p) same = false;
        if (same) multiple = true;
      }
      partner = !multiple;
    }
    if (!partner) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("named forms") {
  CHECK(hyperbolic_form().matrix() == FormMatrix{{0, 1}, {1, 0}});
  CHECK(determinant(e8_form().matrix()) == 1);
  CHECK(e8_form().is_even());
  CHECK(parse_form_name("diag:+1,+1,-1").matrix() == FormMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, -1}});
  CHECK(parse_form_name("H*2").rank() == 4);
  CHECK(parse_form_name("E8+H").rank() == 10);
  CHECK(parse_form_name("0").rank() == 0);
  CHECK(parse_form_name("diag:+1+H").rank() == 3);
  CHECK_THROWS_AS(parse_form_name("K3"), Error);
  CHECK_THROWS_AS(parse_form_name("diag:+2"), Error);
  CHECK_THROWS_AS(IntersectionForm(FormMatrix{{2, 0}, {0, 1}}), Error);
  CHECK_THROWS_AS(IntersectionForm(FormMatrix{{1, 1}, {0, 1}}), Error);
}

TEST_CASE("reduction mod p") {
  auto h2 = reduce_mod_p(hyperbolic_form(), 2);
  CHECK(h2.matrix == std::vector<std::vector<std::uint64_t>>{{0, 1}, {1, 0}});
  auto d3 = reduce_mod_p(diagonal_form({1, -1}), 3);
  CHECK(d3.matrix == std::vector<std::vector<std::uint64_t>>{{1, 0}, {0, 2}});
  auto e8 = reduce_mod_p(e8_form(), 2);
  for (std::size_t i = 0; i < 8; ++i) CHECK(e8.matrix[i][i] == 0);
  CHECK_THROWS_AS(reduce_mod_p(hyperbolic_form(), 4), Error);
}

TEST_CASE("collapse examples") {
  auto h = collapse_guaranteed(reduce_mod_p(hyperbolic_form(), 2));
  CHECK_FALSE(h.guaranteed());
  REQUIRE(h.witness);
  CHECK(*h.witness == std::vector<std::uint64_t>{1, 0});

  auto d1 = collapse_guaranteed(reduce_mod_p(diagonal_form({1}), 3));
  CHECK_FALSE(d1.guaranteed());
  CHECK(d1.reason == CollapseReason::NoPartner);

  auto p5 = collapse_guaranteed(reduce_mod_p(diagonal_form({1, -1}), 5));
  CHECK(p5.guaranteed());
  CHECK(p5.reason == CollapseReason::PrimeAbove3);

  auto d111 = collapse_guaranteed(reduce_mod_p(diagonal_form({1, 1, 1}), 2));
  CHECK(d111.guaranteed());
  CHECK(d111.reason == CollapseReason::PartnerVector);

  // Diag(1,1) over F_2: u = (1,1) is isotropic and spans its own perp.
  auto d11 = collapse_guaranteed(reduce_mod_p(diagonal_form({1, 1}), 2));
  CHECK_FALSE(d11.guaranteed());
  CHECK(*d11.witness == std::vector<std::uint64_t>{1, 1});

  auto zero = collapse_guaranteed(reduce_mod_p(diagonal_form({}), 2));
  CHECK_FALSE(zero.guaranteed());
  CHECK(zero.reason == CollapseReason::ZeroRank);
  CHECK(collapse_guaranteed(reduce_mod_p(diagonal_form({}), 3)).guaranteed());
  CHECK(collapse_guaranteed(reduce_mod_p(diagonal_form({1}), 2)).reason == CollapseReason::ProductArgument);
}

TEST_CASE("search cap") {
  auto fm = reduce_mod_p(direct_sum(e8_form(), hyperbolic_form()), 3);
  try {
    collapse_guaranteed(fm, 1000);
    FAIL("expected SearchBound");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SearchBound);
  }
}

TEST_CASE("catalog verdicts match the pairwise oracle and re-verify") {
  for (const auto& form : form_catalog())
    for (std::uint64_t p : {2, 3, 5, 7}) {
      const auto fm = reduce_mod_p(form, p);
      const auto v = collapse_guaranteed(fm);
      INFO(form.name() << " mod " << p);
      CHECK(verify_collapse(fm, v));
      std::uint64_t space = 1;
      for (std::size_t i = 0; i < fm.rank(); ++i) space *= p;
      if (space <= 4096) CHECK(v.guaranteed() == brute_force_guaranteed(fm));
    }
}

TEST_CASE("threshold pattern over the catalog") {
  for (const auto& form : form_catalog()) {
    INFO(form.name());
    const auto two = collapse_guaranteed(reduce_mod_p(form, 2));
    const auto three = collapse_guaranteed(reduce_mod_p(form, 3));
    if (form.rank() >= 3) CHECK(two.guaranteed());
    if (form.rank() == 0 || form.rank() == 2) CHECK_FALSE(two.guaranteed());
    if (form.rank() >= 2) CHECK(three.guaranteed());
    if (form.rank() == 1) CHECK_FALSE(three.guaranteed());
    for (std::uint64_t p : {5, 7, 11}) CHECK(collapse_guaranteed(reduce_mod_p(form, p)).guaranteed());
  }
}

TEST_CASE("tampered witnesses are rejected") {
  const auto fm = reduce_mod_p(hyperbolic_form(2), 2);
  auto v = collapse_guaranteed(reduce_mod_p(hyperbolic_form(), 2));
  CHECK_FALSE(verify_collapse(fm, v));  // rank mismatch
  const auto h = reduce_mod_p(hyperbolic_form(), 2);
  v.witness = std::vector<std::uint64_t>{1, 1};  // u.u = 0 over F_2 but (1,1)-perp is <(1,1)>: still valid
  CHECK(verify_collapse(h, v));
  v.witness = std::vector<std::uint64_t>{0, 0};
  CHECK_FALSE(verify_collapse(h, v));
  const auto d3 = reduce_mod_p(diagonal_form({1, 1, 1}), 3);
  CollapseVerdict fake{CollapseOutcome::NotGuaranteed, CollapseReason::NoPartner, 3, 3, std::vector<std::uint64_t>{1, 0, 0}, 0};
  CHECK_FALSE(verify_collapse(d3, fake));
}

TEST_CASE("elementary abelian fixed points") {
  CHECK(elemabel_fixed_points(3, diagonal_form({1, 1, 1}), 3) == 5u);
  CHECK_FALSE(elemabel_fixed_points(2, hyperbolic_form(), 2).has_value());
  CHECK(elemabel_fixed_points(5, diagonal_form({1}), 1) == 3u);
  CHECK_THROWS_AS(elemabel_fixed_points(5, diagonal_form({1}), 2), Error);
}
