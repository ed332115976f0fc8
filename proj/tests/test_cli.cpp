#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pseudofree/pseudofree.hpp"

using namespace pseudofree;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args, RunConfig cfg = {}) {
  std::ostringstream out, err;
  const int code = run_command(args, cfg, out, err);
  return {code, out.str(), err.str()};
}

bool has(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("group spec parsing") {
  const auto s3 = parse_group("Meta(3,2,2)");
  CHECK(s3.order() == 6);
  CHECK_FALSE(s3.is_abelian());

  CHECK(isomorphic(parse_group("C(2) x C(2)"), parse_group("ElemAb(2,2)")));
  CHECK(isomorphic(parse_group("C(2) x (C(3) x C(5))"), parse_group("C(30)")));
  CHECK(isomorphic(parse_group("perm: (1 2 3), (1 2)"), s3));
  CHECK(parse_group("perm: (1,2,3)(4,5)").order() == 6);
  CHECK(parse_group("perm: ()").order() == 1);
  CHECK(parse_group("  Q( 8 ) ").order() == 8);
  CHECK(parse_group("S(4)").order() == 24);

  const auto ast = parse_group_spec("D(8) x (C(3) x Q(8))");
  CHECK(ast.kind == GroupSpecAST::Kind::Product);
  CHECK(parse_group_spec(ast.to_string()) == ast);
  const auto perm = parse_group_spec("perm: (1 2 3)(4 5), (1 2)");
  CHECK(perm.to_string() == "perm: (1 2 3)(4 5), (1 2)");
  CHECK(parse_group_spec(perm.to_string()) == perm);
}

TEST_CASE("group spec errors carry offsets") {
  auto offset_of = [](const std::string& text) -> std::optional<std::size_t> {
    try {
      parse_group(text);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return std::nullopt;
  };
  auto kind_of = [](const std::string& text) {
    try {
      parse_group(text);
    } catch (const ParseError& e) {
      return e.kind();
    }
    return ErrorKind::InternalContradiction;
  };
  CHECK(offset_of("C(4") == 3);
  CHECK(offset_of("Foo(3)") == 0);
  CHECK(offset_of("C(2) x Bar(2)") == 7);
  CHECK(offset_of("C(2) y") == 5);
  CHECK(offset_of("perm: (1 0)") == 9);
  CHECK(kind_of("C(4") == ErrorKind::SyntaxError);
  CHECK(kind_of("perm: (1 2 1)") == ErrorKind::SemanticError);
  CHECK(kind_of("Meta(4,2,3)") == ErrorKind::SemanticError);
  CHECK(offset_of("C(2) x Meta(4,2,3)") == 7);
  CHECK(kind_of("C(0)") == ErrorKind::SemanticError);
  CHECK(kind_of("") == ErrorKind::SyntaxError);
}

TEST_CASE("catalog names rebuild the same group") {
  for (const auto& entry : catalog(32, true)) {
    INFO(entry.name);
    const auto g = parse_group(entry.name);
    CHECK(g.order() == entry.group.order());
    if (g.order() <= 64) CHECK(isomorphic(g, entry.group));
  }
}

TEST_CASE("json round trips") {
  for (const auto& entry : catalog(24, false)) {
    INFO(entry.name);
    const auto v = decide_pseudofree(entry.group, 3);
    const json j = v;
    const auto back = j.get<Verdict>();
    CHECK(back == v);
    CHECK(replay_verdict(back));
    CHECK(json(back) == j);
  }

  const SubgroupLattice lat(parse_group("Q(8)"));
  const auto table = *formula_table(lat, CoefficientModule::trivial(), 8);
  const json tj = table;
  CHECK(tj.at("display") == table.to_string());
  CHECK(tj.get<CohomologyTable>().same_entries(table));

  const auto f = FactoredOrder::from_map({{2, 13}, {3, 1}});
  CHECK(json(f).dump() == R"({"2":13,"3":1})");
  CHECK(json(f).get<FactoredOrder>() == f);

  const auto cv = collapse_guaranteed(reduce_mod_p(parse_form_name("E8"), 3));
  CHECK(json(cv).get<CollapseVerdict>() == cv);

  const auto report = survey(catalog(12, false), 3, 2);
  const json rj = report;
  CHECK(rj.at("summary").at("consistent") == true);
  const auto rback = rj.get<SurveyReport>();
  REQUIRE(rback.rows.size() == report.rows.size());
  for (std::size_t i = 0; i < report.rows.size(); ++i) CHECK(rback.rows[i].verdict == report.rows[i].verdict);

  const auto tables = MetacyclicTables::for_primes(3, 2, 10);
  const auto acc = accounting_consistency(*tables, {0, 4, 2}, 4, {8, 10});
  const auto accback = json(acc).get<AccountingReport>();
  CHECK(accback.all_match() == acc.all_match());
  CHECK(accback.checks.size() == 2);

  CHECK_THROWS_AS(json::parse(R"({"kind":"Bogus"})").get<Verdict>(), Error);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config("# caps\norder_cap = 500\nthreads=2\nformat = json  # trailing\n\nsearch_cap = 99\n");
  CHECK(cfg.order_cap == 500);
  CHECK(cfg.threads == 2);
  CHECK(cfg.format == OutputFormat::Json);
  CHECK(cfg.search_cap == 99);
  CHECK(cfg.oracle_degree_cap == 8);
  CHECK_THROWS_AS(parse_config("bogus = 1"), Error);
  CHECK_THROWS_AS(parse_config("order_cap = -3"), Error);
  CHECK_THROWS_AS(parse_config("order_cap = 0"), Error);
  CHECK_THROWS_AS(parse_config("order_cap"), Error);
  CHECK_THROWS_AS(parse_config("format = yaml"), Error);
}

TEST_CASE("cli commands") {
  auto a = run({"analyze", "Q(8)", "--b2", "3"});
  CHECK(a.code == 0);
  CHECK(has(a.out, "Excluded"));
  CHECK(has(a.out, "trace replay: ok"));

  auto c6 = run({"--format", "json", "analyze", "C(6)", "--b2", "3"});
  CHECK(c6.code == 0);
  const auto j = json::parse(c6.out);
  CHECK(j.at("verdict").at("kind") == "CyclicSemifree");
  CHECK(j.at("verdict").at("fixed_points") == 5);

  auto after = run({"analyze", "C(6)", "--b2", "3", "--format", "json"});
  CHECK(after.code == 0);
  CHECK(json::parse(after.out).at("replayed") == true);

  auto coh = run({"cohomology", "C(6)", "--max-degree", "4", "--verify"});
  CHECK(coh.code == 0);
  CHECK(has(coh.out, "[Z, 0, Z6, 0, Z6]"));
  CHECK(has(coh.out, "verified: true"));

  auto ring = run({"cohomology", "Q(8)", "--coeff", "Z[G]", "--max-degree", "3"});
  CHECK(ring.code == 0);
  auto perm = run({"--format", "json", "cohomology", "S(3)", "--coeff", "Z[G/H:C(2)]", "--max-degree", "4", "--verify"});
  CHECK(perm.code == 0);
  CHECK(json::parse(perm.out).at("verified") == true);
  auto perm2 = run({"cohomology", "S(3)", "--coeff", "Z[G/H:perm: (1 2)]", "--max-degree", "2"});
  CHECK(perm2.code == 0);

  auto orb = run({"orbits", "--p", "3", "--q", "2", "--b2", "2"});
  CHECK(orb.code == 0);
  CHECK(has(orb.out, "(0,4,2)"));
  auto none = run({"--format", "json", "orbits", "--p", "3", "--q", "2", "--b2", "4"});
  CHECK(json::parse(none.out).at("solution").is_null());

  auto col = run({"collapse", "--p", "3", "--form", "diag:+1,+1,+1", "--b2", "3"});
  CHECK(col.code == 0);
  auto mat = run({"--format", "json", "collapse", "--p", "3", "--form", "[[0,1],[1,0]]"});
  CHECK(mat.code == 0);
  CHECK(json::parse(mat.out).at("rank") == 2);

  auto sv = run({"survey", "--max-order", "12", "--b2", "3", "--no-s5"});
  CHECK(sv.code == 0);
  CHECK(has(sv.out, "consistent with the theorem"));

  auto dich = run({"dichotomy", "A(4)"});
  CHECK(dich.code == 0);
  CHECK(has(dich.out, "normal maximal"));
  auto dich5 = run({"--format", "json", "dichotomy", "A(5)"});
  CHECK(dich5.code == 0);
  CHECK(json::parse(dich5.out).at("dichotomy").at("kind") == "IntersectingPair");

  auto lat = run({"lattice", "S(3)"});
  CHECK(lat.code == 0);
  CHECK(has(lat.out, "6 subgroups"));
}

TEST_CASE("cli exit codes") {
  CHECK(run({}).code == 2);
  CHECK(run({"analyze", "Q(8)", "--b2", "3", "--bogus"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"analyze", "Q(8", "--b2", "3"}).code == 2);
  CHECK(run({"analyze", "Meta(4,2,3)", "--b2", "3"}).code == 2);
  CHECK(run({"--format", "xml", "lattice", "C(2)"}).code == 2);

  auto err = run({"--format", "json", "analyze", "C(2) x Q(8", "--b2", "3"});
  CHECK(err.code == 2);
  const auto j = json::parse(err.out);
  CHECK(j.at("error").at("kind") == "SyntaxError");
  CHECK(j.at("error").at("offset") == 10);

  RunConfig small;
  small.order_cap = 50;
  CHECK(run({"analyze", "S(5)", "--b2", "3"}, small).code == 3);
  CHECK(run({"cohomology", "S(3)", "--coeff", "Z[G/H:C(2)]", "--max-degree", "12", "--verify"}).code == 3);
  small = {};
  small.search_cap = 10;
  CHECK(run({"collapse", "--p", "3", "--form", "E8"}, small).code == 3);

  auto help = run({"--help"});
  CHECK(help.code == 0);
  for (const char* word : {"analyze", "cohomology", "dichotomy", "orbits", "collapse", "survey", "lattice", "--format", "--config"})
    CHECK(has(help.out, word));
  auto sub = run({"cohomology", "--help"});
  CHECK(sub.code == 0);
  for (const char* flag : {"--coeff", "--max-degree", "--verify"}) CHECK(has(sub.out, flag));
}

TEST_CASE("cli reads a config file") {
  const std::string path = "test_cli_config.tmp";
  {
    std::ofstream f(path);
    f << "format = json\n";
  }
  auto r = run({"--config", path, "lattice", "C(4)"});
  std::remove(path.c_str());
  CHECK(r.code == 0);
  CHECK(json::parse(r.out).at("subgroups").size() == 3);
  CHECK(run({"--config", "/nonexistent/cfg", "lattice", "C(4)"}).code == 2);
}
