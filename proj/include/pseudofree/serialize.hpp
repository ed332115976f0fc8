#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pseudofree/abelian.hpp"
#include "pseudofree/borel.hpp"
#include "pseudofree/cohomology.hpp"
#include "pseudofree/engine.hpp"
#include "pseudofree/forms.hpp"
#include "pseudofree/group_spec.hpp"
#include "pseudofree/lattice.hpp"

namespace pseudofree {

using json = nlohmann::json;

namespace detail {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

template <class E>
E enum_from(const json& j, E last, const char* what) {
  const auto text = j.get<std::string>();
  for (int i = 0; i <= static_cast<int>(last); ++i)
    if (text == to_string(static_cast<E>(i))) return static_cast<E>(i);
  fail(ErrorKind::SyntaxError, std::string("unknown ") + what + " '" + text + "'");
}

inline Permutation permutation_from(const std::string& cycles, std::size_t degree) {
  const auto ast = parse_group_spec("perm: " + cycles);
  return Permutation::from_cycles(degree, ast.perms.at(0));
}

}  // namespace detail

inline void to_json(json& j, const FactoredOrder& f) {
  j = json::object();
  for (const auto& [p, e] : f.exponents()) j[std::to_string(p)] = e;
}
inline void from_json(const json& j, FactoredOrder& f) {
  std::map<std::uint64_t, std::uint64_t> m;
  for (const auto& [k, v] : j.items()) m[std::stoull(k)] = v.get<std::uint64_t>();
  f = FactoredOrder::from_map(m);
}

inline void to_json(json& j, const AbelianGroup& g) {
  j = {{"free_rank", g.free_rank()}, {"invariant_factors", g.invariant_factors()}};
}
inline void from_json(const json& j, AbelianGroup& g) {
  g = AbelianGroup::from_cyclic(j.at("invariant_factors").get<std::vector<std::uint64_t>>(), j.at("free_rank").get<int>());
}

inline void to_json(json& j, const CohomologyTable& t) {
  j = {{"group", t.group},
       {"coefficients", t.coefficients},
       {"period", detail::optional_json(t.period)},
       {"entries", t.entries},
       {"display", t.to_string()}};
}
inline void from_json(const json& j, CohomologyTable& t) {
  t.group = j.at("group").get<std::string>();
  t.coefficients = j.at("coefficients").get<std::string>();
  t.period = detail::optional_from<int>(j, "period");
  t.entries = j.at("entries").get<std::vector<AbelianGroup>>();
}

inline void to_json(json& j, const CollapseVerdict& v) {
  j = {{"outcome", to_string(v.outcome)},
       {"reason", to_string(v.reason)},
       {"p", v.p},
       {"rank", v.rank},
       {"witness", detail::optional_json(v.witness)},
       {"vectors_checked", v.vectors_checked}};
}
inline void from_json(const json& j, CollapseVerdict& v) {
  v.outcome = detail::enum_from(j.at("outcome"), CollapseOutcome::NotGuaranteed, "collapse outcome");
  v.reason = detail::enum_from(j.at("reason"), CollapseReason::ZeroRank, "collapse reason");
  v.p = j.at("p").get<std::uint64_t>();
  v.rank = j.at("rank").get<std::size_t>();
  v.witness = detail::optional_from<std::vector<std::uint64_t>>(j, "witness");
  v.vectors_checked = j.at("vectors_checked").get<std::uint64_t>();
}

inline void to_json(json& j, const ExtensionShape& s) { j = {{"k", s.k}, {"q", s.q}, {"r", s.r}, {"s", s.s}}; }
inline void from_json(const json& j, ExtensionShape& s) {
  s = {j.at("k").get<std::uint64_t>(), j.at("q").get<std::uint64_t>(), j.at("r").get<std::uint64_t>(),
       j.at("s").get<std::uint64_t>()};
}

inline void to_json(json& j, const GroupRef& g) {
  std::vector<std::string> gens;
  for (const auto& p : g.generators) gens.push_back(p.to_string());
  j = {{"name", g.name}, {"degree", g.degree}, {"generators", gens}};
}
inline void from_json(const json& j, GroupRef& g) {
  g.name = j.at("name").get<std::string>();
  g.degree = j.at("degree").get<std::size_t>();
  g.generators.clear();
  for (const auto& s : j.at("generators")) g.generators.push_back(detail::permutation_from(s.get<std::string>(), g.degree));
}

inline void to_json(json& j, const ObstructionStep& s) {
  j = {{"rule", to_string(s.rule)},
       {"summary", s.summary()},
       {"citation", s.citation},
       {"subject", s.subject},
       {"b2", s.b2},
       {"subgroups", s.subgroups},
       {"witness", s.witness ? json(s.witness->to_string()) : json(nullptr)},
       {"shape", detail::optional_json(s.shape)},
       {"p", s.p},
       {"q", s.q},
       {"collapsed", detail::optional_json(s.collapsed)},
       {"fixed_set", detail::optional_json(s.fixed_set)},
       {"fixed_points", s.fixed_points}};
}
inline void from_json(const json& j, ObstructionStep& s) {
  s.rule = detail::enum_from(j.at("rule"), Rule::SemifreeCyclicityFail, "rule");
  s.citation = j.at("citation").get<std::string>();
  s.subject = j.at("subject").get<GroupRef>();
  s.b2 = j.at("b2").get<std::uint64_t>();
  s.subgroups = j.at("subgroups").get<std::vector<GroupRef>>();
  s.witness.reset();
  if (!j.at("witness").is_null()) s.witness = detail::permutation_from(j.at("witness").get<std::string>(), s.subject.degree);
  s.shape = detail::optional_from<ExtensionShape>(j, "shape");
  s.p = j.at("p").get<std::uint64_t>();
  s.q = j.at("q").get<std::uint64_t>();
  s.collapsed = detail::optional_from<FactoredOrder>(j, "collapsed");
  s.fixed_set = detail::optional_from<FactoredOrder>(j, "fixed_set");
  s.fixed_points = j.at("fixed_points").get<std::uint64_t>();
}

inline void to_json(json& j, const Verdict& v) {
  j = {{"kind", to_string(v.kind)},
       {"summary", v.summary()},
       {"group", v.group},
       {"order", v.order},
       {"b2", v.b2},
       {"fixed_points", v.fixed_points},
       {"trace", v.trace},
       {"reason", v.reason}};
}
inline void from_json(const json& j, Verdict& v) {
  v.kind = detail::enum_from(j.at("kind"), VerdictKind::OutOfScope, "verdict kind");
  v.group = j.at("group").get<std::string>();
  v.order = j.at("order").get<std::uint64_t>();
  v.b2 = j.at("b2").get<std::uint64_t>();
  v.fixed_points = j.at("fixed_points").get<std::uint64_t>();
  v.trace = j.at("trace").get<std::vector<ObstructionStep>>();
  v.reason = j.at("reason").get<std::string>();
}

inline void to_json(json& j, const SingularProfile& s) { j = {{"x1", s.x1}, {"xp", s.xp}, {"xq", s.xq}}; }
inline void from_json(const json& j, SingularProfile& s) {
  s = {j.at("x1").get<std::uint64_t>(), j.at("xp").get<std::uint64_t>(), j.at("xq").get<std::uint64_t>()};
}

inline void to_json(json& j, const DegreeCheck& c) {
  j = {{"degree", c.degree}, {"collapsed", c.collapsed}, {"singular", c.singular}, {"match", c.match}};
}
inline void from_json(const json& j, DegreeCheck& c) {
  c.degree = j.at("degree").get<int>();
  c.collapsed = j.at("collapsed").get<FactoredOrder>();
  c.singular = j.at("singular").get<FactoredOrder>();
  c.match = j.at("match").get<bool>();
}

inline void to_json(json& j, const AccountingReport& r) { j = {{"checks", r.checks}, {"all_match", r.all_match()}}; }
inline void from_json(const json& j, AccountingReport& r) { r.checks = j.at("checks").get<std::vector<DegreeCheck>>(); }

inline void to_json(json& j, const SurveyRow& r) {
  j = {{"name", r.name},
       {"order", r.order},
       {"cyclic", r.cyclic},
       {"verdict", detail::optional_json(r.verdict)},
       {"error", detail::optional_json(r.error)}};
}
inline void from_json(const json& j, SurveyRow& r) {
  r.name = j.at("name").get<std::string>();
  r.order = j.at("order").get<std::uint64_t>();
  r.cyclic = j.at("cyclic").get<bool>();
  r.verdict = detail::optional_from<Verdict>(j, "verdict");
  r.error = detail::optional_from<std::string>(j, "error");
}

inline void to_json(json& j, const SurveyReport& r) {
  j = {{"b2", r.b2},
       {"rows", r.rows},
       {"summary",
        {{"groups", r.rows.size()},
         {"cyclic_semifree", r.count(VerdictKind::CyclicSemifree)},
         {"excluded", r.count(VerdictKind::Excluded)},
         {"errors", r.errors()},
         {"consistent", r.consistent()}}}};
}
inline void from_json(const json& j, SurveyReport& r) {
  r.b2 = j.at("b2").get<std::uint64_t>();
  r.rows = j.at("rows").get<std::vector<SurveyRow>>();
}

inline json to_json_value(const SemifreeTest& t) {
  return {{"pass", t.pass}, {"b2", t.b2}, {"collapsed", t.collapsed}, {"fixed_set", t.fixed_set}};
}

inline std::string rational_text(const Rational& r) {
  return r.denominator() == 1 ? std::to_string(r.numerator())
                              : std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline json to_json_value(const SubgroupLattice& lat, const DichotomyResult& d) {
  json j = {{"kind", d.kind == DichotomyKind::NormalMaximal ? "NormalMaximal" : "IntersectingPair"},
            {"first", {{"index", d.first}, {"name", describe(SubgroupLattice(lat.as_group(d.first)))}}}};
  if (d.kind == DichotomyKind::IntersectingPair) {
    j["second"] = {{"index", d.second}, {"name", describe(SubgroupLattice(lat.as_group(d.second)))}};
    j["witness"] = lat.group().element(d.witness).to_string();
  }
  return j;
}

inline json to_json_value(const CountingReport& r) {
  return {{"status", to_string(r.status)},
          {"reason", r.reason},
          {"class_orders", r.class_orders},
          {"lhs", rational_text(r.lhs)},
          {"rhs", rational_text(r.rhs)},
          {"contradiction", r.contradiction}};
}

}  // namespace pseudofree
