#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pseudofree/borel.hpp"
#include "pseudofree/catalog.hpp"
#include "pseudofree/error.hpp"
#include "pseudofree/group.hpp"
#include "pseudofree/lattice.hpp"

namespace pseudofree {

/// A group recorded by its generators, so a step can be replayed without the
/// lattice it came from.
struct GroupRef {
  std::vector<Permutation> generators;
  std::size_t degree = 1;
  std::string name;

  static GroupRef of(const PermGroup& g, std::string name) { return {g.generators(), g.degree(), std::move(name)}; }

  static GroupRef of(const SubgroupLattice& lat, std::size_t i, std::string name) {
    GroupRef ref;
    for (std::size_t x : lat[i].generators) ref.generators.push_back(lat.group().element(x));
    ref.degree = lat.group().degree();
    ref.name = std::move(name);
    return ref;
  }

  PermGroup build() const { return PermGroup::generate(generators, degree); }

  bool operator==(const GroupRef&) const = default;
};

enum class Rule {
  LefschetzCount,
  SubgroupExcluded,
  Case1Merge,
  NormalMaximalExtension,
  MetacyclicOrbitInfeasible,
  ElemAbelianContradiction,
  QuaternionCenterCase1,
  SemifreeCyclicityFail,
};

inline const char* to_string(Rule r) {
  switch (r) {
    case Rule::LefschetzCount: return "LefschetzCount";
    case Rule::SubgroupExcluded: return "SubgroupExcluded";
    case Rule::Case1Merge: return "Case1Merge";
    case Rule::NormalMaximalExtension: return "NormalMaximalExtension";
    case Rule::MetacyclicOrbitInfeasible: return "MetacyclicOrbitInfeasible";
    case Rule::ElemAbelianContradiction: return "ElemAbelianContradiction";
    case Rule::QuaternionCenterCase1: return "QuaternionCenterCase1";
    case Rule::SemifreeCyclicityFail: return "SemifreeCyclicityFail";
  }
  return "?";
}

inline std::optional<Rule> rule_from_string(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Rule::SemifreeCyclicityFail); ++i)
    if (s == to_string(static_cast<Rule>(i))) return static_cast<Rule>(i);
  return std::nullopt;
}

inline const char* citation_for(Rule r) {
  switch (r) {
    case Rule::LefschetzCount:
      return "Lefschetz fixed point formula: |X^g| = chi(X^g) = Lambda(g) = chi(X) = b2(X) + 2";
    case Rule::SubgroupExcluded:
      return "every subgroup acts pseudofreely and homologically trivially on the same X, so by induction an "
             "excluded subgroup excludes G";
    case Rule::Case1Merge:
      return "Case 1: maximal subgroups H1, H2 sharing h != e have the fixed set of <h>, so the subgroup they "
             "generate is good, and by maximality it is G";
    case Rule::NormalMaximalExtension:
      return "Case 2: with a normal maximal subgroup, G is an extension 1 -> C_k -> G -> C_q -> 1 and falls into "
             "one of four possibilities";
    case Rule::MetacyclicOrbitInfeasible:
      return "a nonabelian group of order pq acting pseudofreely and homologically trivially has b2(X) <= 2: the "
             "orbit equations have no nonnegative solution";
    case Rule::ElemAbelianContradiction:
      return "for b2 >= 3 the spectral sequence of C_p x C_p collapses, giving b2 + 2 isolated fixed points; C_p x "
             "C_p would then act freely on a linking 3-sphere, but it does not have periodic cohomology";
    case Rule::QuaternionCenterCase1:
      return "a generalized quaternion group has a nontrivial center, so all maximal subgroups intersect "
             "nontrivially, which is Case 1";
    case Rule::SemifreeCyclicityFail:
      return "a semifree action with isolated fixed points forces |G^ab|^2 |G|^b2 = |G^ab|^(b2+2), so "
             "|G^ab| = |G| and G is cyclic";
  }
  return "";
}

/// One machine-checkable inference. Which fields are meaningful depends on
/// the rule; replay_step re-executes the cited computation.
struct ObstructionStep {
  Rule rule = Rule::LefschetzCount;
  std::string citation;
  GroupRef subject;
  std::uint64_t b2 = 0;
  std::vector<GroupRef> subgroups;  // child, pair, normal subgroup, or forbidden subgroup
  std::optional<Permutation> witness;
  std::optional<ExtensionShape> shape;
  std::uint64_t p = 0, q = 0;
  std::optional<FactoredOrder> collapsed, fixed_set;
  std::uint64_t fixed_points = 0;

  std::string summary() const {
    std::ostringstream os;
    os << to_string(rule);
    auto order_text = [](const FactoredOrder& f) {
      auto v = f.to_integer();
      return v ? std::to_string(*v) : f.to_string();
    };
    switch (rule) {
      case Rule::LefschetzCount: os << '(' << fixed_points << ')'; break;
      case Rule::SubgroupExcluded: os << '(' << subgroups.at(0).name << ')'; break;
      case Rule::Case1Merge: os << '(' << subgroups.at(0).name << ", " << subgroups.at(1).name << ')'; break;
      case Rule::NormalMaximalExtension:
        os << "(k=" << shape->k << ", q=" << shape->q << ", r=" << shape->r << ", s=" << shape->s << ')';
        break;
      case Rule::MetacyclicOrbitInfeasible: os << '(' << p << ',' << q << ',' << b2 << ')'; break;
      case Rule::ElemAbelianContradiction: os << '(' << p << ')'; break;
      case Rule::QuaternionCenterCase1: break;
      case Rule::SemifreeCyclicityFail: os << '(' << order_text(*collapsed) << " vs " << order_text(*fixed_set) << ')'; break;
    }
    return os.str();
  }

  bool operator==(const ObstructionStep&) const = default;
};

enum class VerdictKind { CyclicSemifree, Excluded, OutOfScope };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::CyclicSemifree: return "CyclicSemifree";
    case VerdictKind::Excluded: return "Excluded";
    case VerdictKind::OutOfScope: return "OutOfScope";
  }
  return "?";
}

struct Verdict {
  VerdictKind kind = VerdictKind::OutOfScope;
  std::string group;
  std::uint64_t order = 0;
  std::uint64_t b2 = 0;
  std::uint64_t fixed_points = 0;  // CyclicSemifree only
  std::vector<ObstructionStep> trace;
  std::string reason;  // OutOfScope only

  std::string summary() const {
    switch (kind) {
      case VerdictKind::CyclicSemifree: return "CyclicSemifree(" + std::to_string(fixed_points) + ")";
      case VerdictKind::Excluded: return "Excluded";
      case VerdictKind::OutOfScope: return "OutOfScope";
    }
    return "?";
  }

  bool operator==(const Verdict&) const = default;
};

inline const char* small_b2_exceptions() {
  return "b2 < 3 is outside the theorem. Known small-b2 examples: suspensions of linear actions on spheres give "
         "pseudofree actions on S^4 (b2 = 0); the classification of actions on CP^2 (b2 = 1) includes a "
         "pseudofree, non-semifree action of C3 x C3; polyhedral groups act pseudofreely on S^2 x S^2 (b2 = 2)";
}

class Engine;
bool replay_step(const ObstructionStep& step);

/// Decides which groups can act pseudofreely and homologically trivially on
/// a closed simply connected 4-manifold with the given b2, by induction over
/// maximal subgroups. The memo records only whether an isomorphism class is
/// excluded, so traces never depend on which representative was seen first.
class Engine {
 public:
  Verdict decide(const PermGroup& g, std::uint64_t b2) {
    Verdict v;
    v.order = g.order();
    v.b2 = b2;
    if (b2 < 3) {
      v.group = g.order() <= 64 || g.is_cyclic() ? describe(SubgroupLattice(g)) : "G" + std::to_string(g.order());
      v.reason = small_b2_exceptions();
      return v;
    }
    const SubgroupLattice lat(g);
    v.group = describe(lat);
    const GroupRef self = GroupRef::of(g, v.group);
    auto step = [&](Rule rule) {
      ObstructionStep s;
      s.rule = rule;
      s.citation = citation_for(rule);
      s.subject = self;
      s.b2 = b2;
      return s;
    };

    if (g.is_cyclic()) {
      v.kind = VerdictKind::CyclicSemifree;
      v.fixed_points = pseudofree_fixed_count(b2);
      auto s = step(Rule::LefschetzCount);
      s.fixed_points = v.fixed_points;
      v.trace.push_back(std::move(s));
      return v;
    }

    v.kind = VerdictKind::Excluded;
    std::vector<bool> class_done(lat.conjugacy_classes().size(), false);
    for (std::size_t m : lat.maximal()) {
      if (class_done[lat.class_of(m)]) continue;
      class_done[lat.class_of(m)] = true;
      const PermGroup child = lat.as_group(m);
      if (!excluded(child, b2)) continue;
      auto s = step(Rule::SubgroupExcluded);
      s.subgroups.push_back(GroupRef::of(lat, m, describe(SubgroupLattice(child))));
      v.trace.push_back(std::move(s));
      return v;
    }

    // Every proper subgroup is cyclic from here on.
    const auto pair = intersecting_maximals(lat);
    std::optional<std::size_t> normal;
    for (std::size_t m : lat.maximal())
      if (lat.is_normal(m) && (!normal || lat[m].order > lat[*normal].order)) normal = m;

    if (normal) {
      auto shape = metacyclic_shape(lat);
      if (!shape) contradiction(v, "normal maximal subgroup is not cyclic of prime index");
      auto s = step(Rule::NormalMaximalExtension);
      s.shape = shape;
      std::size_t chosen = *normal;
      for (std::size_t m : lat.maximal())
        if (lat.is_normal(m) && lat.is_cyclic(m) && lat[m].order == shape->k) {
          chosen = m;
          break;
        }
      s.subgroups.push_back(GroupRef::of(lat, chosen, "C(" + std::to_string(shape->k) + ")"));
      v.trace.push_back(std::move(s));

      const auto forbidden = find_forbidden_subgroup(lat);
      if (forbidden) {
        const GroupRef sub = GroupRef::of(lat, forbidden->subgroup, describe(SubgroupLattice(lat.as_group(forbidden->subgroup))));
        switch (forbidden->kind) {
          case ForbiddenKind::NonabelianMetacyclicPQ: {
            if (orbit_structure_solve(forbidden->p, forbidden->q, b2))
              contradiction(v, "orbit equations are solvable for b2 >= 3");
            auto t = step(Rule::MetacyclicOrbitInfeasible);
            t.p = forbidden->p;
            t.q = forbidden->q;
            t.subgroups.push_back(sub);
            v.trace.push_back(std::move(t));
            return v;
          }
          case ForbiddenKind::ElemAbelianRank2: {
            auto t = step(Rule::ElemAbelianContradiction);
            t.p = forbidden->p;
            t.subgroups.push_back(sub);
            v.trace.push_back(std::move(t));
            return v;
          }
          case ForbiddenKind::GeneralizedQuaternion: {
            if (!pair) contradiction(v, "quaternion subgroup but maximal subgroups meet trivially");
            auto t = step(Rule::QuaternionCenterCase1);
            t.subgroups.push_back(sub);
            v.trace.push_back(std::move(t));
            break;
          }
        }
      } else if (!pair) {
        contradiction(v, "none of the four possibilities applies and maximal subgroups meet trivially");
      }
    } else if (!pair) {
      contradiction(v, "no normal maximal subgroup and no intersecting pair of maximal subgroups");
    }

    // Case 1: G is good, hence semifree.
    auto merge = step(Rule::Case1Merge);
    merge.subgroups.push_back(GroupRef::of(lat, pair->first, describe(SubgroupLattice(lat.as_group(pair->first)))));
    merge.subgroups.push_back(GroupRef::of(lat, pair->second, describe(SubgroupLattice(lat.as_group(pair->second)))));
    merge.witness = g.element(pair->witness);
    v.trace.push_back(std::move(merge));

    if (g.is_abelian()) {
      const auto forbidden = find_forbidden_subgroup(lat);
      if (!forbidden || forbidden->kind != ForbiddenKind::ElemAbelianRank2)
        contradiction(v, "abelian noncyclic group without C_p x C_p");
      auto t = step(Rule::ElemAbelianContradiction);
      t.p = forbidden->p;
      t.subgroups.push_back(GroupRef::of(lat, forbidden->subgroup, "ElemAb(" + std::to_string(forbidden->p) + ",2)"));
      v.trace.push_back(std::move(t));
      return v;
    }
    if (!has_periodic_cohomology(lat)) contradiction(v, "Case 1 applies but G does not have periodic cohomology");
    const auto test = semifree_cyclicity_test(lat, b2);
    if (test.pass) contradiction(v, "semifree cyclicity test passes for a noncyclic group");
    auto t = step(Rule::SemifreeCyclicityFail);
    t.collapsed = test.collapsed;
    t.fixed_set = test.fixed_set;
    v.trace.push_back(std::move(t));
    return v;
  }

 private:
  struct Pair {
    std::size_t first, second, witness;
  };

  static std::optional<Pair> intersecting_maximals(const SubgroupLattice& lat) {
    const auto& maxes = lat.maximal();
    for (std::size_t a = 0; a < maxes.size(); ++a)
      for (std::size_t b = a + 1; b < maxes.size(); ++b) {
        auto common = lat[maxes[a]].elements.intersect(lat[maxes[b]].elements).indices();
        if (common.size() > 1) return Pair{maxes[a], maxes[b], common[1]};
      }
    return std::nullopt;
  }

  [[noreturn]] static void contradiction(const Verdict& v, const std::string& what) {
    fail(ErrorKind::InternalContradiction, v.group + " with b2=" + std::to_string(v.b2) + ": " + what);
  }

  bool excluded(const PermGroup& g, std::uint64_t b2) {
    if (g.is_cyclic()) return false;
    auto key = registry_.key(g);
    if (key) {
      std::lock_guard lock(mutex_);
      auto it = memo_.find({*key, b2});
      if (it != memo_.end()) return it->second;
    }
    const bool out = decide(g, b2).kind == VerdictKind::Excluded;
    if (key) {
      std::lock_guard lock(mutex_);
      memo_.emplace(std::make_pair(*key, b2), out);
    }
    return out;
  }

  IsomorphismRegistry registry_;
  std::mutex mutex_;
  std::map<std::pair<std::string, std::uint64_t>, bool> memo_;
};

inline Verdict decide_pseudofree(const PermGroup& g, std::uint64_t b2) {
  Engine engine;
  return engine.decide(g, b2);
}

namespace detail {

inline std::optional<std::size_t> lattice_index(const SubgroupLattice& lat, const GroupRef& ref) {
  std::vector<std::size_t> gens;
  for (const auto& p : ref.generators) {
    if (p.degree() != lat.group().degree()) return std::nullopt;
    auto i = lat.group().index_of(p);
    if (!i) return std::nullopt;
    gens.push_back(*i);
  }
  return lat.index_of(lat.group().closure(gens));
}

inline bool is_maximal(const SubgroupLattice& lat, std::size_t i) {
  const auto& m = lat.maximal();
  return std::find(m.begin(), m.end(), i) != m.end();
}

}  // namespace detail

/// Re-executes the computation a step cites, from the recorded parameters.
inline bool replay_step(const ObstructionStep& step) {
  try {
    if (step.citation.empty() || step.citation != citation_for(step.rule)) return false;
    const PermGroup g = step.subject.build();
    const SubgroupLattice lat(g);
    auto sub_index = [&](std::size_t k) -> std::optional<std::size_t> {
      if (k >= step.subgroups.size()) return std::nullopt;
      return detail::lattice_index(lat, step.subgroups[k]);
    };
    switch (step.rule) {
      case Rule::LefschetzCount:
        return g.is_cyclic() && step.fixed_points == pseudofree_fixed_count(step.b2) &&
               lefschetz_number(1, static_cast<std::int64_t>(step.b2), 1) ==
                   static_cast<std::int64_t>(step.fixed_points);
      case Rule::SubgroupExcluded: {
        auto i = sub_index(0);
        if (!i || *i == lat.whole()) return false;
        return decide_pseudofree(lat.as_group(*i), step.b2).kind == VerdictKind::Excluded;
      }
      case Rule::Case1Merge: {
        auto a = sub_index(0), b = sub_index(1);
        if (!a || !b || *a == *b || !step.witness) return false;
        if (!detail::is_maximal(lat, *a) || !detail::is_maximal(lat, *b)) return false;
        auto w = g.index_of(*step.witness);
        if (!w || *w == 0 || !lat[*a].elements.contains(*w) || !lat[*b].elements.contains(*w)) return false;
        auto gens = lat[*a].generators;
        gens.insert(gens.end(), lat[*b].generators.begin(), lat[*b].generators.end());
        return g.closure(gens).size() == g.order();
      }
      case Rule::NormalMaximalExtension: {
        auto i = sub_index(0);
        if (!i || !step.shape || !lat.is_normal(*i) || !lat.is_cyclic(*i) || !detail::is_maximal(lat, *i)) return false;
        const auto shape = metacyclic_shape(lat);
        return shape && *shape == *step.shape && lat[*i].order == shape->k && is_prime(shape->q);
      }
      case Rule::MetacyclicOrbitInfeasible: {
        auto i = sub_index(0);
        if (!i || lat[*i].order != step.p * step.q || lat.is_abelian(*i)) return false;
        return step.b2 >= 3 && !orbit_structure_solve(step.p, step.q, step.b2).has_value();
      }
      case Rule::ElemAbelianContradiction: {
        auto i = sub_index(0);
        if (!i || lat[*i].order != step.p * step.p || !lat.is_elementary_abelian(*i, step.p)) return false;
        return step.b2 >= 3 && !has_periodic_cohomology(lat.as_group(*i));
      }
      case Rule::QuaternionCenterCase1: {
        auto i = sub_index(0);
        if (!i || !is_generalized_quaternion(lat, *i)) return false;
        std::optional<std::size_t> involution;
        for (std::size_t x : lat[*i].elements.indices())
          if (g.element_order(x) == 2) involution = x;
        if (!involution || lat.maximal().size() < 2) return false;
        for (std::size_t m : lat.maximal())
          if (!lat[m].elements.contains(*involution)) return false;
        return true;
      }
      case Rule::SemifreeCyclicityFail: {
        if (!step.collapsed || !step.fixed_set || !has_periodic_cohomology(lat)) return false;
        const auto t = semifree_cyclicity_test(lat, step.b2);
        return !t.pass && t.collapsed == *step.collapsed && t.fixed_set == *step.fixed_set;
      }
    }
  } catch (const Error&) {
    return false;
  }
  return false;
}

inline bool replay_verdict(const Verdict& v) {
  if (v.kind == VerdictKind::OutOfScope) return v.trace.empty() && v.b2 < 3;
  if (v.trace.empty()) return false;
  if (v.kind == VerdictKind::CyclicSemifree && v.fixed_points != pseudofree_fixed_count(v.b2)) return false;
  return std::all_of(v.trace.begin(), v.trace.end(), replay_step);
}

inline std::string explain(const Verdict& v) {
  std::ostringstream os;
  os << v.group << " (order " << v.order << "), b2 = " << v.b2 << ": " << v.summary() << '\n';
  if (v.kind == VerdictKind::OutOfScope) {
    os << "  " << v.reason << '\n';
    return os.str();
  }
  for (std::size_t i = 0; i < v.trace.size(); ++i) {
    const auto& s = v.trace[i];
    os << "  " << i + 1 << ". " << s.summary() << " on " << s.subject.name << '\n';
    switch (s.rule) {
      case Rule::LefschetzCount:
        os << "     Lefschetz: Λ(g)=χ(X)=b₂+2=" << s.fixed_points << '\n';
        break;
      case Rule::SemifreeCyclicityFail:
        os << "     collapsed |H^6(X_G)| = " << s.collapsed->to_string() << ", fixed set |G^ab|^(b2+2) = "
           << s.fixed_set->to_string() << '\n';
        break;
      case Rule::NormalMaximalExtension:
        os << "     1 -> C_" << s.shape->k << " -> G -> C_" << s.shape->q << " -> 1, b a b^-1 = a^" << s.shape->r
           << ", b^q = a^" << s.shape->s << '\n';
        break;
      default:
        break;
    }
    os << "     because: " << s.citation << '\n';
    os << "     replay: " << (replay_step(s) ? "ok" : "FAILED") << '\n';
  }
  return os.str();
}

struct SurveyRow {
  std::string name;
  std::uint64_t order = 0;
  bool cyclic = false;
  std::optional<Verdict> verdict;
  std::optional<std::string> error;  // InternalContradiction or another failure
};

struct SurveyReport {
  std::uint64_t b2 = 0;
  std::vector<SurveyRow> rows;

  std::size_t count(VerdictKind k) const {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [&](const SurveyRow& r) { return r.verdict && r.verdict->kind == k; }));
  }
  std::size_t errors() const {
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SurveyRow& r) { return r.error.has_value(); }));
  }
  /// CyclicSemifree exactly for cyclic groups, everything else Excluded.
  bool consistent() const {
    for (const auto& r : rows) {
      if (r.error || !r.verdict) return false;
      const auto want = r.cyclic ? VerdictKind::CyclicSemifree : VerdictKind::Excluded;
      if (r.verdict->kind != want) return false;
      if (r.cyclic && r.verdict->fixed_points != b2 + 2) return false;
    }
    return true;
  }
};

/// Rows come back in catalog order whatever the thread count.
inline SurveyReport survey(const std::vector<CatalogEntry>& entries, std::uint64_t b2, unsigned threads = 0) {
  if (b2 < 3) fail(ErrorKind::InvalidParameters, "survey needs b2 >= 3");
  SurveyReport report;
  report.b2 = b2;
  report.rows.resize(entries.size());
  Engine engine;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < entries.size(); i = next++) {
      SurveyRow& row = report.rows[i];
      row.name = entries[i].name;
      row.order = entries[i].group.order();
      row.cyclic = entries[i].group.is_cyclic();
      try {
        row.verdict = engine.decide(entries[i].group, b2);
      } catch (const Error& e) {
        row.error = e.what();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, entries.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return report;
}

}  // namespace pseudofree
