#pragma once

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pseudofree/borel.hpp"
#include "pseudofree/catalog.hpp"
#include "pseudofree/cohomology.hpp"
#include "pseudofree/config.hpp"
#include "pseudofree/engine.hpp"
#include "pseudofree/forms.hpp"
#include "pseudofree/group_spec.hpp"
#include "pseudofree/lattice.hpp"
#include "pseudofree/resolution.hpp"
#include "pseudofree/serialize.hpp"

namespace pseudofree {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitResource = 3, kExitContradiction = 4 };

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InternalContradiction: return kExitContradiction;
    case ErrorKind::OrderCapExceeded:
    case ErrorKind::ResourceBound:
    case ErrorKind::SearchBound: return kExitResource;
    default: return kExitUsage;
  }
}

/// Z, ZG (or Z[G]), or Z[G/H:spec]. A named H picks the first subgroup of G
/// in lattice order isomorphic to it; a perm: H must be generated by
/// elements of G.
inline CoefficientModule parse_coefficients(const SubgroupLattice& lat, const std::string& text, std::size_t order_cap) {
  if (text == "Z") return CoefficientModule::trivial();
  if (text == "ZG" || text == "Z[G]") return CoefficientModule::group_ring();
  const std::string head = "Z[G/H:";
  if (text.size() <= head.size() + 1 || text.compare(0, head.size(), head) != 0 || text.back() != ']')
    throw ParseError(ErrorKind::SyntaxError, 0, "coefficients are Z, ZG or Z[G/H:spec], got '" + text + "'");
  const std::string inner = text.substr(head.size(), text.size() - head.size() - 1);
  GroupSpecAST ast;
  try {
    ast = parse_group_spec(inner);
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), head.size() + e.offset(), std::string("in subgroup spec: ") + e.what());
  }
  const PermGroup& g = lat.group();
  if (ast.kind == GroupSpecAST::Kind::Permutations) {
    std::vector<std::size_t> gens;
    for (const auto& cycles : ast.perms) {
      std::optional<std::size_t> i;
      try {
        i = g.index_of(Permutation::from_cycles(g.degree(), cycles));
      } catch (const Error&) {
      }
      if (!i) throw ParseError(ErrorKind::SemanticError, head.size(), "a generator of H is not in G");
      gens.push_back(*i);
    }
    return CoefficientModule::permutation(lat, g.closure(gens));
  }
  const PermGroup h = build_group(ast, order_cap);
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (lat[i].order == h.order() && isomorphic(lat.as_group(i), h)) return CoefficientModule::permutation(lat, i);
  throw ParseError(ErrorKind::SemanticError, head.size(), "G has no subgroup isomorphic to " + ast.to_string());
}

inline IntersectionForm parse_form_argument(const std::string& text) {
  const auto start = text.find_first_not_of(" \t");
  if (start != std::string::npos && text[start] == '[') {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(ErrorKind::SyntaxError, e.byte == 0 ? 0 : e.byte - 1, "form matrix is not valid JSON");
    }
    try {
      return IntersectionForm(j.get<FormMatrix>(), "custom");
    } catch (const json::exception&) {
      throw ParseError(ErrorKind::SyntaxError, 0, "form matrix must be an array of integer rows");
    }
  }
  return parse_form_name(text);
}

namespace detail {

inline std::string profile_text(const SingularProfile& s) {
  return "(" + std::to_string(s.x1) + "," + std::to_string(s.xp) + "," + std::to_string(s.xq) + ")";
}

struct CommandContext {
  RunConfig config;
  std::ostream& out;
  bool json() const { return config.format == OutputFormat::Json; }
  void emit(const pseudofree::json& j) const { out << j.dump(2) << '\n'; }
};

inline int cmd_analyze(const CommandContext& ctx, const std::string& spec, std::uint64_t b2) {
  const PermGroup g = parse_group(spec, ctx.config.order_cap);
  const Verdict v = decide_pseudofree(g, b2);
  const bool replayed = replay_verdict(v);
  if (ctx.json()) {
    ctx.emit({{"spec", spec}, {"verdict", v}, {"replayed", replayed}});
  } else {
    ctx.out << explain(v);
    ctx.out << "trace replay: " << (replayed ? "ok" : "FAILED") << '\n';
  }
  return replayed ? kExitOk : kExitContradiction;
}

inline int cmd_cohomology(const CommandContext& ctx, const std::string& spec, const std::string& coeff_text,
                          int max_degree, bool verify) {
  if (max_degree < 0) fail(ErrorKind::InvalidParameters, "--max-degree must be nonnegative");
  const PermGroup g = parse_group(spec, ctx.config.order_cap);
  const SubgroupLattice lat(g);
  const CoefficientModule coeff = parse_coefficients(lat, coeff_text, ctx.config.order_cap);
  auto oracle = [&] {
    if (max_degree > ctx.config.oracle_degree_cap)
      fail(ErrorKind::ResourceBound, "oracle degree " + std::to_string(max_degree) + " exceeds oracle_degree_cap " +
                                         std::to_string(ctx.config.oracle_degree_cap));
    auto t = oracle_cohomology(g, coeff, max_degree, OracleMethod::Auto, ctx.config.oracle);
    t.group = describe(lat);
    t.coefficients = coeff.to_string();
    return t;
  };
  std::string source = "formula";
  auto table = formula_table(lat, coeff, max_degree);
  if (!table) {
    source = "oracle";
    table = oracle();
  }
  std::optional<bool> verified;
  if (verify) verified = source == "oracle" || oracle().same_entries(*table);
  if (ctx.json()) {
    ctx.emit({{"spec", spec}, {"table", *table}, {"source", source}, {"verified", detail::optional_json(verified)}});
  } else {
    ctx.out << "H^*(" << table->group << "; " << table->coefficients << "), degrees 0.." << max_degree << ": "
            << table->to_string() << '\n';
    if (table->period) ctx.out << "period: " << *table->period << '\n';
    ctx.out << "source: " << source << '\n';
    if (verified) ctx.out << "verified: " << (*verified ? "true" : "false") << '\n';
  }
  return verified.value_or(true) ? kExitOk : kExitContradiction;
}

inline int cmd_dichotomy(const CommandContext& ctx, const std::string& spec) {
  const PermGroup g = parse_group(spec, ctx.config.order_cap);
  const SubgroupLattice lat(g);
  const DichotomyResult d = maximal_dichotomy(lat);
  const CountingReport c = dichotomy_counting_check(lat);
  if (ctx.json()) {
    ctx.emit({{"spec", spec}, {"group", describe(lat)}, {"dichotomy", to_json_value(lat, d)}, {"counting", to_json_value(c)}});
    return kExitOk;
  }
  ctx.out << describe(lat) << " (order " << g.order() << ")\n";
  if (d.kind == DichotomyKind::NormalMaximal) {
    ctx.out << "normal maximal subgroup: #" << d.first << ' ' << describe(SubgroupLattice(lat.as_group(d.first))) << '\n';
  } else {
    ctx.out << "intersecting maximal subgroups: #" << d.first << ' ' << describe(SubgroupLattice(lat.as_group(d.first)))
            << " and #" << d.second << ' ' << describe(SubgroupLattice(lat.as_group(d.second))) << ", sharing "
            << g.element(d.witness).to_string() << '\n';
  }
  ctx.out << "counting identity: " << to_string(c.status);
  if (c.status == CountingStatus::NotApplicable) ctx.out << " (" << c.reason << ")";
  else ctx.out << ", 1 - 1/|G| = " << rational_text(c.lhs) << " vs " << rational_text(c.rhs)
               << (c.contradiction ? " (contradiction)" : "");
  ctx.out << '\n';
  return kExitOk;
}

inline int cmd_orbits(const CommandContext& ctx, std::uint64_t p, std::uint64_t q, std::uint64_t b2) {
  const auto solution = orbit_structure_solve(p, q, b2);
  const auto tables = MetacyclicTables::for_primes(p, q, static_cast<int>(4 * q + 2));
  std::optional<AccountingReport> report;
  if (solution) report = accounting_consistency(*tables, *solution, b2, {static_cast<int>(4 * q), static_cast<int>(4 * q + 2)});
  if (ctx.json()) {
    ctx.emit({{"p", p}, {"q", q}, {"b2", b2}, {"solution", detail::optional_json(solution)}, {"accounting", detail::optional_json(report)}});
    return kExitOk;
  }
  if (solution) {
    ctx.out << "(x1,xp,xq) = " << profile_text(*solution) << '\n';
    for (const auto& c : report->checks)
      ctx.out << "  degree " << c.degree << ": |H(X_G)| = " << c.collapsed.to_string()
              << ", |H(S_G)| = " << c.singular.to_string() << (c.match ? "  match" : "  MISMATCH") << '\n';
  } else {
    ctx.out << "no nonnegative orbit structure for b2 = " << b2 << '\n';
  }
  return kExitOk;
}

inline int cmd_collapse(const CommandContext& ctx, std::uint64_t p, const std::string& form_text, std::optional<std::uint64_t> b2) {
  const IntersectionForm form = parse_form_argument(form_text);
  const CollapseVerdict v = collapse_guaranteed(reduce_mod_p(form, p), ctx.config.search_cap);
  std::optional<std::uint64_t> fixed;
  if (b2) fixed = elemabel_fixed_points(p, form, *b2, ctx.config.search_cap);
  if (ctx.json()) {
    json j = {{"form", form.name()}, {"rank", form.rank()}, {"verdict", v}};
    if (b2) j["fixed_points"] = detail::optional_json(fixed);
    ctx.emit(j);
    return kExitOk;
  }
  ctx.out << form.name() << " mod " << p << ": " << to_string(v.outcome) << " (" << to_string(v.reason) << ")\n";
  if (v.witness) {
    ctx.out << "  witness u = (";
    for (std::size_t i = 0; i < v.witness->size(); ++i) ctx.out << (i ? "," : "") << (*v.witness)[i];
    ctx.out << ")\n";
  }
  if (b2) {
    if (fixed) ctx.out << "  C_" << p << " x C_" << p << " fixed set: " << *fixed << " isolated points\n";
    else ctx.out << "  collapse not guaranteed; fixed point count undetermined\n";
  }
  return kExitOk;
}

inline int cmd_survey(const CommandContext& ctx, std::uint64_t max_order, std::uint64_t b2, bool include_s5) {
  const auto entries = catalog(max_order, include_s5);
  const auto report = survey(entries, b2, ctx.config.threads);
  bool contradiction = false;
  for (const auto& r : report.rows)
    if (r.error && r.error->rfind(to_string(ErrorKind::InternalContradiction), 0) == 0) contradiction = true;
  if (ctx.json()) {
    ctx.emit(report);
  } else {
    std::size_t width = 4;
    for (const auto& r : report.rows) width = std::max(width, r.name.size());
    ctx.out << std::left << std::setw(static_cast<int>(width)) << "group" << "  order  cyclic  verdict              steps\n";
    for (const auto& r : report.rows) {
      ctx.out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(5) << r.order << "  "
              << std::setw(6) << (r.cyclic ? "yes" : "no") << "  ";
      if (r.verdict) ctx.out << std::setw(19) << r.verdict->summary() << "  " << r.verdict->trace.size() << '\n';
      else ctx.out << "error: " << *r.error << '\n';
    }
    ctx.out << report.rows.size() << " groups, " << report.count(VerdictKind::CyclicSemifree) << " cyclic semifree, "
            << report.count(VerdictKind::Excluded) << " excluded, " << report.errors() << " errors; "
            << (report.consistent() ? "consistent with the theorem" : "INCONSISTENT") << '\n';
  }
  if (contradiction || (report.errors() == 0 && !report.consistent())) return kExitContradiction;
  return report.errors() ? kExitResource : kExitOk;
}

inline int cmd_lattice(const CommandContext& ctx, const std::string& spec) {
  const PermGroup g = parse_group(spec, ctx.config.order_cap);
  const SubgroupLattice lat(g);
  const auto& maxes = lat.maximal();
  auto is_max = [&](std::size_t i) { return std::find(maxes.begin(), maxes.end(), i) != maxes.end(); };
  if (ctx.json()) {
    json rows = json::array();
    for (std::size_t i = 0; i < lat.size(); ++i)
      rows.push_back({{"index", i},
                      {"order", lat[i].order},
                      {"name", describe(SubgroupLattice(lat.as_group(i)))},
                      {"label", lat[i].label},
                      {"class", lat.class_of(i)},
                      {"normal", lat.is_normal(i)},
                      {"maximal", is_max(i)}});
    ctx.emit({{"spec", spec}, {"group", describe(lat)}, {"order", g.order()}, {"subgroups", rows},
              {"classes", lat.conjugacy_classes().size()}});
    return kExitOk;
  }
  ctx.out << describe(lat) << " (order " << g.order() << "): " << lat.size() << " subgroups in "
          << lat.conjugacy_classes().size() << " conjugacy classes\n";
  for (std::size_t i = 0; i < lat.size(); ++i)
    ctx.out << "  #" << i << "  order " << lat[i].order << "  " << describe(SubgroupLattice(lat.as_group(i)))
            << "  class " << lat.class_of(i) << (lat.is_normal(i) ? "  normal" : "") << (is_max(i) ? "  maximal" : "")
            << '\n';
  return kExitOk;
}

}  // namespace detail

/// Runs one invocation; args exclude the program name. Returns the exit code.
inline int run_command(const std::vector<std::string>& args, RunConfig config, std::ostream& out, std::ostream& err) {
  CLI::App app{"Obstructions to pseudofree group actions on 4-manifolds", "pseudofree"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");
  std::string format, config_path;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  app.add_option("--config", config_path, "key=value config file (overrides $PSEUDOFREE_CONFIG)");

  std::string spec, coeff = "Z", form;
  std::uint64_t b2 = 3, p = 0, q = 0, max_order = 64;
  int max_degree = 4;
  bool verify = false, no_s5 = false;
  std::optional<std::uint64_t> form_b2;

  auto* analyze = app.add_subcommand("analyze", "Decide which verdict the theorem gives for G and explain the trace");
  analyze->add_option("spec", spec, "Group spec, e.g. \"Q(8)\" or \"perm: (1 2 3), (1 2)\"")->required();
  analyze->add_option("--b2", b2, "Second Betti number of X")->required();

  auto* cohomology = app.add_subcommand("cohomology", "Integral cohomology table of G");
  cohomology->add_option("spec", spec, "Group spec")->required();
  cohomology->add_option("--coeff", coeff, "Z, ZG or Z[G/H:spec]")->capture_default_str();
  cohomology->add_option("--max-degree", max_degree, "Highest degree")->capture_default_str();
  cohomology->add_flag("--verify", verify, "Cross-check the formula table against the resolution oracle");

  auto* dichotomy = app.add_subcommand("dichotomy", "Normal maximal subgroup or intersecting maximal pair");
  dichotomy->add_option("spec", spec, "Group spec")->required();

  auto* orbits = app.add_subcommand("orbits", "Solve the orbit-count equations for a nonabelian group of order pq");
  orbits->add_option("--p", p, "Prime p (normal Sylow)")->required();
  orbits->add_option("--q", q, "Prime q dividing p - 1")->required();
  orbits->add_option("--b2", b2, "Second Betti number m")->required();

  auto* collapse = app.add_subcommand("collapse", "Check the mod-p collapse criterion for an intersection form");
  collapse->add_option("--p", p, "Prime p")->required();
  collapse->add_option("--form", form, "Form name (diag:+1,-1 | H*k | E8 | sums with +) or a JSON matrix")->required();
  collapse->add_option("--b2", form_b2, "Also report the C_p x C_p fixed point count for this b2");

  auto* survey_cmd = app.add_subcommand("survey", "Run the decision over the group catalog");
  survey_cmd->add_option("--max-order", max_order, "Largest order of the named families")->capture_default_str();
  survey_cmd->add_option("--b2", b2, "Second Betti number (>= 3)")->required();
  survey_cmd->add_flag("--no-s5", no_s5, "Leave out the subgroups of S(5)");

  auto* lattice = app.add_subcommand("lattice", "List all subgroups of G");
  lattice->add_option("spec", spec, "Group spec")->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (!config_path.empty()) config = load_config_file(config_path, config);
    if (format == "json") config.format = OutputFormat::Json;
    if (format == "text") config.format = OutputFormat::Text;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const detail::CommandContext ctx{config, out};
  try {
    if (*analyze) return detail::cmd_analyze(ctx, spec, b2);
    if (*cohomology) return detail::cmd_cohomology(ctx, spec, coeff, max_degree, verify);
    if (*dichotomy) return detail::cmd_dichotomy(ctx, spec);
    if (*orbits) return detail::cmd_orbits(ctx, p, q, b2);
    if (*collapse) return detail::cmd_collapse(ctx, p, form, form_b2);
    if (*survey_cmd) return detail::cmd_survey(ctx, max_order, b2, !no_s5);
    if (*lattice) return detail::cmd_lattice(ctx, spec);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    if (ctx.json()) {
      json j = {{"error", {{"kind", to_string(e.kind())}, {"message", e.what()}, {"exit_code", code}}}};
      if (auto* pe = dynamic_cast<const ParseError*>(&e)) j["error"]["offset"] = pe->offset();
      ctx.emit(j);
    } else {
      err << "error: " << e.what() << '\n';
    }
    return code;
  }
  return kExitUsage;
}

}  // namespace pseudofree
