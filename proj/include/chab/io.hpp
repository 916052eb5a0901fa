#pragma once

#include <cstdio>
#include <json.hpp>
#include <string>
#include <variant>
#include <vector>

#include "chab/coset_table.hpp"
#include "chab/error.hpp"
#include "chab/folner.hpp"
#include "chab/parse.hpp"
#include "chab/permrep.hpp"
#include "chab/rational.hpp"
#include "chab/stallings.hpp"
#include "chab/subgroup.hpp"
#include "chab/word.hpp"

namespace chab {

// nlohmann::json with std::map storage keeps object keys sorted, which makes
// every emitted document byte-stable.
using Json = nlohmann::json;

inline Json to_json(CosetTable const& t) {
  Json rows = Json::array();
  for (int c = 0; c < t.index(); ++c) {
    Json row = Json::array();
    for (int col = 0; col < t.width(); ++col) row.push_back(t.entry(c, col));
    rows.push_back(std::move(row));
  }
  return Json{{"presentation", to_text(t.presentation())},
              {"index", t.index()},
              {"table", std::move(rows)}};
}

inline CosetTable table_from_json(Json const& j) {
  auto pres = std::make_shared<const Presentation>(
      parse_presentation(j.at("presentation").get<std::string>()));
  int n = j.at("index").get<int>();
  std::vector<std::int32_t> tab;
  for (auto const& row : j.at("table"))
    for (auto const& v : row) tab.push_back(v.get<std::int32_t>());
  if (static_cast<int>(tab.size()) != n * 2 * static_cast<int>(pres->rank()))
    throw Error("BadTable", "table shape does not match presentation and index");
  CosetTable t(pres, n, std::move(tab));
  if (auto defect = validate(t); !defect.empty())
    throw Error("BadTable", "invalid coset table: " + defect);
  return t;
}

inline Json to_json(CoreGraph const& g) {
  Json rows = Json::array();
  for (int v = 0; v < g.vertex_count(); ++v) {
    Json row = Json::array();
    for (int i = 0; i < g.rank(); ++i) {
      row.push_back(g.out(v, i));
      row.push_back(g.in(v, i));
    }
    rows.push_back(std::move(row));
  }
  return Json{{"presentation", to_text(g.presentation())},
              {"vertices", g.vertex_count()},
              {"complete", g.complete()},
              {"table", std::move(rows)}};
}

inline CoreGraph core_from_json(Json const& j) {
  auto pres = std::make_shared<const Presentation>(
      parse_presentation(j.at("presentation").get<std::string>()));
  int n = j.at("vertices").get<int>();
  int m = static_cast<int>(pres->rank());
  std::vector<std::int32_t> succ(n * m, -1), pred(n * m, -1);
  auto const& rows = j.at("table");
  if (static_cast<int>(rows.size()) != n)
    throw Error("BadTable", "vertex count does not match table");
  for (int v = 0; v < n; ++v)
    for (int i = 0; i < m; ++i) {
      succ[v * m + i] = rows[v][2 * i].get<std::int32_t>();
      pred[v * m + i] = rows[v][2 * i + 1].get<std::int32_t>();
    }
  return CoreGraph(pres, n, std::move(succ), std::move(pred));
}

inline Json to_json(SubgroupHandle const& h) {
  if (h.is_table()) return Json{{"kind", "table"}, {"value", to_json(h.table())}};
  return Json{{"kind", "core"}, {"value", to_json(h.core())}};
}

inline SubgroupHandle handle_from_json(Json const& j) {
  auto kind = j.at("kind").get<std::string>();
  if (kind == "table") return SubgroupHandle(table_from_json(j.at("value")));
  if (kind == "core") return SubgroupHandle(core_from_json(j.at("value")));
  throw Error("BadHandle", "unknown subgroup handle kind '" + kind + "'");
}

inline Json to_json(MembershipConstraint const& c, Alphabet const& alphabet) {
  Json contain = Json::array(), exclude = Json::array();
  for (auto const& w : c.must_contain) contain.push_back(to_text(w, alphabet));
  for (auto const& w : c.must_exclude) exclude.push_back(to_text(w, alphabet));
  return Json{{"must_contain", std::move(contain)}, {"must_exclude", std::move(exclude)}};
}

inline MembershipConstraint constraint_from_json(Json const& j, Alphabet const& alphabet) {
  MembershipConstraint c;
  for (auto const& w : j.at("must_contain"))
    c.must_contain.push_back(parse_word(w.get<std::string>(), alphabet));
  for (auto const& w : j.at("must_exclude"))
    c.must_exclude.push_back(parse_word(w.get<std::string>(), alphabet));
  return c;
}

inline Json to_json(CertificateReport const& r) {
  return Json{{"status", r.pass ? "pass" : "fail"},
              {"handle_satisfies", r.handle_satisfies},
              {"offenders", r.offenders},
              {"collisions", r.collisions}};
}

inline Json to_json(FolnerReport const& r, Alphabet const& alphabet) {
  Json ratios = Json::object();
  for (auto const& [w, ratio] : r.ratios) ratios[to_text(w, alphabet)] = ratio.str();
  return Json{{"F", r.set},
              {"ratios", std::move(ratios)},
              {"max_ratio", r.max_ratio.str()},
              {"epsilon", r.epsilon.str()},
              {"pass", r.pass}};
}

inline Json to_json(FolnerSearchResult const& r, Alphabet const& alphabet) {
  Json out{{"found", r.found}, {"max_size", r.budget}};
  if (r.found) {
    out["F"] = r.set;
    out["report"] = to_json(r.report, alphabet);
  }
  return out;
}

inline Json to_json(BsProbeReport const& r) {
  Json quotients = Json::array();
  for (auto const& q : r.quotients)
    quotients.push_back(Json{{"index", q.index},
                             {"order_s", q.order_s},
                             {"quotient_order", q.quotient_order},
                             {"coprime", q.coprime}});
  return Json{{"n", r.n},
              {"max_index", r.max_index},
              {"pass", r.pass},
              {"nontrivial_witness", r.nontrivial_witness},
              {"quotients", std::move(quotients)}};
}

inline Json to_json(PermRep const& r) {
  Json comps = Json::array();
  for (auto const& [comp, mult] : r.components()) {
    Json entry{{"multiplicity", mult}};
    if (auto const* fin = std::get_if<FiniteOrbit>(&comp)) {
      entry["kind"] = "finite";
      entry["table"] = to_json(fin->table);
    } else {
      auto const& lazy = std::get<LazyOrbit>(comp);
      entry["kind"] = "lazy";
      entry["subgroup"] = to_json(lazy.handle);
      entry["radius"] = lazy.radius;
    }
    comps.push_back(std::move(entry));
  }
  return Json{{"presentation", to_text(r.presentation())},
              {"window", r.window_size()},
              {"components", std::move(comps)}};
}

inline PermRep rep_from_json(Json const& j) {
  auto pres = std::make_shared<const Presentation>(
      parse_presentation(j.at("presentation").get<std::string>()));
  std::vector<std::pair<Component, int>> comps;
  for (auto const& entry : j.at("components")) {
    int mult = entry.at("multiplicity").get<int>();
    auto kind = entry.at("kind").get<std::string>();
    if (kind == "finite") {
      comps.emplace_back(detail::make_finite_orbit(table_from_json(entry.at("table"))),
                         mult);
    } else if (kind == "lazy") {
      comps.emplace_back(detail::make_lazy_orbit(handle_from_json(entry.at("subgroup")),
                                                 entry.at("radius").get<int>()),
                         mult);
    } else {
      throw Error("BadRep", "unknown component kind '" + kind + "'");
    }
  }
  return PermRep(std::move(pres), std::move(comps));
}

/// Window dump: per-generator image arrays, -1 beyond the truncation.
inline Json to_json(WindowAction const& w) {
  Json action = Json::object();
  for (std::size_t g = 0; g < w.presentation().rank(); ++g) {
    auto const& name = w.presentation().alphabet().name(g);
    action[name] = w.columns()[2 * g];
    action[name + "^-1"] = w.columns()[2 * g + 1];
  }
  return Json{{"presentation", to_text(w.presentation())},
              {"window", w.size()},
              {"action", std::move(action)}};
}

// -- DOT export ------------------------------------------------------------

namespace detail {

inline void dot_header(std::string& out, std::string const& name) {
  out += "digraph " + name + " {\n  rankdir=LR;\n  node [shape=circle];\n";
  out += "  0 [shape=doublecircle];\n";
}

}  // namespace detail

/// Schreier graph of a coset table: one labeled edge per positive generator
/// column, basepoint double-circled.
inline std::string to_dot(CosetTable const& t) {
  std::string out;
  detail::dot_header(out, "cosets");
  for (int c = 0; c < t.index(); ++c)
    for (std::size_t g = 0; g < t.presentation().rank(); ++g)
      out += "  " + std::to_string(c) + " -> "
             + std::to_string(t.entry(c, 2 * static_cast<int>(g))) + " [label=\""
             + t.presentation().alphabet().name(g) + "\"];\n";
  out += "}\n";
  return out;
}

inline std::string to_dot(CoreGraph const& g) {
  std::string out;
  detail::dot_header(out, "core");
  for (int v = 0; v < g.vertex_count(); ++v)
    for (int i = 0; i < g.rank(); ++i)
      if (g.out(v, i) >= 0)
        out += "  " + std::to_string(v) + " -> " + std::to_string(g.out(v, i))
               + " [label=\"" + g.presentation().alphabet().name(i) + "\"];\n";
  out += "}\n";
  return out;
}

/// Action graph of a materialized window: points as nodes, generator-labeled
/// edges, truncation boundaries omitted.
inline std::string to_dot(WindowAction const& w) {
  std::string out;
  detail::dot_header(out, "window");
  for (int x = 0; x < w.size(); ++x)
    for (std::size_t g = 0; g < w.presentation().rank(); ++g) {
      int t = w.columns()[2 * g][x];
      if (t >= 0)
        out += "  " + std::to_string(x) + " -> " + std::to_string(t) + " [label=\""
               + w.presentation().alphabet().name(g) + "\"];\n";
    }
  out += "}\n";
  return out;
}

inline std::string to_dot(PermRep const& r) { return to_dot(materialize(r)); }

// -- CSV and hashing --------------------------------------------------------

/// FNV-1a fingerprint of a canonical table, printed as 16 hex digits.
inline std::string canonical_hash(CosetTable const& t) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ull;
  };
  mix(static_cast<std::uint64_t>(t.index()));
  for (auto v : t.raw()) mix(static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// One row per table: index, canonical hash.
inline std::string to_csv(std::vector<CosetTable> const& tables) {
  std::string out = "index,hash\n";
  for (auto const& t : tables)
    out += std::to_string(t.index()) + "," + canonical_hash(t) + "\n";
  return out;
}

}  // namespace chab
