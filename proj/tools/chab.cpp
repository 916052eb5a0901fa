// chab: command-line access to the subgroup-space toolkit. Every subcommand
// is a pure function of its flags plus the shared configuration; output is
// deterministic (sorted JSON keys, exact rationals as "p/q").
//
// Exit codes: 0 success, 1 domain error (structured JSON on stdout),
// 2 usage error.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chab/folner.hpp"
#include "chab/io.hpp"
#include "chab/low_index.hpp"
#include "chab/parse.hpp"
#include "chab/permrep.hpp"
#include "chab/stallings.hpp"
#include "chab/subgroup.hpp"
#include "chab/todd_coxeter.hpp"

namespace {

using namespace chab;

struct RunConfig {
  int max_cosets = 65536;
  int max_index = 4;
  int copies = 3;
  int radius = 6;
  std::string epsilon = "1/4";
  int max_size = 64;
  long long node_budget = 200'000'000;
  unsigned seed = 0;  // reserved for fixture-generation commands
  std::string format = "json";
};

struct Output {
  Json json;
  std::string dot;   // set by graph-bearing commands
  std::string csv;   // set by list commands
  std::string text;  // set by report commands
};

void emit(Output const& out, std::string const& format) {
  if (format == "json") {
    std::cout << out.json.dump(2) << "\n";
  } else if (format == "dot") {
    if (out.dot.empty()) throw err::unsupported_format("dot");
    std::cout << out.dot;
  } else if (format == "csv") {
    if (out.csv.empty()) throw err::unsupported_format("csv");
    std::cout << out.csv;
  } else if (format == "text") {
    if (out.text.empty()) throw err::unsupported_format("text");
    std::cout << out.text << "\n";
  } else {
    throw err::unsupported_format(format);
  }
}

PresentationPtr load_group(std::string const& text) {
  return std::make_shared<const Presentation>(parse_presentation(text));
}

// --rep and --in accept inline JSON or @path-to-file.
Json load_json_arg(std::string const& arg) {
  std::string text = arg;
  if (!arg.empty() && arg[0] == '@') {
    std::ifstream in(arg.substr(1));
    if (!in) throw Error("FileNotFound", "cannot open '" + arg.substr(1) + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  try {
    return Json::parse(text);
  } catch (std::exception const& e) {
    throw Error("BadJson", e.what());
  }
}

std::vector<int> parse_points(std::string const& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string piece;
  while (std::getline(ss, piece, ','))
    if (piece.find_first_not_of(" \t") != std::string::npos) out.push_back(std::stoi(piece));
  return out;
}

// Membership handle from subgroup generator words: Stallings core over a
// free presentation, coset enumeration otherwise. Enumeration overflow is
// surfaced as a structured error.
SubgroupHandle make_handle(PresentationPtr const& pres, std::vector<Word> const& gens,
                           RunConfig const& cfg) {
  if (pres->is_free()) return SubgroupHandle(fold(pres, gens));
  auto table = todd_coxeter(pres, gens, cfg.max_cosets);
  if (!table)
    throw Error("Overflow", "coset enumeration exceeded the budget of "
                                + std::to_string(cfg.max_cosets) + " cosets");
  return SubgroupHandle(std::move(*table));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chab: subgroups of finitely presented groups, coset tables, "
               "Stallings graphs, permutation representations and Folner sets"};
  app.require_subcommand(1);
  app.footer(
      "Syntax: presentations are \"<g1,g2,...| r1, r2, ...>\" and words multiply\n"
      "with '*' or juxtaposition, take '^' integer powers ('x^-1' is the inverse),\n"
      "group with parentheses, and write the identity as '1'; relators may be\n"
      "equations (lhs = rhs). Configuration flags may also come from a --config\n"
      "key=value file or from CHAB_* environment variables (flags win over the\n"
      "file, the file over the environment). Exact rationals are written \"p/q\".\n"
      "Exit codes: 0 success, 1 domain error (structured JSON), 2 usage error.");

  RunConfig cfg;
  app.set_config("--config")->description("key=value configuration file");
  app.add_option("--max-cosets", cfg.max_cosets, "coset enumeration budget")
      ->envname("CHAB_MAX_COSETS")
      ->capture_default_str();
  app.add_option("--max-index", cfg.max_index, "subgroup index bound")
      ->envname("CHAB_MAX_INDEX")
      ->capture_default_str();
  app.add_option("--copies", cfg.copies, "orbit copies in truncated tau*")
      ->envname("CHAB_COPIES")
      ->capture_default_str();
  app.add_option("--radius", cfg.radius, "expansion radius for infinite orbits")
      ->envname("CHAB_RADIUS")
      ->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "Folner tolerance, exact rational p/q")
      ->envname("CHAB_EPSILON")
      ->capture_default_str();
  app.add_option("--max-size", cfg.max_size, "Folner search size budget")
      ->envname("CHAB_MAX_SIZE")
      ->capture_default_str();
  app.add_option("--node-budget", cfg.node_budget, "low-index search node budget")
      ->envname("CHAB_NODE_BUDGET")
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for fixture generation (reserved)")
      ->envname("CHAB_SEED")
      ->capture_default_str();
  app.add_option("--format", cfg.format, "output format: json, dot, csv, text")
      ->envname("CHAB_FORMAT")
      ->capture_default_str();

  std::string group_text, subgroup_text, other_text, element_text, omega_text;
  std::string rep_arg, word_text, set_text, cert_arg, in_arg;
  std::string subgroups_text, classes_text;
  std::string sigma_arg, tau_arg, s_words_text, t_words_text, locality_text;
  int point = 0, bs_n = 2;
  int universe_max_index = -1;

  Output out;

  auto* parse_cmd = app.add_subcommand("parse", "parse and echo a presentation");
  parse_cmd->add_option("--group", group_text)->required();
  parse_cmd->callback([&] {
    auto pres = load_group(group_text);
    Json gens = Json::array(), rels = Json::array();
    for (auto const& n : pres->alphabet().names()) gens.push_back(n);
    for (auto const& r : pres->relators()) rels.push_back(to_text(r, pres->alphabet()));
    out.json = Json{{"presentation", to_text(*pres)},
                    {"generators", gens},
                    {"relators", rels}};
    out.text = to_text(*pres);
  });

  auto* cosets_cmd = app.add_subcommand("cosets", "coset table of <subgroup>");
  cosets_cmd->add_option("--group", group_text)->required();
  cosets_cmd->add_option("--subgroup", subgroup_text);
  cosets_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto table =
        todd_coxeter(pres, parse_words(subgroup_text, pres->alphabet()), cfg.max_cosets);
    if (!table) {
      out.json = Json{{"overflow", true}, {"max_cosets", cfg.max_cosets}};
      out.text = "overflow(" + std::to_string(cfg.max_cosets) + ")";
      return;
    }
    out.json = to_json(*table);
    out.dot = to_dot(*table);
    out.text = "index " + std::to_string(table->index());
  });

  auto* low_cmd = app.add_subcommand("low-index", "all subgroups of index <= bound");
  low_cmd->add_option("--group", group_text)->required();
  low_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto tables = low_index(pres, cfg.max_index, cfg.node_budget);
    Json list = Json::array();
    for (auto const& t : tables) list.push_back(to_json(t));
    out.json = Json{{"count", tables.size()}, {"tables", std::move(list)}};
    out.csv = to_csv(tables);
    out.text = std::to_string(tables.size()) + " subgroups";
  });

  auto* over_cmd = app.add_subcommand("overgroups", "the envelope of a subgroup");
  over_cmd->add_option("--group", group_text)->required();
  over_cmd->add_option("--subgroup", subgroup_text);
  over_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    auto tables = overgroups(h.as_table());
    Json list = Json::array();
    for (auto const& t : tables) list.push_back(to_json(t));
    out.json = Json{{"count", tables.size()}, {"overgroups", std::move(list)}};
    out.csv = to_csv(tables);
  });

  auto* fold_cmd = app.add_subcommand("fold", "Stallings core graph of a subgroup");
  fold_cmd->add_option("--group", group_text)->required();
  fold_cmd->add_option("--subgroup", subgroup_text);
  fold_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto core = fold(pres, parse_words(subgroup_text, pres->alphabet()));
    out.json = to_json(core);
    out.dot = to_dot(core);
  });

  auto* member_cmd = app.add_subcommand("member", "membership test");
  member_cmd->add_option("--group", group_text)->required();
  member_cmd->add_option("--subgroup", subgroup_text);
  member_cmd->add_option("--element", element_text)->required();
  member_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    bool yes = h.member(parse_word(element_text, pres->alphabet()));
    out.json = Json{{"element", element_text}, {"member", yes}};
    out.text = yes ? "true" : "false";
  });

  auto* sep_cmd = app.add_subcommand(
      "separate", "finite-index subgroup containing <subgroup> but not <element>");
  sep_cmd->add_option("--group", group_text)->required();
  sep_cmd->add_option("--subgroup", subgroup_text);
  sep_cmd->add_option("--element", element_text)->required();
  sep_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto gens = parse_words(subgroup_text, pres->alphabet());
    auto g = parse_word(element_text, pres->alphabet());
    auto core = fold(pres, gens);
    auto sep = hall_separate(core, g);
    auto table = core_to_table(sep);
    bool contains_all = true;
    for (auto const& s : gens)
      contains_all = contains_all && contains(sep, s) && table.coset_of(s) == 0;
    bool excludes = !contains(sep, g) && table.coset_of(g) != 0;
    out.json = Json{{"separator", to_json(sep)},
                    {"index", sep.vertex_count()},
                    {"verified", Json{{"contains_subgroup", contains_all},
                                      {"excludes_element", excludes},
                                      {"finite_index", sep.complete()}}}};
    out.dot = to_dot(sep);
    out.text = "index " + std::to_string(sep.vertex_count());
  });

  auto* conj_cmd = app.add_subcommand("conjugate", "handle of g H g^-1");
  conj_cmd->add_option("--group", group_text)->required();
  conj_cmd->add_option("--subgroup", subgroup_text);
  conj_cmd->add_option("--element", element_text)->required();
  conj_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    out.json = to_json(conjugate(h, parse_word(element_text, pres->alphabet())));
  });

  auto* window_cmd =
      app.add_subcommand("window", "Chabauty window test: K in W(H, Omega)");
  window_cmd->add_option("--group", group_text)->required();
  window_cmd->add_option("--subgroup", subgroup_text)->description("H generators");
  window_cmd->add_option("--other", other_text)->description("K generators");
  window_cmd->add_option("--omega", omega_text)->required();
  window_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    auto k = make_handle(pres, parse_words(other_text, pres->alphabet()), cfg);
    bool agree = window_test(k, h, parse_words(omega_text, pres->alphabet()));
    out.json = Json{{"window_agree", agree}};
    out.text = agree ? "true" : "false";
  });

  auto* isolate_cmd =
      app.add_subcommand("isolate", "isolation certificate of a finite-index subgroup");
  isolate_cmd->add_option("--group", group_text)->required();
  isolate_cmd->add_option("--subgroup", subgroup_text);
  isolate_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    out.json = to_json(isolation_certificate(h), pres->alphabet());
  });

  auto* verify_cmd = app.add_subcommand(
      "verify-cert", "check a certificate against a low-index universe");
  verify_cmd->add_option("--group", group_text)->required();
  verify_cmd->add_option("--subgroup", subgroup_text);
  verify_cmd->add_option("--cert", cert_arg)
      ->description("constraint JSON (default: the isolation certificate)");
  verify_cmd->add_option("--universe-max-index", universe_max_index)
      ->description("universe bound (default: --max-index)");
  verify_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    MembershipConstraint cert =
        cert_arg.empty() ? isolation_certificate(h)
                         : constraint_from_json(load_json_arg(cert_arg), pres->alphabet());
    int bound = universe_max_index > 0 ? universe_max_index : cfg.max_index;
    std::vector<SubgroupHandle> universe;
    for (auto& t : low_index(pres, bound, cfg.node_budget))
      universe.emplace_back(std::move(t));
    auto report = verify_certificate(cert, h, universe);
    out.json = to_json(report);
    out.json["universe_size"] = universe.size();
    out.json["certificate"] = to_json(cert, pres->alphabet());
    out.text = report.pass ? "PASS" : "FAIL";
    if (!report.pass) {
      out.text += " offenders:";
      for (auto i : report.offenders) out.text += " " + std::to_string(i);
      out.text += " collisions:";
      for (auto i : report.collisions) out.text += " " + std::to_string(i);
    }
  });

  auto* quasi_cmd = app.add_subcommand("quasiregular", "the action G -> G/H");
  quasi_cmd->add_option("--group", group_text)->required();
  quasi_cmd->add_option("--subgroup", subgroup_text);
  quasi_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto h = make_handle(pres, parse_words(subgroup_text, pres->alphabet()), cfg);
    auto rep = quasiregular(h, cfg.radius);
    out.json = to_json(rep);
    out.dot = to_dot(rep);
  });

  auto* tau_cmd = app.add_subcommand(
      "tau-star", "truncated generic representation from low-index subgroups");
  tau_cmd->add_option("--group", group_text)->required();
  tau_cmd->callback([&] {
    auto pres = load_group(group_text);
    auto rep = tau_star_lerf(pres, cfg.max_index, cfg.copies, cfg.node_budget);
    out.json = to_json(rep);
    out.dot = to_dot(rep);
  });

  auto* tau_sol_cmd = app.add_subcommand(
      "tau-star-solitary", "truncated generic representation from classified orbits");
  tau_sol_cmd->add_option("--group", group_text)->required();
  tau_sol_cmd->add_option("--subgroups", subgroups_text)
      ->description("semicolon-separated generator lists")
      ->required();
  tau_sol_cmd->add_option("--classes", classes_text)
      ->description("comma-separated delta|sigma, one per subgroup")
      ->required();
  tau_sol_cmd->callback([&] {
    auto pres = load_group(group_text);
    std::vector<std::pair<SubgroupHandle, OrbitClass>> classified;
    std::vector<std::string> gen_lists;
    std::stringstream ss(subgroups_text);
    std::string piece;
    while (std::getline(ss, piece, ';')) gen_lists.push_back(piece);
    std::vector<std::string> classes;
    std::stringstream cs(classes_text);
    while (std::getline(cs, piece, ',')) classes.push_back(piece);
    if (classes.size() != gen_lists.size())
      throw Error("BadParameter", "need one class per subgroup");
    for (std::size_t i = 0; i < gen_lists.size(); ++i) {
      auto h = make_handle(pres, parse_words(gen_lists[i], pres->alphabet()), cfg);
      if (classes[i] == "delta")
        classified.emplace_back(std::move(h), OrbitClass::kDelta);
      else if (classes[i] == "sigma")
        classified.emplace_back(std::move(h), OrbitClass::kSigma);
      else
        throw Error("BadParameter",
                    "class must be delta or sigma, got '" + classes[i] + "'");
    }
    auto rep = tau_star_solitary(classified, cfg.copies, cfg.radius);
    out.json = to_json(rep);
    out.dot = to_dot(rep);
  });

  auto* apply_cmd = app.add_subcommand("apply", "apply a word to a window point");
  apply_cmd->add_option("--rep", rep_arg)
      ->required()
      ->description("PermRep JSON, inline or @file");
  apply_cmd->add_option("--word", word_text)->required();
  apply_cmd->add_option("--point", point)->required();
  apply_cmd->callback([&] {
    auto rep = rep_from_json(load_json_arg(rep_arg));
    int image = rep.apply(parse_word(word_text, rep.presentation().alphabet()), point);
    out.json = Json{{"point", point}, {"word", word_text}, {"image", image}};
    out.text = std::to_string(image);
  });

  auto* stab_cmd = app.add_subcommand("stabilizer", "stabilizer subgroup of a point");
  stab_cmd->add_option("--rep", rep_arg)->required();
  stab_cmd->add_option("--point", point)->required();
  stab_cmd->callback([&] {
    auto rep = rep_from_json(load_json_arg(rep_arg));
    out.json = to_json(rep.stabilizer(point));
  });

  auto* trace_cmd = app.add_subcommand("trace", "trace of a point under a word");
  trace_cmd->add_option("--rep", rep_arg)->required();
  trace_cmd->add_option("--point", point)->required();
  trace_cmd->add_option("--word", word_text)->required();
  trace_cmd->callback([&] {
    auto rep = rep_from_json(load_json_arg(rep_arg));
    auto pts = trace(rep, point, parse_word(word_text, rep.presentation().alphabet()));
    out.json = Json{{"trace", std::vector<int>(pts.begin(), pts.end())}};
  });

  auto* fcheck_cmd = app.add_subcommand("folner-check", "exact Folner ratios of a set");
  fcheck_cmd->add_option("--rep", rep_arg)->required();
  fcheck_cmd->add_option("--set", set_text)->required();
  fcheck_cmd->add_option("--omega", omega_text)->required();
  fcheck_cmd->callback([&] {
    auto rep = rep_from_json(load_json_arg(rep_arg));
    auto report = folner_check(rep, parse_points(set_text),
                               parse_words(omega_text, rep.presentation().alphabet()),
                               Rational::parse(cfg.epsilon));
    out.json = to_json(report, rep.presentation().alphabet());
    out.text = std::string(report.pass ? "PASS" : "FAIL")
               + " max_ratio=" + report.max_ratio.str();
  });

  auto* fsearch_cmd =
      app.add_subcommand("folner-search", "bounded Folner search in an orbit");
  fsearch_cmd->add_option("--rep", rep_arg)->required();
  fsearch_cmd->add_option("--point", point)->required();
  fsearch_cmd->add_option("--omega", omega_text)->required();
  fsearch_cmd->callback([&] {
    auto rep = rep_from_json(load_json_arg(rep_arg));
    auto result = folner_search(rep, point,
                                parse_words(omega_text, rep.presentation().alphabet()),
                                Rational::parse(cfg.epsilon), cfg.max_size);
    out.json = to_json(result, rep.presentation().alphabet());
    out.text = result.found ? "FOUND size=" + std::to_string(result.set.size())
                            : "NOT-FOUND-UP-TO " + std::to_string(cfg.max_size);
  });

  auto* bs_cmd =
      app.add_subcommand("bs-probe", "finite-quotient obstruction scan for BS(1,n)");
  bs_cmd->add_option("--n", bs_n)->required();
  bs_cmd->callback([&] {
    auto report = bs_obstruction_probe(bs_n, cfg.max_index, cfg.node_budget);
    out.json = to_json(report);
    out.text = std::string(report.pass ? "PASS" : "FAIL") + " quotients="
               + std::to_string(report.quotients.size())
               + (report.nontrivial_witness ? " witness=yes" : " witness=no");
  });

  auto* fpf_cmd = app.add_subcommand(
      "free-product-folner", "constructive Folner set for a free-product action");
  fpf_cmd->add_option("--sigma", sigma_arg)
      ->required()
      ->description("PermRep JSON over G, inline or @file");
  fpf_cmd->add_option("--tau", tau_arg)
      ->required()
      ->description("PermRep JSON over K, inline or @file");
  fpf_cmd->add_option("--point", point)->required();
  fpf_cmd->add_option("--s-words", s_words_text)->required();
  fpf_cmd->add_option("--t-words", t_words_text)->required();
  fpf_cmd->add_option("--locality", locality_text)
      ->description("comma-separated point labels of A (x is always included)");
  fpf_cmd->callback([&] {
    auto sigma = rep_from_json(load_json_arg(sigma_arg));
    auto tau = rep_from_json(load_json_arg(tau_arg));
    auto result = free_product_folner(
        sigma, tau, point, parse_words(s_words_text, sigma.presentation().alphabet()),
        parse_words(t_words_text, tau.presentation().alphabet()),
        Rational::parse(cfg.epsilon), parse_points(locality_text));
    out.json =
        Json{{"action", to_json(result.action)},
             {"F", result.folner_set},
             {"finite_orbit_case", result.finite_orbit_case},
             {"report", to_json(result.report, result.action.presentation().alphabet())}};
    out.dot = to_dot(result.action);
    out.text = std::string(result.report.pass ? "PASS" : "FAIL")
               + " |F|=" + std::to_string(result.folner_set.size());
  });

  auto* export_cmd = app.add_subcommand("export", "re-emit a stored value (e.g. as DOT)");
  export_cmd->add_option("--in", in_arg)
      ->required()
      ->description("JSON value: coset table, core graph, or PermRep");
  export_cmd->callback([&] {
    auto j = load_json_arg(in_arg);
    if (j.contains("components")) {
      auto rep = rep_from_json(j);
      out.json = to_json(rep);
      out.dot = to_dot(rep);
    } else if (j.contains("vertices")) {
      auto core = core_from_json(j);
      out.json = to_json(core);
      out.dot = to_dot(core);
    } else if (j.contains("index")) {
      auto table = table_from_json(j);
      out.json = to_json(table);
      out.dot = to_dot(table);
    } else {
      throw Error("BadJson", "unrecognized value; expected a table, core or rep");
    }
  });

  // Shared configuration flags may appear before or after the subcommand.
  for (auto* sub : app.get_subcommands([](CLI::App const*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (CLI::CallForHelp const& e) {
    return app.exit(e);
  } catch (CLI::ParseError const& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run 'chab --help' for the full grammar\n";
    return 2;
  } catch (Error const& e) {
    std::cout << Json{{"error", e.code()}, {"message", e.what()}}.dump(2) << "\n";
    return 1;
  }

  try {
    emit(out, cfg.format);
  } catch (Error const& e) {
    std::cout << Json{{"error", e.code()}, {"message", e.what()}}.dump(2) << "\n";
    return 1;
  }
  return 0;
}
