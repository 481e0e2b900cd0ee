// Command-line front end: parse / prove / decide / check / play / corpus /
// render over the CL1, CL2, CCC, CL5 and CL15 provers and the game runtime.
//
// Exit codes are a stable contract:
//   0 success / provable / valid
//   1 unprovable / invalid / failed check
//   2 usage or input error
//   3 resource exhausted

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "col/bruteforce.hpp"
#include "col/cl15.hpp"
#include "col/cl5.hpp"
#include "col/formula.hpp"
#include "col/games.hpp"

namespace {

using nlohmann::json;
using namespace col;

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kError = 2;
constexpr int kExhausted = 3;

struct Options {
  std::string subcommand;
  std::string system = "cl1";
  std::string format = "text";
  std::string input; // formula text or file path, subcommand-dependent
  long max_nodes = -1;
  int max_proof_length = -1;
  int contraction_budget = -1;
  long timeout_ms = 0;
  unsigned seed = 0;
  std::string interp_file;
  std::string adversary = "exhaustive";
  std::string strategy = "extracted";
  int rounds = 20;
};

[[noreturn]] void usage_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n"
            << "usage: col <parse|prove|decide|check|play|corpus|render>\n"
            << "           [--system cl1|cl2|ccc|cl5|cl15|cl15c]\n"
            << "           [--format text|json|dot] [--max-nodes N]\n"
            << "           [--max-proof-length N] [--contraction-budget N]\n"
            << "           [--timeout-ms N] [--seed N] [--interp FILE]\n"
            << "           [--adversary exhaustive|random] [--rounds N]\n"
            << "           [--strategy extracted|copycat|pass] INPUT\n";
  std::exit(kError);
}

Options parse_args(int argc, char** argv) {
  if (argc < 2) usage_error("missing subcommand");
  Options o;
  o.subcommand = argv[1];
  auto need = [&](int i) -> std::string {
    if (i + 1 >= argc) usage_error(std::string(argv[i]) + " requires a value");
    return argv[i + 1];
  };
  for (int i = 2; i < argc; ++i) {
    std::string a = argv[i];
    try {
      if (a == "--system") o.system = need(i++);
      else if (a == "--format") o.format = need(i++);
      else if (a == "--max-nodes") o.max_nodes = std::stol(need(i++));
      else if (a == "--max-proof-length") o.max_proof_length = std::stoi(need(i++));
      else if (a == "--contraction-budget") o.contraction_budget = std::stoi(need(i++));
      else if (a == "--timeout-ms") o.timeout_ms = std::stol(need(i++));
      else if (a == "--seed") o.seed = static_cast<unsigned>(std::stoul(need(i++)));
      else if (a == "--interp") o.interp_file = need(i++);
      else if (a == "--adversary") o.adversary = need(i++);
      else if (a == "--strategy") o.strategy = need(i++);
      else if (a == "--rounds") o.rounds = std::stoi(need(i++));
      else if (!a.empty() && a[0] == '-') usage_error("unknown flag " + a);
      else if (!o.input.empty()) usage_error("multiple inputs given");
      else o.input = a;
    } catch (const std::invalid_argument&) {
      usage_error("non-numeric value for " + a);
    }
  }
  if (o.input.empty()) usage_error("missing input");
  if (o.format != "text" && o.format != "json" && o.format != "dot")
    usage_error("unknown format " + o.format);
  if (o.adversary != "exhaustive" && o.adversary != "random")
    usage_error("unknown adversary " + o.adversary);
  if (o.max_nodes == 0 || o.rounds <= 0 || o.timeout_ms < 0)
    usage_error("budgets must be positive");
  return o;
}

SystemId system_id(const std::string& name) {
  if (name == "cl1") return SystemId::CL1;
  if (name == "cl2") return SystemId::CL2;
  if (name == "ccc") return SystemId::CCC;
  if (name == "cl5") return SystemId::CL5;
  if (name == "cl15" || name == "cl15c") return SystemId::CL15;
  usage_error("unknown system " + name);
}

Formula parse_gated(const std::string& text, SystemId sys) {
  Formula f = normalize(parse(text));
  if (!in_language(f, sys))
    throw std::invalid_argument("formula is outside the selected system's language");
  return f;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

// One report shape for prove/decide across systems.
struct Report {
  std::string verdict; // provable | unprovable | valid | invalid | resource-exhausted
  json proof;          // null when absent or not requested
  json stats = json::object();
  std::string bounds;  // always set for unprovable / resource-exhausted
  int exit_code = kOk;
};

void emit_report(const Report& r, const Options& o) {
  if (o.format == "json") {
    json out{{"verdict", r.verdict}, {"statistics", r.stats}};
    if (!r.proof.is_null()) out["proof"] = r.proof;
    if (!r.bounds.empty()) out["bounds"] = r.bounds;
    std::cout << out.dump(2) << "\n";
    return;
  }
  std::cout << "verdict: " << r.verdict << "\n";
  for (auto it = r.stats.begin(); it != r.stats.end(); ++it)
    std::cout << it.key() << ": " << it.value() << "\n";
  if (!r.bounds.empty()) std::cout << "bounds: " << r.bounds << "\n";
  if (!r.proof.is_null()) {
    const json& steps = r.proof["steps"];
    for (size_t i = 0; i < steps.size(); ++i) {
      const json& s = steps[i];
      std::cout << "step " << i << ": ";
      if (s.contains("rule")) {
        const json& rule = s["rule"];
        std::cout << (rule.is_string() ? rule.get<std::string>()
                                       : rule["name"].get<std::string>());
      } else {
        std::cout << s.value("rule_name", std::string("?"));
      }
      if (s.contains("formula")) std::cout << "  " << s["formula"].get<std::string>();
      std::cout << "\n";
    }
  }
}

Report run_decision(Formula f, const Options& o, bool want_proof) {
  SystemId sys = system_id(o.system);
  auto t0 = std::chrono::steady_clock::now();
  Report r;
  switch (sys) {
    case SystemId::CL1:
    case SystemId::CL2: {
      long budget = o.max_nodes > 0 ? o.max_nodes : 50000000;
      BFVerdict v = decide(f, sys, budget);
      r.stats["nodes"] = v.nodes;
      if (v.kind == VerdictKind::Provable) {
        r.verdict = "provable";
        if (want_proof) r.proof = bf_proof_to_json(*v.proof);
      } else if (v.kind == VerdictKind::Unprovable) {
        r.verdict = "unprovable";
        r.bounds = "node budget " + std::to_string(budget);
        r.exit_code = kNegative;
      } else {
        r.verdict = "resource-exhausted";
        r.bounds = "node budget " + std::to_string(budget);
        r.exit_code = kExhausted;
      }
      break;
    }
    case SystemId::CCC:
    case SystemId::CL5: {
      if (!decide_cl5(f, sys)) {
        r.verdict = "unprovable";
        r.bounds = "binary-tautology oracle, 16 literal occurrences";
        r.exit_code = kNegative;
        break;
      }
      r.verdict = "provable";
      if (want_proof) {
        CL5SearchConfig cfg;
        if (o.max_nodes > 0) cfg.max_nodes = o.max_nodes;
        if (o.max_proof_length > 0) cfg.max_depth = o.max_proof_length;
        if (o.contraction_budget >= 0) cfg.contraction_budget = o.contraction_budget;
        std::optional<CL5Proof> p = search_proof(f, sys, cfg);
        if (!p) {
          r.verdict = "resource-exhausted";
          r.bounds = "node budget " + std::to_string(cfg.max_nodes) +
                     ", depth budget " + std::to_string(cfg.max_depth);
          r.exit_code = kExhausted;
          break;
        }
        r.proof = cl5_proof_to_json(*p);
      }
      break;
    }
    case SystemId::CL15: {
      CL15SearchConfig cfg;
      if (o.system == "cl15c") cfg.mode = CL15SearchConfig::cl15c;
      if (o.max_nodes > 0) cfg.max_nodes = o.max_nodes;
      if (o.max_proof_length > 0) cfg.max_proof_length = o.max_proof_length;
      if (o.contraction_budget >= 0) cfg.contraction_budget = o.contraction_budget;
      CL15Verdict v = decide_cl15(f, cfg);
      if (v.kind == VerdictKind::Provable) {
        r.verdict = "provable";
        if (want_proof) r.proof = cl15_proof_to_json(*v.proof);
      } else if (v.kind == VerdictKind::Unprovable) {
        r.verdict = "unprovable";
        r.bounds = v.note;
        r.exit_code = kNegative;
      } else {
        r.verdict = "resource-exhausted";
        r.bounds = v.note;
        r.exit_code = kExhausted;
      }
      break;
    }
  }
  r.stats["elapsed_ms"] = elapsed_ms(t0);
  return r;
}

int cmd_parse(const Options& o) {
  Formula raw = parse(o.input);
  Formula f = normalize(raw);
  if (o.format == "json") {
    json systems = json::object();
    for (auto [name, sys] : std::initializer_list<std::pair<const char*, SystemId>>{
             {"cl1", SystemId::CL1}, {"cl2", SystemId::CL2}, {"ccc", SystemId::CCC},
             {"cl5", SystemId::CL5}, {"cl15", SystemId::CL15}})
      systems[name] = in_language(f, sys);
    json out{{"input", o.input},
             {"normalized", render(f)},
             {"unicode", render(f, Style::Unicode)},
             {"atoms", atoms(f)},
             {"recurrence_complexity", recurrence_complexity(f)},
             {"systems", systems}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << render(f) << "\n" << render(f, Style::Unicode) << "\n";
  }
  return kOk;
}

int cmd_render(const Options& o) {
  SystemId sys = system_id(o.system);
  Formula f = parse_gated(o.input, sys);
  if (o.format == "dot") {
    if (sys == SystemId::CL15)
      std::cout << cirquent15_to_dot(formula_to_target(f));
    else
      std::cout << cirquent_to_dot(singleton_cirquent(f));
  } else if (o.format == "json") {
    if (sys == SystemId::CL15)
      std::cout << cirquent15_to_json(formula_to_target(f)).dump(2) << "\n";
    else
      std::cout << cirquent_to_json(singleton_cirquent(f)).dump(2) << "\n";
  } else {
    std::cout << render(f, Style::Unicode) << "\n";
  }
  return kOk;
}

int cmd_prove_or_decide(const Options& o, bool want_proof) {
  if (want_proof && o.format == "dot")
    usage_error("dot output applies to the render subcommand only");
  Formula f = parse_gated(o.input, system_id(o.system));
  Report r = run_decision(f, o, want_proof);
  emit_report(r, o);
  return r.exit_code;
}

int cmd_check(const Options& o) {
  json j = json::parse(read_file(o.input));
  std::string sys = j.at("system").get<std::string>();
  std::string error;
  bool ok;
  if (sys == "cl1" || sys == "cl2") {
    ok = check_proof(bf_proof_from_json(j), &error);
  } else if (sys == "cl5" || sys == "ccc") {
    ok = check_proof(cl5_proof_from_json(j), &error);
  } else if (sys == "cl15") {
    ok = check_proof(cl15_proof_from_json(j), &error);
  } else {
    throw std::invalid_argument("unknown proof system " + sys);
  }
  if (o.format == "json") {
    json out{{"verdict", ok ? "valid" : "invalid"}};
    if (!ok) out["diagnostic"] = error;
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "verdict: " << (ok ? "valid" : "invalid") << "\n";
    if (!ok) std::cout << "diagnostic: " << error << "\n";
  }
  return ok ? kOk : kNegative;
}

// Environment policy drawing uniformly from its legal moves (or passing) at
// the current position, all randomness from the given engine.
Strategy random_adversary(const Game& root, std::shared_ptr<std::mt19937> rng) {
  return [root, rng](const Run& run) -> std::optional<std::string> {
    Game pos;
    try {
      pos = prefixation(root, run);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    std::vector<std::string> moves;
    for (const auto& [lm, to] : pos->edges)
      if (lm.by == Player::Environment) moves.push_back(lm.move);
    std::uniform_int_distribution<size_t> pick(0, moves.size());
    size_t k = pick(*rng);
    if (k == moves.size()) return std::nullopt;
    return moves[k];
  };
}

int cmd_play(const Options& o) {
  SystemId sys = system_id(o.system);
  if (sys != SystemId::CL1 && sys != SystemId::CL2)
    usage_error("play requires --system cl1 or cl2");
  Formula f = parse_gated(o.input, sys);
  if (recurrence_complexity(f) != 0)
    throw std::invalid_argument("play requires a recurrence-free formula");

  Strategy machine;
  if (o.strategy == "copycat") {
    machine = make_copycat();
  } else if (o.strategy == "pass") {
    machine = always_pass();
  } else if (o.strategy == "extracted") {
    BFVerdict v = decide(f, sys, o.max_nodes > 0 ? o.max_nodes : 50000000);
    if (v.kind != VerdictKind::Provable) {
      std::cout << "verdict: unprovable (no strategy to extract)\n";
      return kNegative;
    }
    machine = extract_strategy(*v.proof);
  } else {
    usage_error("unknown strategy " + o.strategy);
  }

  // Interpretations to test: the supplied one, or every elementary
  // assignment when no file is given.
  std::vector<Interpretation> itps;
  if (!o.interp_file.empty()) {
    json j = json::parse(read_file(o.interp_file));
    Interpretation itp;
    if (j.contains("elementary"))
      for (auto it = j["elementary"].begin(); it != j["elementary"].end(); ++it)
        itp.elementary[it.key()] = it.value().get<bool>();
    if (j.contains("general"))
      for (auto it = j["general"].begin(); it != j["general"].end(); ++it)
        itp.general[it.key()] = game_from_json(it.value());
    itps.push_back(std::move(itp));
  } else {
    std::vector<std::string> names;
    for (const std::string& a : atoms(f)) {
      if (is_general_atom(a))
        throw std::invalid_argument("general atom " + a +
                                    " has no interpretation (use --interp)");
      names.push_back(a);
    }
    if (names.size() > 12) throw std::invalid_argument("too many atoms to enumerate");
    for (std::uint32_t mask = 0; mask < (1u << names.size()); ++mask) {
      Interpretation itp;
      for (size_t i = 0; i < names.size(); ++i)
        itp.elementary[names[i]] = (mask >> i) & 1;
      itps.push_back(std::move(itp));
    }
  }

  auto rng = std::make_shared<std::mt19937>(o.seed);
  json transcripts = json::array();
  int wins = 0, matches = 0;
  bool all_won = true;
  for (const Interpretation& itp : itps) {
    Game g = interpret(f, itp);
    if (o.adversary == "exhaustive") {
      ++matches;
      bool won = verify_strategy(g, machine);
      wins += won;
      all_won = all_won && won;
      transcripts.push_back(json{{"adversary", "exhaustive"}, {"won", won}});
    } else {
      for (int round = 0; round < o.rounds; ++round) {
        ++matches;
        MatchResult m = play_match(g, machine, random_adversary(g, rng),
                                   64 + 4 * game_depth(g));
        bool won = m.winner == Player::Machine;
        wins += won;
        all_won = all_won && won;
        transcripts.push_back(json{{"adversary", "random"},
                                   {"run", run_to_json(m.run)},
                                   {"won", won}});
      }
    }
  }
  if (o.format == "json") {
    json out{{"verdict", all_won ? "valid" : "invalid"},
             {"matches", matches},
             {"wins", wins},
             {"seed", o.seed},
             {"transcripts", transcripts}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "verdict: " << (all_won ? "valid" : "invalid") << "\n"
              << "wins: " << wins << "/" << matches << "\n";
  }
  return all_won ? kOk : kNegative;
}

// Seeded random formula over ~, &, | and the given atoms, for the corpus
// cross-oracle suite.
Formula random_parallel_formula(std::mt19937& rng, int literals,
                                const std::vector<std::string>& names) {
  if (literals <= 1) {
    std::uniform_int_distribution<size_t> atom(0, names.size() - 1);
    std::uniform_int_distribution<int> sign(0, 1);
    return mk_lit(names[atom(rng)], sign(rng));
  }
  std::uniform_int_distribution<int> split(1, literals - 1);
  int left = split(rng);
  Formula a = random_parallel_formula(rng, left, names);
  Formula b = random_parallel_formula(rng, literals - left, names);
  std::uniform_int_distribution<int> conn(0, 1);
  return mk(conn(rng) ? Conn::And : Conn::Or, {a, b});
}

int cmd_corpus(const Options& o) {
  std::ifstream in(o.input);
  if (!in) throw std::invalid_argument("cannot open corpus " + o.input);
  json entries = json::array();
  int failures = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json e;
    try {
      e = json::parse(line);
    } catch (const json::exception& ex) {
      throw std::invalid_argument("corpus line " + std::to_string(lineno) +
                                  ": " + ex.what());
    }
    Options eo = o;
    eo.system = e.at("system").get<std::string>();
    if (e.contains("budget")) {
      const json& b = e["budget"];
      if (b.contains("max_nodes")) eo.max_nodes = b["max_nodes"].get<long>();
      if (b.contains("max_proof_length"))
        eo.max_proof_length = b["max_proof_length"].get<int>();
      if (b.contains("contraction_budget"))
        eo.contraction_budget = b["contraction_budget"].get<int>();
    }
    std::string expect = e.at("expect").get<std::string>();
    std::string verdict;
    try {
      Formula f = parse_gated(e.at("formula").get<std::string>(), system_id(eo.system));
      verdict = run_decision(f, eo, false).verdict;
    } catch (const std::exception& ex) {
      verdict = std::string("error: ") + ex.what();
    }
    bool pass = verdict == expect;
    failures += !pass;
    entries.push_back(json{{"formula", e.at("formula")},
                           {"system", eo.system},
                           {"expect", expect},
                           {"verdict", verdict},
                           {"pass", pass},
                           {"ref", e.value("ref", std::string())}});
  }

  // Cross-oracle property suites (seeded, deterministic).
  json properties = json::array();
  std::mt19937 rng(o.seed);
  std::vector<std::string> general{"P", "Q", "R"};
  std::uniform_int_distribution<int> lits(2, 8);
  int agree = 0;
  const int kSamples = 60;
  for (int i = 0; i < kSamples; ++i) {
    Formula f = normalize(random_parallel_formula(rng, lits(rng), general));
    bool binary = decide_binary(f);
    bool ars = ars_valid(singleton_cirquent(f)).valid;
    agree += binary == ars;
  }
  properties.push_back(json{{"name", "cl5 binary-tautology vs resource semantics"},
                            {"samples", kSamples},
                            {"agreed", agree},
                            {"pass", agree == kSamples}});
  failures += agree != kSamples;

  std::vector<std::string> elem{"p", "q", "r"};
  int agree2 = 0;
  for (int i = 0; i < kSamples; ++i) {
    Formula f = normalize(random_parallel_formula(rng, lits(rng), elem));
    agree2 += decide_cl5(f, SystemId::CCC) == is_tautology(f);
  }
  properties.push_back(json{{"name", "ccc vs classical tautology"},
                            {"samples", kSamples},
                            {"agreed", agree2},
                            {"pass", agree2 == kSamples}});
  failures += agree2 != kSamples;

  json out{{"seed", o.seed},
           {"entries", entries},
           {"properties", properties},
           {"failures", failures}};
  if (o.format == "json") {
    std::cout << out.dump(2) << "\n";
  } else {
    for (const json& e : entries)
      std::cout << (e["pass"].get<bool>() ? "pass" : "FAIL") << "  "
                << e["system"].get<std::string>() << "  "
                << e["formula"].get<std::string>() << "  expect "
                << e["expect"].get<std::string>() << ", got "
                << e["verdict"].get<std::string>() << "\n";
    for (const json& p : properties)
      std::cout << (p["pass"].get<bool>() ? "pass" : "FAIL") << "  "
                << p["name"].get<std::string>() << "  " << p["agreed"]
                << "/" << p["samples"] << "\n";
    std::cout << "entries: " << entries.size() << ", failures: " << failures << "\n";
  }
  return failures == 0 ? kOk : kNegative;
}

int dispatch(const Options& o) {
  if (o.subcommand == "parse") return cmd_parse(o);
  if (o.subcommand == "prove") return cmd_prove_or_decide(o, true);
  if (o.subcommand == "decide") return cmd_prove_or_decide(o, false);
  if (o.subcommand == "check") return cmd_check(o);
  if (o.subcommand == "play") return cmd_play(o);
  if (o.subcommand == "corpus") return cmd_corpus(o);
  if (o.subcommand == "render") return cmd_render(o);
  usage_error("unknown subcommand " + o.subcommand);
}

} // namespace

int main(int argc, char** argv) {
  Options o = parse_args(argc, argv);
  try {
    if (o.timeout_ms > 0) {
      auto fut = std::async(std::launch::async, [&] { return dispatch(o); });
      if (fut.wait_for(std::chrono::milliseconds(o.timeout_ms)) ==
          std::future_status::timeout) {
        std::cerr << "error: timed out after " << o.timeout_ms << " ms\n";
        std::_Exit(kExhausted);
      }
      return fut.get();
    }
    return dispatch(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.line << ":" << e.col << ": " << e.what()
              << "\n";
    return kError;
  } catch (const json::exception& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
}
