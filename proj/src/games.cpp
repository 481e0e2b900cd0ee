#include "col/games.hpp"

#include <algorithm>
#include <stdexcept>

namespace col {

Game make_leaf(Player winner) {
  auto n = std::make_shared<GNode>();
  n->winner = winner;
  return n;
}

Game negate_game(const Game& g) {
  auto n = std::make_shared<GNode>();
  n->winner = opp(g->winner);
  for (const auto& [lm, child] : g->edges)
    n->edges.emplace_back(LabMove{opp(lm.by), lm.move}, negate_game(child));
  return n;
}

bool game_equal(const Game& a, const Game& b) {
  if (a->winner != b->winner || a->edges.size() != b->edges.size()) return false;
  auto key = [](const std::pair<LabMove, Game>& e) {
    return std::make_pair(e.first.by, e.first.move);
  };
  auto ea = a->edges, eb = b->edges;
  auto cmp = [&](const auto& x, const auto& y) { return key(x) < key(y); };
  std::sort(ea.begin(), ea.end(), cmp);
  std::sort(eb.begin(), eb.end(), cmp);
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (key(ea[i]) != key(eb[i])) return false;
    if (!game_equal(ea[i].second, eb[i].second)) return false;
  }
  return true;
}

int game_depth(const Game& g) {
  int d = 0;
  for (const auto& [lm, child] : g->edges) d = std::max(d, 1 + game_depth(child));
  return d;
}

// --------------------------------------------------------------- interpret

namespace {

Player and_winner(Conn kind, const std::vector<Game>& comps) {
  if (kind == Conn::And) {
    for (const auto& c : comps)
      if (c->winner == Player::Environment) return Player::Environment;
    return Player::Machine;
  }
  for (const auto& c : comps)
    if (c->winner == Player::Machine) return Player::Machine;
  return Player::Environment;
}

struct ProductMemo {
  std::map<std::pair<int, std::vector<const GNode*>>, Game> memo;

  Game product(Conn kind, const std::vector<Game>& comps) {
    std::vector<const GNode*> ptrs;
    ptrs.reserve(comps.size());
    for (const auto& c : comps) ptrs.push_back(c.get());
    auto k = std::make_pair(static_cast<int>(kind), std::move(ptrs));
    auto it = memo.find(k);
    if (it != memo.end()) return it->second;
    auto n = std::make_shared<GNode>();
    n->winner = and_winner(kind, comps);
    for (std::size_t i = 0; i < comps.size(); ++i) {
      for (const auto& [lm, child] : comps[i]->edges) {
        std::vector<Game> next = comps;
        next[i] = child;
        n->edges.emplace_back(LabMove{lm.by, std::to_string(i) + "." + lm.move},
                              product(kind, next));
      }
    }
    memo.emplace(std::move(k), n);
    return n;
  }
};

Game interp_rec(Formula f, const Interpretation& itp, ProductMemo& pm) {
  switch (f->kind) {
    case Conn::True: return make_leaf(Player::Machine);
    case Conn::False: return make_leaf(Player::Environment);
    case Conn::Lit: {
      if (is_general_atom(f->atom)) {
        auto it = itp.general.find(f->atom);
        if (it == itp.general.end())
          throw std::invalid_argument("interpret: unmapped general atom " + f->atom);
        return f->neg ? negate_game(it->second) : it->second;
      }
      auto it = itp.elementary.find(f->atom);
      if (it == itp.elementary.end())
        throw std::invalid_argument("interpret: unmapped elementary atom " + f->atom);
      bool v = f->neg ? !it->second : it->second;
      return make_leaf(v ? Player::Machine : Player::Environment);
    }
    case Conn::And:
    case Conn::Or: {
      std::vector<Game> comps;
      comps.reserve(f->args.size());
      for (Formula a : f->args) comps.push_back(interp_rec(a, itp, pm));
      return pm.product(f->kind, comps);
    }
    case Conn::Chand:
    case Conn::Chor: {
      auto n = std::make_shared<GNode>();
      bool chand = f->kind == Conn::Chand;
      n->winner = chand ? Player::Machine : Player::Environment;
      Player mover = chand ? Player::Environment : Player::Machine;
      for (std::size_t i = 0; i < f->args.size(); ++i)
        n->edges.emplace_back(LabMove{mover, std::to_string(i)},
                              interp_rec(f->args[i], itp, pm));
      return n;
    }
    default:
      throw std::invalid_argument(
          "interpret: formula must be normalized and recurrence-free");
  }
}

} // namespace

Game interpret(Formula f, const Interpretation& itp) {
  ProductMemo pm;
  return interp_rec(f, itp, pm);
}

// -------------------------------------------------------------- adjudicate

namespace {

const Game* step(const Game& g, const LabMove& lm) {
  for (const auto& [e, child] : g->edges)
    if (e == lm) return &child;
  return nullptr;
}

} // namespace

Adjudication adjudicate(const Game& g, const Run& run) {
  const Game* cur = &g;
  for (const LabMove& lm : run) {
    const Game* next = step(*cur, lm);
    if (!next) return {false, lm.by, opp(lm.by)};
    cur = next;
  }
  return {true, std::nullopt, (*cur)->winner};
}

Game prefixation(const Game& g, const Run& pos) {
  const Game* cur = &g;
  for (const LabMove& lm : pos) {
    const Game* next = step(*cur, lm);
    if (!next) throw std::invalid_argument("prefixation: illegal position");
    cur = next;
  }
  return *cur;
}

// ----------------------------------------------------------------- matches

MatchResult play_match(const Game& g, const Strategy& machine,
                       const Strategy& environment, int max_steps) {
  Run run;
  Game cur = g;
  for (int s = 0; s < max_steps; ++s) {
    bool moved = false;
    for (Player p : {Player::Environment, Player::Machine}) {
      auto mv = (p == Player::Environment) ? environment(run) : machine(run);
      if (!mv) continue;
      LabMove lm{p, *mv};
      const Game* next = step(cur, lm);
      run.push_back(lm);
      if (!next) return {run, opp(p), p};
      cur = *next;
      moved = true;
    }
    if (!moved) break;
  }
  return {run, cur->winner, std::nullopt};
}

namespace {

bool verify_rec(const Game& node, Run& run, const Strategy& machine) {
  // Environment options at this scheduler step: pass or any legal move.
  std::vector<std::optional<LabMove>> opts{std::nullopt};
  for (const auto& [lm, child] : node->edges)
    if (lm.by == Player::Environment) opts.push_back(lm);

  for (const auto& opt : opts) {
    Game cur = node;
    std::size_t mark = run.size();
    if (opt) {
      cur = *step(cur, *opt);
      run.push_back(*opt);
    }
    auto mv = machine(run);
    bool ok;
    if (mv) {
      LabMove lm{Player::Machine, *mv};
      const Game* next = step(cur, lm);
      if (!next) {
        ok = false; // machine emitted an illegal move
      } else {
        run.push_back(lm);
        ok = verify_rec(*next, run, machine);
      }
    } else if (!opt) {
      ok = cur->winner == Player::Machine; // both passed: terminal
    } else {
      ok = verify_rec(cur, run, machine);
    }
    run.resize(mark);
    if (!ok) return false;
  }
  return true;
}

} // namespace

bool verify_strategy(const Game& g, const Strategy& machine) {
  Run run;
  return verify_rec(g, run, machine);
}

Strategy always_pass() {
  return [](const Run&) { return std::nullopt; };
}

Strategy make_copycat(int left, int right) {
  return [left, right](const Run& run) -> std::optional<std::string> {
    std::string lp = std::to_string(left) + ".";
    std::string rp = std::to_string(right) + ".";
    // Each adversary move in one component creates a mirror obligation in
    // the other; our own moves discharge obligations in order.
    std::vector<std::string> obligations;
    std::size_t paid = 0;
    for (const LabMove& lm : run) {
      bool in_left = lm.move.compare(0, lp.size(), lp) == 0;
      bool in_right = lm.move.compare(0, rp.size(), rp) == 0;
      if (!in_left && !in_right) continue;
      if (lm.by == Player::Environment) {
        std::string tail = lm.move.substr(in_left ? lp.size() : rp.size());
        obligations.push_back((in_left ? rp : lp) + tail);
      } else {
        ++paid;
      }
    }
    if (paid < obligations.size()) return obligations[paid];
    return std::nullopt;
  };
}

// ------------------------------------------------------------------ delays

bool is_delay(const Run& candidate, const Run& original, Player p) {
  auto subseq = [](const Run& r, Player q) {
    std::vector<std::string> out;
    for (const LabMove& lm : r)
      if (lm.by == q) out.push_back(lm.move);
    return out;
  };
  if (subseq(candidate, Player::Machine) != subseq(original, Player::Machine))
    return false;
  if (subseq(candidate, Player::Environment) != subseq(original, Player::Environment))
    return false;
  auto positions = [](const Run& r, auto pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (pred(r[i])) out.push_back(i);
    return out;
  };
  auto isp = [p](const LabMove& lm) { return lm.by == p; };
  auto isnp = [p](const LabMove& lm) { return lm.by != p; };
  auto p_orig = positions(original, isp), np_orig = positions(original, isnp);
  auto p_cand = positions(candidate, isp), np_cand = positions(candidate, isnp);
  for (std::size_t k = 0; k < np_orig.size(); ++k)
    for (std::size_t n = 0; n < p_orig.size(); ++n)
      if (np_orig[k] < p_orig[n] && !(np_cand[k] < p_cand[n])) return false;
  return true;
}

namespace {

void collect_moves(const Game& g, std::set<std::string>& out) {
  for (const auto& [lm, child] : g->edges) {
    out.insert(lm.move);
    collect_moves(child, out);
  }
}

} // namespace

bool is_static(const Game& g, const StaticCheckConfig& cfg) {
  std::set<std::string> alpha_set;
  collect_moves(g, alpha_set);
  std::vector<std::string> alpha(alpha_set.begin(), alpha_set.end());
  int maxlen = std::min(game_depth(g), cfg.max_run_length);

  std::vector<Run> runs{{}};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (static_cast<int>(runs[i].size()) >= maxlen) continue;
    for (Player p : {Player::Machine, Player::Environment})
      for (const std::string& m : alpha) {
        Run r = runs[i];
        r.push_back({p, m});
        runs.push_back(std::move(r));
      }
  }

  // Only runs with identical per-player move subsequences can be delays of
  // one another; bucket on that signature before pairing.
  auto signature = [](const Run& r) {
    std::string s;
    for (Player q : {Player::Machine, Player::Environment}) {
      for (const LabMove& lm : r)
        if (lm.by == q) s += lm.move + ",";
      s += ";";
    }
    return s;
  };
  std::map<std::string, std::vector<const Run*>> buckets;
  for (const Run& r : runs) buckets[signature(r)].push_back(&r);

  long pairs = 0;
  for (const auto& [sig, bucket] : buckets) {
    pairs += static_cast<long>(bucket.size()) * bucket.size();
    if (pairs > cfg.max_pairs)
      throw std::runtime_error("is_static: resource bound exceeded");
    for (const Run* gamma : bucket)
      for (const Run* delta : bucket)
        for (Player p : {Player::Machine, Player::Environment}) {
          if (!is_delay(*delta, *gamma, p)) continue;
          Adjudication ag = adjudicate(g, *gamma);
          Adjudication ad = adjudicate(g, *delta);
          if (ag.winner == p && ad.winner != p) return false;
          if (ag.offender != p && ad.offender == p) return false;
        }
  }
  return true;
}

// ------------------------------------------------------------------- JSON

nlohmann::json game_to_json(const Game& g) {
  nlohmann::json j;
  j["winner"] = g->winner == Player::Machine ? "T" : "B";
  j["edges"] = nlohmann::json::array();
  for (const auto& [lm, child] : g->edges)
    j["edges"].push_back({{"by", lm.by == Player::Machine ? "T" : "B"},
                          {"move", lm.move},
                          {"to", game_to_json(child)}});
  return j;
}

Game game_from_json(const nlohmann::json& j) {
  auto n = std::make_shared<GNode>();
  std::string w = j.at("winner").get<std::string>();
  if (w != "T" && w != "B") throw std::invalid_argument("bad winner: " + w);
  n->winner = w == "T" ? Player::Machine : Player::Environment;
  for (const auto& e : j.value("edges", nlohmann::json::array())) {
    std::string by = e.at("by").get<std::string>();
    n->edges.emplace_back(
        LabMove{by == "T" ? Player::Machine : Player::Environment,
                e.at("move").get<std::string>()},
        game_from_json(e.at("to")));
  }
  return n;
}

nlohmann::json run_to_json(const Run& r) {
  nlohmann::json j = nlohmann::json::array();
  for (const LabMove& lm : r)
    j.push_back({{"by", lm.by == Player::Machine ? "T" : "B"}, {"move", lm.move}});
  return j;
}

Run run_from_json(const nlohmann::json& j) {
  Run r;
  for (const auto& e : j)
    r.push_back({e.at("by").get<std::string>() == "T" ? Player::Machine
                                                      : Player::Environment,
                 e.at("move").get<std::string>()});
  return r;
}

} // namespace col
