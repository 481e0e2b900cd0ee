#include "col/bruteforce.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace col {

namespace {

void gate(Formula f, SystemId sys) {
  if (sys != SystemId::CL1 && sys != SystemId::CL2)
    throw std::invalid_argument("bruteforce handles CL1 and CL2 only");
  if (!is_normalized(f)) throw std::invalid_argument("formula not normalized");
  if (!in_language(f, sys)) throw std::invalid_argument("formula outside system language");
}

std::string fresh_atom(Formula f) {
  std::set<std::string> used = atoms(f);
  for (int i = 1;; ++i) {
    std::string name = "p" + std::to_string(i);
    if (!used.count(name)) return name;
  }
}

} // namespace

std::optional<std::vector<Formula>> rule1_premises(Formula f) {
  if (!is_stable(f)) return std::nullopt;
  std::vector<Formula> out;
  for (const Site& s : surface_sites(f, Conn::Chand)) {
    if (!s.surface) continue;
    for (Formula comp : s.subformula->args) {
      Formula prem = replace_at(f, s.path, comp);
      if (std::find(out.begin(), out.end(), prem) == out.end()) out.push_back(prem);
    }
  }
  return out;
}

std::vector<R2Entry> rule2_premises(Formula f) {
  std::vector<R2Entry> out;
  for (const Site& s : surface_sites(f, Conn::Chor)) {
    if (!s.surface) continue;
    for (std::size_t i = 0; i < s.subformula->args.size(); ++i)
      out.push_back({replace_at(f, s.path, s.subformula->args[i]), s.path,
                     static_cast<int>(i)});
  }
  return out;
}

std::vector<R3Entry> rule3_premises(Formula f) {
  std::vector<Site> pos, neg;
  for (const Site& s : surface_sites(f, Conn::Lit)) {
    if (!s.surface || !is_general_atom(s.subformula->atom)) continue;
    (s.subformula->neg ? neg : pos).push_back(s);
  }
  std::vector<R3Entry> out;
  std::string name = fresh_atom(f);
  for (const Site& sp : pos)
    for (const Site& sn : neg) {
      if (sp.subformula->atom != sn.subformula->atom) continue;
      Formula prem = replace_at(f, sp.path, mk_lit(name));
      prem = replace_at(prem, sn.path, mk_lit(name, true));
      out.push_back({prem, sp.path, sn.path, name});
    }
  return out;
}

// ------------------------------------------------------------------ search

Decider::Decider(SystemId sys, long max_nodes) : sys_(sys), max_nodes_(max_nodes) {
  if (sys != SystemId::CL1 && sys != SystemId::CL2)
    throw std::invalid_argument("Decider: CL1 or CL2 only");
}

bool Decider::provable(Formula f) {
  auto it = memo_.find(f);
  if (it != memo_.end()) return it->second.has_value();
  if (++nodes_ > max_nodes_) throw std::runtime_error("bruteforce: node budget exceeded");
  // Reserve the slot as unprovable; every rule strictly shrinks the pair
  // (general-atom occurrences, choice occurrences), so no cycles exist and
  // the placeholder is never observed by a live subgoal.
  memo_[f] = std::nullopt;

  auto r1 = rule1_premises(f);
  if (r1) {
    bool all = true;
    for (Formula prem : *r1)
      if (!provable(prem)) {
        all = false;
        break;
      }
    if (all) {
      How h;
      h.rule = BFRule::R1;
      h.premises = *r1;
      memo_[f] = std::move(h);
      return true;
    }
  }
  for (const R2Entry& e : rule2_premises(f))
    if (provable(e.premise)) {
      How h;
      h.rule = BFRule::R2;
      h.premises = {e.premise};
      h.site = e.site;
      h.component = e.component;
      memo_[f] = std::move(h);
      return true;
    }
  if (sys_ == SystemId::CL2)
    for (const R3Entry& e : rule3_premises(f))
      if (provable(e.premise)) {
        How h;
        h.rule = BFRule::R3;
        h.premises = {e.premise};
        h.site = e.pos_site;
        h.site2 = e.neg_site;
        h.fresh = e.fresh;
        memo_[f] = std::move(h);
        return true;
      }
  return false;
}

const Decider::How* Decider::how(Formula f) const {
  auto it = memo_.find(f);
  if (it == memo_.end() || !it->second) return nullptr;
  return &*it->second;
}

BFProof Decider::build_proof(Formula f) {
  if (!provable(f)) throw std::logic_error("build_proof: formula not provable");
  BFProof proof;
  proof.system = sys_;
  proof.target = f;
  std::map<Formula, int> emitted;
  // Post-order emission so premise indices always precede consumers.
  std::function<int(Formula)> emit = [&](Formula g) -> int {
    auto it = emitted.find(g);
    if (it != emitted.end()) return it->second;
    const How* h = how(g);
    if (!h) throw std::logic_error("build_proof: missing record");
    BFStep step;
    step.formula = g;
    step.rule = h->rule;
    for (Formula prem : h->premises) step.premises.push_back(emit(prem));
    step.site = h->site;
    step.component = h->component;
    step.site2 = h->site2;
    step.fresh = h->fresh;
    proof.steps.push_back(std::move(step));
    int idx = static_cast<int>(proof.steps.size()) - 1;
    emitted[g] = idx;
    return idx;
  };
  emit(f);
  return proof;
}

BFVerdict decide(Formula f, SystemId system, long max_nodes) {
  Formula nf = normalize(f);
  gate(nf, system);
  Decider d(system, max_nodes);
  try {
    if (d.provable(nf))
      return {VerdictKind::Provable, d.build_proof(nf), d.nodes()};
    return {VerdictKind::Unprovable, std::nullopt, d.nodes()};
  } catch (const std::runtime_error&) {
    return {VerdictKind::ResourceExhausted, std::nullopt, d.nodes()};
  }
}

// ----------------------------------------------------------------- checker

namespace {

bool fail(std::string* error, const std::string& msg) {
  if (error) *error = msg;
  return false;
}

} // namespace

bool check_proof(const BFProof& p, std::string* error) {
  if (p.steps.empty()) return fail(error, "empty proof");
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const BFStep& st = p.steps[i];
    std::string at = "step " + std::to_string(i) + ": ";
    if (!is_normalized(st.formula)) return fail(error, at + "formula not normalized");
    if (!in_language(st.formula, p.system))
      return fail(error, at + "formula outside system language");
    for (int pi : st.premises)
      if (pi < 0 || pi >= static_cast<int>(i))
        return fail(error, at + "premise index out of order");
    switch (st.rule) {
      case BFRule::R1: {
        auto req = rule1_premises(st.formula);
        if (!req) return fail(error, at + "formula is not stable");
        std::set<Formula> have, want(req->begin(), req->end());
        for (int pi : st.premises) have.insert(p.steps[pi].formula);
        if (have != want)
          return fail(error, at + "premise set does not match the required set");
        break;
      }
      case BFRule::R2: {
        if (st.premises.size() != 1) return fail(error, at + "R2 needs one premise");
        Formula site;
        try {
          site = subformula_at(st.formula, st.site);
        } catch (const std::exception&) {
          return fail(error, at + "bad site path");
        }
        if (site->kind != Conn::Chor) return fail(error, at + "site is not a choice disjunction");
        for (const Site& s : surface_sites(st.formula, Conn::Chor))
          if (s.path == st.site && !s.surface)
            return fail(error, at + "site is not at the surface");
        if (st.component < 0 ||
            st.component >= static_cast<int>(site->args.size()))
          return fail(error, at + "bad component index");
        if (p.steps[st.premises[0]].formula !=
            replace_at(st.formula, st.site, site->args[st.component]))
          return fail(error, at + "premise does not match the chosen component");
        break;
      }
      case BFRule::R3: {
        if (p.system != SystemId::CL2) return fail(error, at + "R3 requires CL2");
        if (st.premises.size() != 1) return fail(error, at + "R3 needs one premise");
        Formula lp, ln;
        try {
          lp = subformula_at(st.formula, st.site);
          ln = subformula_at(st.formula, st.site2);
        } catch (const std::exception&) {
          return fail(error, at + "bad literal path");
        }
        if (lp->kind != Conn::Lit || ln->kind != Conn::Lit ||
            !is_general_atom(lp->atom) || lp->atom != ln->atom || lp->neg || !ln->neg)
          return fail(error, at + "sites are not a positive/negative pair of a general atom");
        for (const Site& s : surface_sites(st.formula, Conn::Lit))
          if ((s.path == st.site || s.path == st.site2) && !s.surface)
            return fail(error, at + "literal occurrence is not at the surface");
        if (!st.fresh.empty() && is_general_atom(st.fresh))
          return fail(error, at + "replacement atom is not elementary");
        if (atoms(st.formula).count(st.fresh))
          return fail(error, at + "replacement atom already occurs");
        Formula prem = replace_at(st.formula, st.site, mk_lit(st.fresh));
        prem = replace_at(prem, st.site2, mk_lit(st.fresh, true));
        if (p.steps[st.premises[0]].formula != prem)
          return fail(error, at + "premise does not match the replacement");
        break;
      }
    }
  }
  if (p.steps.back().formula != normalize(p.target))
    return fail(error, "final step is not the target");
  return true;
}

// ---------------------------------------------------------------- strategy

std::shared_ptr<Decider> StrategyContext::decider(SystemId sys) {
  auto it = deciders.find(sys);
  if (it != deciders.end()) return it->second;
  auto d = std::make_shared<Decider>(sys);
  deciders[sys] = d;
  return d;
}

namespace {

std::string move_string(const std::vector<int>& path, const std::string& tail) {
  std::string out;
  for (int i : path) out += std::to_string(i) + ".";
  return out + tail;
}

struct Resolved {
  enum Kind { Choice, LitTail, Bad } kind;
  std::vector<int> path;
  int component = -1;
  std::string tail;
};

// Interpret a move against the current formula: descend through parallel
// connectives by index; a bare index at a choice node is a choice move; a
// remainder at a general literal is an in-atom move.
Resolved resolve_move(Formula f, const std::string& move) {
  Formula cur = f;
  std::vector<int> path;
  std::size_t pos = 0;
  for (;;) {
    if (cur->kind == Conn::Lit && is_general_atom(cur->atom)) {
      if (pos >= move.size()) return {Resolved::Bad};
      return {Resolved::LitTail, path, -1, move.substr(pos)};
    }
    std::size_t dot = move.find('.', pos);
    std::string tok = move.substr(pos, dot == std::string::npos ? dot : dot - pos);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
      return {Resolved::Bad};
    int idx = std::stoi(tok);
    if (cur->kind == Conn::Chand || cur->kind == Conn::Chor) {
      if (dot != std::string::npos) return {Resolved::Bad};
      if (idx < 0 || idx >= static_cast<int>(cur->args.size())) return {Resolved::Bad};
      return {Resolved::Choice, path, idx, ""};
    }
    if (cur->kind != Conn::And && cur->kind != Conn::Or) return {Resolved::Bad};
    if (dot == std::string::npos) return {Resolved::Bad};
    if (idx < 0 || idx >= static_cast<int>(cur->args.size())) return {Resolved::Bad};
    path.push_back(idx);
    cur = cur->args[idx];
    pos = dot + 1;
  }
}

struct Action {
  bool provable = false;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> pairs; // pos, neg
  std::optional<std::pair<std::vector<int>, int>> choice;
};

const Action& action_for(StrategyContext& ctx, SystemId sys, Formula f,
                         std::map<std::pair<int, Formula>, Action>& cache) {
  auto key = std::make_pair(static_cast<int>(sys), f);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Action a;
  auto d = ctx.decider(sys);
  if (d->provable(f)) {
    a.provable = true;
    Formula cur = f;
    // Trailing Rule-3 steps install copycat pairs; a Rule-2 head is our
    // own pending choice; Rule 1 means wait.
    for (;;) {
      const Decider::How* h = d->how(cur);
      if (!h) break;
      if (h->rule == BFRule::R3) {
        a.pairs.emplace_back(h->site, h->site2);
        cur = h->premises[0];
        continue;
      }
      if (h->rule == BFRule::R2) a.choice = std::make_pair(h->site, h->component);
      break;
    }
  }
  return cache.emplace(std::move(key), std::move(a)).first->second;
}

} // namespace

Strategy extract_strategy(const BFProof& p, std::shared_ptr<StrategyContext> ctx) {
  std::string err;
  if (!check_proof(p, &err)) throw std::invalid_argument("extract_strategy: " + err);
  if (recurrence_complexity(normalize(p.target)) != 0)
    throw std::invalid_argument("extract_strategy: target is not recurrence-free");
  if (!ctx) ctx = std::make_shared<StrategyContext>();
  Formula target = normalize(p.target);
  SystemId sys = p.system;
  auto cache = std::make_shared<std::map<std::pair<int, Formula>, Action>>();

  return [ctx, cache, target, sys](const Run& run) -> std::optional<std::string> {
    Formula f = target;
    struct LitMove {
      std::vector<int> path;
      std::string tail;
      Player by;
    };
    std::vector<LitMove> litmoves;
    for (const LabMove& lm : run) {
      Resolved r = resolve_move(f, lm.move);
      if (r.kind == Resolved::Choice) {
        Formula site = subformula_at(f, r.path);
        f = replace_at(f, r.path, site->args[r.component]);
      } else if (r.kind == Resolved::LitTail) {
        litmoves.push_back({r.path, r.tail, lm.by});
      }
      // unresolvable moves are illegal; the adjudicator already handles them
    }
    const Action& act = action_for(*ctx, sys, f, *cache);
    if (!act.provable) return std::nullopt;
    // copycat obligations per installed pair, paid in order
    for (const auto& [pos, neg] : act.pairs) {
      std::vector<std::string> obligations;
      std::size_t paid = 0;
      for (const LitMove& m : litmoves) {
        bool at_pos = m.path == pos, at_neg = m.path == neg;
        if (!at_pos && !at_neg) continue;
        if (m.by == Player::Environment)
          obligations.push_back(move_string(at_pos ? neg : pos, m.tail));
        else
          ++paid;
      }
      if (paid < obligations.size()) return obligations[paid];
    }
    if (act.choice)
      return move_string(act.choice->first, std::to_string(act.choice->second));
    return std::nullopt;
  };
}

// ------------------------------------------------------------------- JSON

namespace {

std::string rule_name(BFRule r) {
  switch (r) {
    case BFRule::R1: return "R1";
    case BFRule::R2: return "R2";
    case BFRule::R3: return "R3";
  }
  return "";
}

} // namespace

nlohmann::json bf_proof_to_json(const BFProof& p) {
  nlohmann::json j;
  j["system"] = p.system == SystemId::CL1 ? "cl1" : "cl2";
  j["target"] = render(p.target);
  j["steps"] = nlohmann::json::array();
  for (const BFStep& st : p.steps) {
    nlohmann::json s;
    s["formula"] = render(st.formula);
    s["rule"] = rule_name(st.rule);
    s["premises"] = st.premises;
    nlohmann::json d = nlohmann::json::object();
    if (st.rule == BFRule::R2) {
      d["site"] = st.site;
      d["component"] = st.component;
    } else if (st.rule == BFRule::R3) {
      d["positive"] = st.site;
      d["negative"] = st.site2;
      d["fresh"] = st.fresh;
    }
    s["detail"] = d;
    j["steps"].push_back(std::move(s));
  }
  return j;
}

BFProof bf_proof_from_json(const nlohmann::json& j) {
  BFProof p;
  std::string sys = j.at("system").get<std::string>();
  if (sys == "cl1") p.system = SystemId::CL1;
  else if (sys == "cl2") p.system = SystemId::CL2;
  else throw std::invalid_argument("unknown system: " + sys);
  p.target = parse(j.at("target").get<std::string>());
  for (const auto& s : j.at("steps")) {
    BFStep st;
    st.formula = normalize(parse(s.at("formula").get<std::string>()));
    std::string r = s.at("rule").get<std::string>();
    if (r == "R1") st.rule = BFRule::R1;
    else if (r == "R2") st.rule = BFRule::R2;
    else if (r == "R3") st.rule = BFRule::R3;
    else throw std::invalid_argument("unknown rule: " + r);
    st.premises = s.at("premises").get<std::vector<int>>();
    const auto& d = s.value("detail", nlohmann::json::object());
    if (st.rule == BFRule::R2) {
      st.site = d.at("site").get<std::vector<int>>();
      st.component = d.at("component").get<int>();
    } else if (st.rule == BFRule::R3) {
      st.site = d.at("positive").get<std::vector<int>>();
      st.site2 = d.at("negative").get<std::vector<int>>();
      st.fresh = d.at("fresh").get<std::string>();
    }
    p.steps.push_back(std::move(st));
  }
  return p;
}

} // namespace col
