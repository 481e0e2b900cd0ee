#include "col/cl15.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace col {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

Formula negf(Formula f) { return normalize(mk(Conn::Not, {f})); }

// The leftmost literal of a diamond's negative half is negated; this is what
// orients <~F, F> against <F, ~F>.
bool leftmost_neg(Formula f) {
  while (f->kind != Conn::Lit) {
    if (f->args.empty()) return false;
    f = f->args[0];
  }
  return f->neg;
}

bool cl15_sig_ok(Formula f) { return in_language(f, SystemId::CL15); }

Formula slice_combine(Conn kind, const std::vector<Formula>& args, int lo,
                      int hi) {
  if (hi - lo == 1) return args[lo];
  return mk(kind, std::vector<Formula>(args.begin() + lo, args.begin() + hi));
}

bool combines(Conn kind, Formula H, Formula F, Formula G) {
  if (H->kind != kind) return false;
  int n = static_cast<int>(H->args.size());
  for (int k = 1; k < n; ++k)
    if (slice_combine(kind, H->args, 0, k) == F &&
        slice_combine(kind, H->args, k, n) == G)
      return true;
  return false;
}

std::vector<std::pair<Formula, Formula>> splits(Formula H) {
  std::vector<std::pair<Formula, Formula>> out;
  int n = static_cast<int>(H->args.size());
  for (int k = 1; k < n; ++k)
    out.push_back({slice_combine(H->kind, H->args, 0, k),
                   slice_combine(H->kind, H->args, k, n)});
  return out;
}

using Groups = std::vector<std::set<int>>;

template <class F>
void map_groups(Groups& gs, F f) {
  for (auto& g : gs) {
    std::set<int> out;
    for (int j : g) {
      int t = f(j);
      if (t >= 0) out.insert(t);
    }
    g = std::move(out);
  }
}

// Position remap after deleting oformula `at`, folding it into nothing.
auto erase_map(int at) {
  return [at](int j) { return j == at ? -1 : (j > at ? j - 1 : j); };
}

// Position remap after merging oformula at+1 into at.
auto merge_map(int at) {
  return [at](int j) { return j > at ? j - 1 : j; };
}

auto insert_map(int at) {
  return [at](int j) { return j >= at ? j + 1 : j; };
}

bool same_membership(const Cirquent15& c, int a, int b) {
  for (const auto& g : c.undergroups)
    if (g.count(a) != g.count(b)) return false;
  for (const auto& g : c.overgroups)
    if (g.count(a) != g.count(b)) return false;
  return true;
}

} // namespace

bool Cirquent15::well_formed() const {
  int n = static_cast<int>(oformulas.size());
  if (n == 0 || undergroups.empty() || overgroups.empty()) return false;
  for (Formula f : oformulas)
    if (!f) return false;
  std::vector<char> under(n, 0), over(n, 0);
  for (const auto& g : undergroups) {
    if (g.empty()) return false;
    for (int j : g) {
      if (j < 0 || j >= n) return false;
      under[j] = 1;
    }
  }
  for (const auto& g : overgroups) {
    if (g.empty()) return false;
    for (int j : g) {
      if (j < 0 || j >= n) return false;
      over[j] = 1;
    }
  }
  for (int i = 0; i < n; ++i)
    if (!under[i] || !over[i]) return false;
  return true;
}

Cirquent15 formula_to_target(Formula f) {
  f = normalize(f);
  if (!cl15_sig_ok(f)) fail("formula outside the CL15 language");
  return {{f}, {{0}}, {{0}}};
}

bool axiom_match(const Cirquent15& c) {
  int n = static_cast<int>(c.oformulas.size());
  if (n == 0 || n % 2) return false;
  int m = n / 2;
  if (static_cast<int>(c.undergroups.size()) != m) return false;
  if (static_cast<int>(c.overgroups.size()) != m) return false;
  for (int k = 0; k < m; ++k) {
    std::set<int> pair = {2 * k, 2 * k + 1};
    if (c.undergroups[k] != pair || c.overgroups[k] != pair) return false;
    if (c.oformulas[2 * k] != negf(c.oformulas[2 * k + 1])) return false;
    if (!leftmost_neg(c.oformulas[2 * k])) return false;
  }
  return true;
}

Cirquent15 weaken_delete(const Cirquent15& c, int u, int f) {
  if (!c.well_formed()) fail("malformed cirquent");
  int n = static_cast<int>(c.oformulas.size());
  int mu = static_cast<int>(c.undergroups.size());
  if (u < 0 || u >= mu || f < 0 || f >= n) fail("arc positions out of range");
  if (!c.undergroups[u].count(f))
    fail("no arc between the undergroup and the oformula");
  if (c.undergroups[u].size() < 2)
    fail("weakened undergroup has a single member");
  Cirquent15 p = c;
  p.undergroups[u].erase(f);
  bool orphan = true;
  for (const auto& g : p.undergroups)
    if (g.count(f)) orphan = false;
  if (orphan) {
    p.oformulas.erase(p.oformulas.begin() + f);
    map_groups(p.undergroups, erase_map(f));
    map_groups(p.overgroups, erase_map(f));
    std::erase_if(p.overgroups, [](const std::set<int>& g) { return g.empty(); });
  }
  if (!p.well_formed()) fail("arc deletion leaves a malformed cirquent");
  return p;
}

Cirquent15 apply_forward(const Cirquent15& p, const CL15RuleInstance& inst) {
  if (!p.well_formed()) fail("malformed premise cirquent");
  int n = static_cast<int>(p.oformulas.size());
  int mu = static_cast<int>(p.undergroups.size());
  int mo = static_cast<int>(p.overgroups.size());
  int i = inst.i;
  Cirquent15 c = p;
  switch (inst.tag) {
    case CL15RuleInstance::A:
      fail("the axiom has no premise");
    case CL15RuleInstance::EUnder:
      if (i < 0 || i + 1 >= mu) fail("undergroup exchange position out of range");
      std::swap(c.undergroups[i], c.undergroups[i + 1]);
      return c;
    case CL15RuleInstance::EOver:
      if (i < 0 || i + 1 >= mo) fail("overgroup exchange position out of range");
      std::swap(c.overgroups[i], c.overgroups[i + 1]);
      return c;
    case CL15RuleInstance::EOformula: {
      if (i < 0 || i + 1 >= n) fail("oformula exchange position out of range");
      std::swap(c.oformulas[i], c.oformulas[i + 1]);
      auto swapmap = [i](int j) {
        return j == i ? i + 1 : (j == i + 1 ? i : j);
      };
      map_groups(c.undergroups, swapmap);
      map_groups(c.overgroups, swapmap);
      return c;
    }
    case CL15RuleInstance::DUnder:
      if (i < 0 || i >= mu) fail("duplicated undergroup out of range");
      c.undergroups.insert(c.undergroups.begin() + i + 1, p.undergroups[i]);
      return c;
    case CL15RuleInstance::DOver:
      if (i < 0 || i >= mo) fail("duplicated overgroup out of range");
      c.overgroups.insert(c.overgroups.begin() + i + 1, p.overgroups[i]);
      return c;
    case CL15RuleInstance::M:
      if (i < 0 || i + 1 >= mo) fail("merged overgroup position out of range");
      c.overgroups[i].insert(p.overgroups[i + 1].begin(),
                             p.overgroups[i + 1].end());
      c.overgroups.erase(c.overgroups.begin() + i + 1);
      return c;
    case CL15RuleInstance::C: {
      if (i < 0 || i + 1 >= n) fail("contraction position out of range");
      if (p.oformulas[i] != p.oformulas[i + 1])
        fail("contracted oformulas differ");
      if (p.oformulas[i]->kind != Conn::Cobrec)
        fail("contracted oformula is not corecurrence-rooted");
      if (!same_membership(p, i, i + 1))
        fail("contracted copies are not in the same groups");
      c.oformulas.erase(c.oformulas.begin() + i + 1);
      map_groups(c.undergroups, merge_map(i));
      map_groups(c.overgroups, merge_map(i));
      return c;
    }
    case CL15RuleInstance::OrI: {
      if (i < 0 || i + 1 >= n) fail("disjunction position out of range");
      Formula F = p.oformulas[i], G = p.oformulas[i + 1];
      Formula H = inst.formula ? inst.formula : mk(Conn::Or, {F, G});
      if (!combines(Conn::Or, H, F, G))
        fail("introduced formula is not the disjunction of the adjacent oformulas");
      if (!same_membership(p, i, i + 1))
        fail("disjuncts are not in the same groups");
      c.oformulas[i] = H;
      c.oformulas.erase(c.oformulas.begin() + i + 1);
      map_groups(c.undergroups, merge_map(i));
      map_groups(c.overgroups, merge_map(i));
      return c;
    }
    case CL15RuleInstance::AndI: {
      if (i < 0 || i + 1 >= n) fail("conjunction position out of range");
      Formula F = p.oformulas[i], G = p.oformulas[i + 1];
      Formula H = inst.formula ? inst.formula : mk(Conn::And, {F, G});
      if (!combines(Conn::And, H, F, G))
        fail("introduced formula is not the conjunction of the adjacent oformulas");
      for (const auto& g : p.overgroups)
        if (g.count(i) != g.count(i + 1))
          fail("conjuncts are not in the same overgroups");
      Groups merged;
      for (int u = 0; u < mu; ++u) {
        const auto& U = p.undergroups[u];
        if (U.count(i)) {
          if (U.count(i + 1)) fail("an undergroup contains both conjuncts");
          if (u + 1 >= mu)
            fail("left-conjunct undergroup not followed by its partner");
          const auto& V = p.undergroups[u + 1];
          if (!V.count(i + 1) || V.count(i))
            fail("left-conjunct undergroup not followed by its partner");
          std::set<int> s1 = U, s2 = V;
          s1.erase(i);
          s2.erase(i + 1);
          if (s1 != s2)
            fail("paired undergroups disagree outside the conjuncts");
          merged.push_back(U);
          ++u;
        } else if (U.count(i + 1)) {
          fail("right-conjunct undergroup not preceded by its partner");
        } else {
          merged.push_back(U);
        }
      }
      c.undergroups = merged;
      c.oformulas[i] = H;
      c.oformulas.erase(c.oformulas.begin() + i + 1);
      map_groups(c.undergroups, merge_map(i));
      map_groups(c.overgroups, merge_map(i));
      return c;
    }
    case CL15RuleInstance::RecI: {
      if (i < 0 || i >= n) fail("recurrence position out of range");
      if (inst.j < 0 || inst.j >= mo) fail("removed overgroup out of range");
      if (p.overgroups[inst.j] != std::set<int>{i})
        fail("removed overgroup is not the oformula's private singleton");
      c.oformulas[i] = mk(Conn::Brec, {p.oformulas[i]});
      c.overgroups.erase(c.overgroups.begin() + inst.j);
      if (!c.well_formed())
        fail("conclusion loses the oformula's last overgroup");
      return c;
    }
    case CL15RuleInstance::CorecI: {
      if (i < 0 || i >= n) fail("corecurrence position out of range");
      for (int s : inst.over_subset) {
        if (s < 0 || s >= mo || !p.overgroups[s].count(i))
          fail("an additional overgroup does not contain the oformula");
      }
      c.oformulas[i] = mk(Conn::Cobrec, {p.oformulas[i]});
      for (int s : inst.over_subset) c.overgroups[s].erase(i);
      if (!c.well_formed())
        fail("dropping the additional arcs leaves a malformed cirquent");
      return c;
    }
    case CL15RuleInstance::W: {
      if (!inst.formula) {
        int u = inst.i, f = inst.j;
        if (u < 0 || u >= mu || f < 0 || f >= n)
          fail("weakening arc positions out of range");
        if (p.undergroups[u].count(f)) fail("weakened arc already present");
        c.undergroups[u].insert(f);
        return c;
      }
      // Reintroduce an oformula deleted by the weakening cascade.
      Formula F = normalize(inst.formula);
      int t = inst.insert_at;
      if (t < 0 || t > n) fail("weakening insertion index out of range");
      c.oformulas.insert(c.oformulas.begin() + t, F);
      map_groups(c.undergroups, insert_map(t));
      map_groups(c.overgroups, insert_map(t));
      int u = inst.i;
      if (u < 0 || u >= mu) fail("weakened undergroup out of range");
      c.undergroups[u].insert(t);
      for (int s : inst.over_subset) {
        if (s < 0 || s >= static_cast<int>(c.overgroups.size()))
          fail("weakening overgroup index out of range");
        c.overgroups[s].insert(t);
      }
      std::vector<int> fresh = inst.new_overgroups;
      std::sort(fresh.begin(), fresh.end());
      for (int pos : fresh) {
        if (pos < 0 || pos > static_cast<int>(c.overgroups.size()))
          fail("weakening overgroup insertion index out of range");
        c.overgroups.insert(c.overgroups.begin() + pos, std::set<int>{t});
      }
      if (!c.well_formed()) fail("weakening conclusion is malformed");
      Cirquent15 back;
      try {
        back = weaken_delete(c, u, t);
      } catch (const std::invalid_argument&) {
        fail("weakening cascade mismatch");
      }
      if (back != p) fail("weakening cascade mismatch");
      return c;
    }
  }
  fail("unknown rule");
}

// ---------------------------------------------------------------------------
// Bottom-up premise enumeration.

namespace {

Cirquent15 with_duplicate_oformula(const Cirquent15& c, int i) {
  Cirquent15 p = c;
  p.oformulas.insert(p.oformulas.begin() + i + 1, c.oformulas[i]);
  map_groups(p.undergroups, insert_map(i + 1));
  map_groups(p.overgroups, insert_map(i + 1));
  for (auto& g : p.undergroups)
    if (g.count(i)) g.insert(i + 1);
  for (auto& g : p.overgroups)
    if (g.count(i)) g.insert(i + 1);
  return p;
}

// Premise shared by the OrI and AndI inverses before the undergroup rework:
// the connective's two halves sit at i, i+1 with the original's memberships.
Cirquent15 with_split_oformula(const Cirquent15& c, int i, Formula F,
                               Formula G) {
  Cirquent15 p = with_duplicate_oformula(c, i);
  p.oformulas[i] = F;
  p.oformulas[i + 1] = G;
  return p;
}

} // namespace

std::vector<std::pair<Cirquent15, CL15RuleInstance>> enumerate_premises(
    const Cirquent15& c, CL15RuleInstance::Tag tag) {
  using Inst = CL15RuleInstance;
  if (!c.well_formed()) fail("malformed cirquent");
  std::vector<std::pair<Cirquent15, Inst>> out;
  int n = static_cast<int>(c.oformulas.size());
  int mu = static_cast<int>(c.undergroups.size());
  int mo = static_cast<int>(c.overgroups.size());
  switch (tag) {
    case Inst::A:
      break;
    case Inst::EUnder:
      for (int i = 0; i + 1 < mu; ++i) {
        Cirquent15 p = c;
        std::swap(p.undergroups[i], p.undergroups[i + 1]);
        out.push_back({p, Inst{Inst::EUnder, i}});
      }
      break;
    case Inst::EOver:
      for (int i = 0; i + 1 < mo; ++i) {
        Cirquent15 p = c;
        std::swap(p.overgroups[i], p.overgroups[i + 1]);
        out.push_back({p, Inst{Inst::EOver, i}});
      }
      break;
    case Inst::EOformula:
      for (int i = 0; i + 1 < n; ++i) {
        Inst inst{Inst::EOformula, i};
        out.push_back({apply_forward(c, inst), inst}); // self-inverse
      }
      break;
    case Inst::DUnder:
      for (int i = 0; i + 1 < mu; ++i) {
        if (c.undergroups[i] != c.undergroups[i + 1]) continue;
        Cirquent15 p = c;
        p.undergroups.erase(p.undergroups.begin() + i + 1);
        out.push_back({p, Inst{Inst::DUnder, i}});
      }
      break;
    case Inst::DOver:
      for (int i = 0; i + 1 < mo; ++i) {
        if (c.overgroups[i] != c.overgroups[i + 1]) continue;
        Cirquent15 p = c;
        p.overgroups.erase(p.overgroups.begin() + i + 1);
        out.push_back({p, Inst{Inst::DOver, i}});
      }
      break;
    case Inst::M:
      for (int g = 0; g < mo; ++g) {
        std::vector<int> mem(c.overgroups[g].begin(), c.overgroups[g].end());
        int k = static_cast<int>(mem.size());
        if (k > 12) fail("overgroup too large to enumerate merge splits");
        long total = 1;
        for (int t = 0; t < k; ++t) total *= 3;
        for (long code = 0; code < total; ++code) {
          std::set<int> left, right;
          long rem = code;
          for (int t = 0; t < k; ++t) {
            switch (rem % 3) {
              case 0: left.insert(mem[t]); break;
              case 1: right.insert(mem[t]); break;
              default:
                left.insert(mem[t]);
                right.insert(mem[t]);
            }
            rem /= 3;
          }
          if (left.empty() || right.empty()) continue;
          Cirquent15 p = c;
          p.overgroups[g] = left;
          p.overgroups.insert(p.overgroups.begin() + g + 1, right);
          out.push_back({p, Inst{Inst::M, g}});
        }
      }
      break;
    case Inst::W:
      for (int u = 0; u < mu; ++u) {
        if (c.undergroups[u].size() < 2) continue;
        for (int f : c.undergroups[u]) {
          Cirquent15 p;
          try {
            p = weaken_delete(c, u, f);
          } catch (const std::invalid_argument&) {
            continue;
          }
          Inst inst{Inst::W, u, f};
          if (static_cast<int>(p.oformulas.size()) < n) {
            // The deletion cascaded; record the reintroduction parameters.
            inst.j = -1;
            inst.formula = c.oformulas[f];
            inst.insert_at = f;
            int deleted_before = 0;
            inst.over_subset.clear();
            inst.new_overgroups.clear();
            for (int s = 0; s < mo; ++s) {
              if (c.overgroups[s] == std::set<int>{f}) {
                inst.new_overgroups.push_back(s);
                ++deleted_before;
              } else if (c.overgroups[s].count(f)) {
                inst.over_subset.insert(s - deleted_before);
              }
            }
          }
          out.push_back({p, inst});
        }
      }
      break;
    case Inst::C:
      for (int i = 0; i < n; ++i) {
        if (c.oformulas[i]->kind != Conn::Cobrec) continue;
        out.push_back({with_duplicate_oformula(c, i), Inst{Inst::C, i}});
      }
      break;
    case Inst::OrI:
      for (int i = 0; i < n; ++i) {
        if (c.oformulas[i]->kind != Conn::Or) continue;
        for (auto& [F, G] : splits(c.oformulas[i])) {
          Inst inst{Inst::OrI, i};
          inst.formula = c.oformulas[i];
          out.push_back({with_split_oformula(c, i, F, G), inst});
        }
      }
      break;
    case Inst::AndI:
      for (int i = 0; i < n; ++i) {
        if (c.oformulas[i]->kind != Conn::And) continue;
        for (auto& [F, G] : splits(c.oformulas[i])) {
          Cirquent15 p = with_split_oformula(c, i, F, G);
          Groups rebuilt;
          for (const auto& U : p.undergroups) {
            if (U.count(i)) {
              std::set<int> s = U;
              s.erase(i + 1);
              rebuilt.push_back(s);
              s = U;
              s.erase(i);
              rebuilt.push_back(s);
            } else {
              rebuilt.push_back(U);
            }
          }
          p.undergroups = rebuilt;
          Inst inst{Inst::AndI, i};
          inst.formula = c.oformulas[i];
          out.push_back({p, inst});
        }
      }
      break;
    case Inst::RecI:
      for (int i = 0; i < n; ++i) {
        if (c.oformulas[i]->kind != Conn::Brec) continue;
        for (int j = 0; j <= mo; ++j) {
          Cirquent15 p = c;
          p.oformulas[i] = c.oformulas[i]->args[0];
          p.overgroups.insert(p.overgroups.begin() + j, std::set<int>{i});
          out.push_back({p, Inst{Inst::RecI, i, j}});
        }
      }
      break;
    case Inst::CorecI:
      for (int i = 0; i < n; ++i) {
        if (c.oformulas[i]->kind != Conn::Cobrec) continue;
        std::vector<int> cand;
        for (int s = 0; s < mo; ++s)
          if (!c.overgroups[s].count(i)) cand.push_back(s);
        if (cand.size() > 16)
          fail("too many overgroups to enumerate corecurrence subsets");
        for (std::uint32_t mask = 0; mask < (1u << cand.size()); ++mask) {
          Cirquent15 p = c;
          p.oformulas[i] = c.oformulas[i]->args[0];
          Inst inst{Inst::CorecI, i};
          for (size_t b = 0; b < cand.size(); ++b) {
            if (mask & (1u << b)) {
              p.overgroups[cand[b]].insert(i);
              inst.over_subset.insert(cand[b]);
            }
          }
          out.push_back({p, inst});
        }
      }
      break;
  }
  return out;
}

bool check_proof(const CL15Proof& p, std::string* error) {
  auto put = [&](const std::string& m) {
    if (error) *error = m;
    return false;
  };
  if (!p.target) return put("missing target");
  Cirquent15 tgt;
  try {
    tgt = formula_to_target(p.target);
  } catch (const std::invalid_argument& e) {
    return put(e.what());
  }
  if (p.steps.empty()) return put("empty proof");
  if (p.steps[0].inst.tag != CL15RuleInstance::A)
    return put("first step is not an axiom");
  if (!axiom_match(p.steps[0].cirquent))
    return put("first cirquent is not an axiom conclusion");
  for (size_t k = 1; k < p.steps.size(); ++k) {
    if (p.steps[k].inst.tag == CL15RuleInstance::A)
      return put("step " + std::to_string(k) + ": axiom after the first step");
    Cirquent15 got;
    try {
      got = apply_forward(p.steps[k - 1].cirquent, p.steps[k].inst);
    } catch (const std::invalid_argument& e) {
      return put("step " + std::to_string(k) + ": " + e.what());
    }
    if (got != p.steps[k].cirquent)
      return put("step " + std::to_string(k) +
                 ": cirquent does not follow by the recorded instance");
  }
  if (p.steps.back().cirquent != tgt)
    return put("final cirquent is not the target");
  return true;
}

// ---------------------------------------------------------------------------
// Canonical keys, isomorphism, exchange chains.

namespace {

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

// Renders are the basis of every canonical comparison; cache them per node.
const std::string& frender(Formula f) {
  static std::map<Formula, std::string> cache;
  auto it = cache.find(f);
  if (it == cache.end())
    it = cache.emplace(f, render(f, Style::Ascii)).first;
  return it->second;
}

// Render ranks within one cirquent: equal formulas share a rank and ranks
// order exactly as the rendered strings do.
std::vector<int> render_ranks(const Cirquent15& c) {
  int n = static_cast<int>(c.oformulas.size());
  std::vector<std::string> sorted;
  sorted.reserve(n);
  for (int i = 0; i < n; ++i) sorted.push_back(frender(c.oformulas[i]));
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i)
    rank[i] = static_cast<int>(
        std::lower_bound(sorted.begin(), sorted.end(), frender(c.oformulas[i])) -
        sorted.begin());
  return rank;
}

// Interchangeability classes of oformulas under iterated refinement by
// membership signatures over both group levels; class order is canonical.
std::vector<std::vector<int>> refine_classes15(const Cirquent15& c,
                                               const std::vector<int>& rank) {
  int n = static_cast<int>(c.oformulas.size());
  std::vector<int> col = rank;
  std::map<std::vector<int>, std::vector<int>> buckets;
  int ncolors = 0;
  for (int round = 0; round <= n; ++round) {
    auto level_sigs = [&](const Groups& gs) {
      std::vector<std::vector<int>> out;
      out.reserve(gs.size());
      for (const auto& g : gs) {
        std::vector<int> v;
        v.reserve(g.size());
        for (int j : g) v.push_back(col[j]);
        std::sort(v.begin(), v.end());
        out.push_back(std::move(v));
      }
      return out;
    };
    std::vector<std::vector<int>> us = level_sigs(c.undergroups);
    std::vector<std::vector<int>> os = level_sigs(c.overgroups);
    buckets.clear();
    for (int i = 0; i < n; ++i) {
      std::vector<std::vector<int>> mine_u, mine_o;
      for (size_t g = 0; g < c.undergroups.size(); ++g)
        if (c.undergroups[g].count(i)) mine_u.push_back(us[g]);
      for (size_t g = 0; g < c.overgroups.size(); ++g)
        if (c.overgroups[g].count(i)) mine_o.push_back(os[g]);
      std::sort(mine_u.begin(), mine_u.end());
      std::sort(mine_o.begin(), mine_o.end());
      std::vector<int> sig{col[i], -1};
      for (auto& v : mine_u) {
        sig.insert(sig.end(), v.begin(), v.end());
        sig.push_back(-2);
      }
      sig.push_back(-3);
      for (auto& v : mine_o) {
        sig.insert(sig.end(), v.begin(), v.end());
        sig.push_back(-2);
      }
      buckets[sig].push_back(i);
    }
    int id = 0;
    for (auto& [sig, pos] : buckets) {
      for (int p : pos) col[p] = id;
      ++id;
    }
    if (id == ncolors) break;
    ncolors = id;
  }
  std::vector<std::vector<int>> classes;
  for (auto& [sig, pos] : buckets) classes.push_back(pos);
  return classes;
}

// Integer encoding compared during tie-breaking; rank order coincides with
// the final string key's order.
struct Enc {
  std::vector<int> pool;
  std::vector<std::vector<int>> under, over;
  auto operator<=>(const Enc&) const = default;
};

std::vector<std::vector<int>> encode_level(const Groups& gs,
                                           const std::vector<int>& pos_of,
                                           std::vector<int>* perm) {
  int m = static_cast<int>(gs.size());
  std::vector<std::pair<std::vector<int>, int>> mapped(m);
  for (int g = 0; g < m; ++g) {
    std::vector<int> v;
    v.reserve(gs[g].size());
    for (int j : gs[g]) v.push_back(pos_of[j]);
    std::sort(v.begin(), v.end());
    mapped[g] = {std::move(v), g};
  }
  std::stable_sort(mapped.begin(), mapped.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (perm) {
    perm->assign(m, 0);
    for (int t = 0; t < m; ++t) (*perm)[mapped[t].second] = t;
  }
  std::vector<std::vector<int>> out;
  out.reserve(m);
  for (auto& [v, orig] : mapped) out.push_back(std::move(v));
  return out;
}

Enc encode15(const Cirquent15& c, const std::vector<int>& rank,
             const std::vector<int>& pos_of, std::vector<int>* under_perm,
             std::vector<int>* over_perm) {
  int n = static_cast<int>(c.oformulas.size());
  Enc e;
  e.pool.resize(n);
  for (int i = 0; i < n; ++i) e.pool[pos_of[i]] = rank[i];
  e.under = encode_level(c.undergroups, pos_of, under_perm);
  e.over = encode_level(c.overgroups, pos_of, over_perm);
  return e;
}

struct Canon15 {
  std::string key;
  std::vector<int> oform_perm; // old position -> canonical position
  std::vector<int> under_perm;
  std::vector<int> over_perm;
  Cirquent15 rep;
};

constexpr long kTieCap15 = 5040;

Canon15 canonicalize15(const Cirquent15& c) {
  int n = static_cast<int>(c.oformulas.size());
  std::vector<int> rank = render_ranks(c);
  std::vector<std::vector<int>> classes = refine_classes15(c, rank);
  long perms = 1;
  for (const auto& cl : classes)
    for (size_t k = 2; k <= cl.size() && perms <= kTieCap15; ++k)
      perms *= static_cast<long>(k);

  std::vector<int> pos_of(n, -1);
  {
    int next = 0;
    for (const auto& cl : classes)
      for (int i : cl) pos_of[i] = next++;
  }
  Canon15 best;
  best.oform_perm = pos_of;
  Enc best_enc = encode15(c, rank, pos_of, &best.under_perm, &best.over_perm);

  if (perms > 1 && perms <= kTieCap15) {
    std::vector<std::vector<int>> perm_state = classes;
    std::function<void(size_t)> rec = [&](size_t ci) {
      if (ci == classes.size()) {
        std::vector<int> cand(n, -1);
        int next = 0;
        for (const auto& cl : perm_state)
          for (int i : cl) cand[i] = next++;
        std::vector<int> up, op;
        Enc enc = encode15(c, rank, cand, &up, &op);
        if (enc < best_enc) {
          best_enc = std::move(enc);
          best.oform_perm = cand;
          best.under_perm = up;
          best.over_perm = op;
        }
        return;
      }
      std::vector<int> cl = classes[ci];
      std::sort(cl.begin(), cl.end());
      do {
        perm_state[ci] = cl;
        rec(ci + 1);
      } while (std::next_permutation(cl.begin(), cl.end()));
    };
    rec(0);
  }

  {
    std::vector<std::string> part(n);
    for (int i = 0; i < n; ++i)
      part[best.oform_perm[i]] = frender(c.oformulas[i]);
    best.key = join(part, '\x1f');
    auto level_str = [](const std::vector<std::vector<int>>& gs) {
      std::string out;
      for (const auto& v : gs) {
        out += '[';
        for (size_t i = 0; i < v.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(v[i]);
        }
        out += ']';
      }
      return out;
    };
    best.key += "!u!" + level_str(best_enc.under);
    best.key += "!o!" + level_str(best_enc.over);
  }

  best.rep.oformulas.resize(n);
  for (int i = 0; i < n; ++i)
    best.rep.oformulas[best.oform_perm[i]] = c.oformulas[i];
  auto build_groups = [&](const Groups& gs, const std::vector<int>& perm) {
    Groups out(gs.size());
    for (size_t g = 0; g < gs.size(); ++g) {
      std::set<int> ng;
      for (int j : gs[g]) ng.insert(best.oform_perm[j]);
      out[perm[g]] = ng;
    }
    return out;
  };
  best.rep.undergroups = build_groups(c.undergroups, best.under_perm);
  best.rep.overgroups = build_groups(c.overgroups, best.over_perm);
  return best;
}

// An oformula bijection from -> to preserving formulas and both group
// structures as multisets.
std::optional<std::vector<int>> find_isomorphism15(const Cirquent15& from,
                                                   const Cirquent15& to) {
  int n = static_cast<int>(from.oformulas.size());
  if (static_cast<int>(to.oformulas.size()) != n) return std::nullopt;
  if (from.undergroups.size() != to.undergroups.size()) return std::nullopt;
  if (from.overgroups.size() != to.overgroups.size()) return std::nullopt;
  std::vector<int> bij(n, -1);
  std::vector<char> used(n, 0);
  auto level_match = [&](const Groups& fg, const Groups& tg) {
    std::vector<std::set<int>> mapped;
    for (const auto& g : fg) {
      std::set<int> ng;
      for (int j : g) ng.insert(bij[j]);
      mapped.push_back(ng);
    }
    std::sort(mapped.begin(), mapped.end());
    std::vector<std::set<int>> t(tg.begin(), tg.end());
    std::sort(t.begin(), t.end());
    return mapped == t;
  };
  std::function<bool(int)> rec = [&](int i) -> bool {
    if (i == n)
      return level_match(from.undergroups, to.undergroups) &&
             level_match(from.overgroups, to.overgroups);
    for (int t = 0; t < n; ++t) {
      if (used[t] || to.oformulas[t] != from.oformulas[i]) continue;
      bij[i] = t;
      used[t] = 1;
      if (rec(i + 1)) return true;
      used[t] = 0;
      bij[i] = -1;
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return bij;
}

// Exchange steps rewriting `from` into `to`; each emitted step carries the
// cirquent it produces.
std::vector<CL15Step> exchange_chain15(const Cirquent15& from,
                                       const Cirquent15& to) {
  std::vector<CL15Step> out;
  if (from == to) return out;
  auto bij = find_isomorphism15(from, to);
  if (!bij) throw std::logic_error("exchange chain: cirquents not equivalent");
  Cirquent15 cur = from;
  int n = static_cast<int>(from.oformulas.size());
  std::vector<int> want = *bij;
  for (int pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (int i = 0; i + 1 < n; ++i) {
      if (want[i] > want[i + 1]) {
        CL15RuleInstance r{CL15RuleInstance::EOformula, i};
        cur = apply_forward(cur, r);
        std::swap(want[i], want[i + 1]);
        out.push_back({cur, r});
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  auto sort_level = [&](Groups Cirquent15::*member, CL15RuleInstance::Tag tag) {
    const Groups& target = to.*member;
    int m = static_cast<int>(target.size());
    std::vector<int> gwant(m, -1);
    std::vector<char> taken(m, 0);
    const Groups& curg = cur.*member;
    for (int g = 0; g < m; ++g) {
      for (int t = 0; t < m; ++t) {
        if (!taken[t] && target[t] == curg[g]) {
          gwant[g] = t;
          taken[t] = 1;
          break;
        }
      }
      if (gwant[g] < 0) throw std::logic_error("exchange chain: group mismatch");
    }
    for (int pass = 0; pass < m; ++pass) {
      bool swapped = false;
      for (int i = 0; i + 1 < m; ++i) {
        if (gwant[i] > gwant[i + 1]) {
          CL15RuleInstance r{tag, i};
          cur = apply_forward(cur, r);
          std::swap(gwant[i], gwant[i + 1]);
          out.push_back({cur, r});
          swapped = true;
        }
      }
      if (!swapped) break;
    }
  };
  sort_level(&Cirquent15::undergroups, CL15RuleInstance::EUnder);
  sort_level(&Cirquent15::overgroups, CL15RuleInstance::EOver);
  if (cur != to) throw std::logic_error("exchange chain: failed to converge");
  return out;
}

} // namespace

std::string cl15_canonical_key(const Cirquent15& c) {
  return canonicalize15(c).key;
}

namespace {

Formula comm_sort(Formula f) {
  if (f->kind == Conn::Lit || f->args.empty()) return f;
  std::vector<Formula> args;
  for (Formula a : f->args) args.push_back(comm_sort(a));
  if (f->kind == Conn::And || f->kind == Conn::Or)
    std::sort(args.begin(), args.end(), [](Formula a, Formula b) {
      return render(a, Style::Ascii) < render(b, Style::Ascii);
    });
  return mk(f->kind, std::move(args));
}

} // namespace

std::string cl15_canonical_key_coarse(const Cirquent15& c) {
  Cirquent15 d = c;
  for (auto& f : d.oformulas) f = comm_sort(f);
  return canonicalize15(d).key;
}

// ---------------------------------------------------------------------------
// Bounded bottom-up decision search.

namespace {

bool has_cobrec(Formula f) {
  if (f->kind == Conn::Cobrec) return true;
  for (Formula a : f->args)
    if (has_cobrec(a)) return true;
  return false;
}

bool eval_erased(Formula f, const std::map<std::string, bool>& asg) {
  switch (f->kind) {
    case Conn::Lit: return asg.at(f->atom) != f->neg;
    case Conn::Brec:
    case Conn::Cobrec: return eval_erased(f->args[0], asg);
    case Conn::And:
      for (Formula a : f->args)
        if (!eval_erased(a, asg)) return false;
      return true;
    case Conn::Or:
      for (Formula a : f->args)
        if (eval_erased(a, asg)) return true;
      return false;
    default: fail("formula outside the CL15 language");
  }
}

// Reading undergroups as disjunctions of their members with the recurrence
// operators erased, every cirquent of a proof is classically valid: axiom
// conclusions are, and each rule preserves validity downward. Premises
// failing this test can be pruned exactly.
bool classically_valid(const Cirquent15& c) {
  std::set<std::string> names;
  for (Formula f : c.oformulas) collect_atoms(f, names);
  std::vector<std::string> vars(names.begin(), names.end());
  if (vars.size() > 20) return true;
  std::map<std::string, bool> asg;
  for (std::uint32_t mask = 0; mask < (1u << vars.size()); ++mask) {
    for (size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = (mask >> i) & 1;
    std::vector<char> val(c.oformulas.size());
    for (size_t i = 0; i < c.oformulas.size(); ++i)
      val[i] = eval_erased(c.oformulas[i], asg);
    for (const auto& g : c.undergroups) {
      bool any = false;
      for (int j : g)
        if (val[j]) { any = true; break; }
      if (!any) return false;
    }
  }
  return true;
}

// Exchange-equivalent to an axiom conclusion: the undergroups partition the
// oformulas into oriented dual pairs and each oformula's overgroup is its
// undergroup.
bool axiom_like(const Cirquent15& c) {
  int n = static_cast<int>(c.oformulas.size());
  if (n % 2) return false;
  if (static_cast<int>(c.undergroups.size()) != n / 2) return false;
  if (static_cast<int>(c.overgroups.size()) != n / 2) return false;
  std::vector<int> under_of(n, -1), over_of(n, -1);
  for (size_t g = 0; g < c.undergroups.size(); ++g) {
    if (c.undergroups[g].size() != 2) return false;
    for (int j : c.undergroups[g]) {
      if (under_of[j] >= 0) return false;
      under_of[j] = static_cast<int>(g);
    }
  }
  for (size_t g = 0; g < c.overgroups.size(); ++g) {
    for (int j : c.overgroups[g]) {
      if (over_of[j] >= 0) return false;
      over_of[j] = static_cast<int>(g);
    }
  }
  for (int i = 0; i < n; ++i) {
    if (under_of[i] < 0 || over_of[i] < 0) return false;
    if (c.overgroups[over_of[i]] != c.undergroups[under_of[i]]) return false;
  }
  for (const auto& g : c.undergroups) {
    auto it = g.begin();
    int a = *it++, b = *it;
    if (c.oformulas[a] != negf(c.oformulas[b])) return false;
    if (leftmost_neg(c.oformulas[a]) == leftmost_neg(c.oformulas[b]))
      return false;
  }
  return true;
}

Cirquent15 axiom_layout(const Cirquent15& c) {
  Cirquent15 L;
  int k = 0;
  for (const auto& g : c.undergroups) {
    auto it = g.begin();
    int a = *it++, b = *it;
    if (!leftmost_neg(c.oformulas[a])) std::swap(a, b);
    L.oformulas.push_back(c.oformulas[a]);
    L.oformulas.push_back(c.oformulas[b]);
    L.undergroups.push_back({2 * k, 2 * k + 1});
    L.overgroups.push_back({2 * k, 2 * k + 1});
    ++k;
  }
  return L;
}

struct SearchEdge {
  CL15RuleInstance inst;
  Cirquent15 prem_layout;
  Cirquent15 concl_layout;
  std::string prem_key;
};

struct BudgetUp {};

class Searcher15 {
 public:
  explicit Searcher15(const CL15SearchConfig& cfg) : cfg_(cfg) {
    if (cfg_.mode == CL15SearchConfig::cl15c) cfg_.contraction_budget = 0;
  }

  CL15Verdict run(Formula f) {
    Cirquent15 tgt = formula_to_target(f);
    Canon15 rc = canonicalize15(tgt);
    reps_[rc.key] = rc.rep;
    bool ok = false;
    bool aborted = false;
    // Contraction can only ever fire on a corecurrence oformula, and no rule
    // introduces one bottom-up, so corecurrence-free targets need stage 0 only.
    int top_budget = has_cobrec(tgt.oformulas[0]) ? cfg_.contraction_budget : 0;
    try {
      // Staged contraction budgets: exhausting budget b before enabling b+1
      // keeps the found proof identical for every sufficient budget and
      // searches the cheap contraction-free space first. Within a stage,
      // iterative deepening finds shallow proofs before the group rewiring
      // space opens up; the failure memo carries across rounds and stages.
      for (int b = 0; b <= top_budget && !ok; ++b) {
        for (int d = 4; !ok; d += 4) {
          if (d > cfg_.max_proof_length) d = cfg_.max_proof_length;
          limit_hit_ = false;
          ok = dfs(rc.key, d, b);
          if (d >= cfg_.max_proof_length) break;
        }
      }
    } catch (const BudgetUp&) {
      aborted = true;
    }
    if (ok) {
      CL15Verdict v{VerdictKind::Provable, build(rc.key, tgt, f), ""};
      return v;
    }
    std::string note =
        "contraction budget " + std::to_string(cfg_.contraction_budget) +
        ", node budget " + std::to_string(cfg_.max_nodes) +
        ", proof-length budget " + std::to_string(cfg_.max_proof_length) +
        ", oformula cap " + std::to_string(cfg_.max_oformulas);
    if (cfg_.mode == CL15SearchConfig::depth_limited && (aborted || limit_hit_))
      return {VerdictKind::ResourceExhausted, std::nullopt, note};
    return {VerdictKind::Unprovable, std::nullopt,
            "unprovable under " + note};
  }

 private:
  using Tag = CL15RuleInstance::Tag;

  bool dfs(const std::string& key, int depth, int cbudget) {
    if (++visits_ > cfg_.max_nodes) throw BudgetUp{};
    if (chosen_.count(key)) return true;
    std::string memo_key = key + "#" + std::to_string(cbudget);
    auto it = fail_depth_.find(memo_key);
    if (it != fail_depth_.end() && it->second >= depth) return false;
    const Cirquent15 rep = reps_.at(key);
    if (depth <= 0) {
      limit_hit_ = true;
      return false;
    }
    on_branch_.insert(key);
    std::set<std::string> tried;
    bool found = false;
    static constexpr Tag kOrder[] = {
        CL15RuleInstance::OrI,    CL15RuleInstance::AndI,
        CL15RuleInstance::RecI,   CL15RuleInstance::CorecI,
        CL15RuleInstance::A,      CL15RuleInstance::DUnder,
        CL15RuleInstance::DOver,  CL15RuleInstance::W,
        CL15RuleInstance::M,      CL15RuleInstance::C};
    for (Tag tag : kOrder) {
      if (found) break;
      if (tag == CL15RuleInstance::A) {
        if (axiom_like(rep)) {
          SearchEdge e;
          e.inst = {CL15RuleInstance::A};
          chosen_[key] = e;
          found = true;
        }
        continue;
      }
      if (tag == CL15RuleInstance::C && cbudget <= 0) continue;
      if ((tag == CL15RuleInstance::DUnder || tag == CL15RuleInstance::DOver)) {
        found = try_merge_dups(rep, key, tag, depth, cbudget, tried);
        continue;
      }
      std::vector<std::pair<Cirquent15, CL15RuleInstance>> prems;
      try {
        prems = enumerate_premises(rep, tag);
      } catch (const std::invalid_argument&) {
        limit_hit_ = true; // enumeration cap hit; treated as a bound
        continue;
      }
      for (auto& [prem, inst] : prems) {
        int next_cb = tag == CL15RuleInstance::C ? cbudget - 1 : cbudget;
        if (try_edge(prem, inst, rep, key, depth, next_cb, tried)) {
          found = true;
          break;
        }
      }
    }
    on_branch_.erase(key);
    if (!found) {
      int& best = fail_depth_[memo_key];
      best = std::max(best, depth);
    }
    return found;
  }

  // Duplication inverses, generalized to any (not necessarily adjacent)
  // identical pair of groups; the literal layouts are rebuilt around index 0
  // of the pair so that apply_forward holds exactly.
  bool try_merge_dups(const Cirquent15& rep, const std::string& key, Tag tag,
                      int depth, int cbudget, std::set<std::string>& tried) {
    auto member = tag == CL15RuleInstance::DUnder ? &Cirquent15::undergroups
                                                  : &Cirquent15::overgroups;
    const Groups& gs = rep.*member;
    int m = static_cast<int>(gs.size());
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        if (gs[a] != gs[b]) continue;
        Cirquent15 prem = rep;
        (prem.*member).erase((prem.*member).begin() + b);
        CL15RuleInstance inst{tag, a};
        Cirquent15 concl = apply_forward(prem, inst);
        if (try_edge(prem, inst, concl, key, depth, cbudget, tried))
          return true;
      }
    }
    return false;
  }

  bool try_edge(const Cirquent15& prem, const CL15RuleInstance& inst,
                const Cirquent15& concl_layout, const std::string& key,
                int depth, int cbudget, std::set<std::string>& tried) {
    size_t group_cap = prem.oformulas.size() + 2;
    if (static_cast<int>(prem.oformulas.size()) > cfg_.max_oformulas ||
        prem.undergroups.size() > group_cap ||
        prem.overgroups.size() > group_cap) {
      limit_hit_ = true;
      return false;
    }
    if (!classically_valid(prem)) return false;
    Canon15 canon = canonicalize15(prem);
    if (on_branch_.count(canon.key)) return false;
    if (!tried.insert(canon.key + "#" + std::to_string(cbudget)).second)
      return false;
    reps_.emplace(canon.key, canon.rep);
    if (!dfs(canon.key, depth - 1, cbudget)) return false;
    SearchEdge e{inst, prem, concl_layout, canon.key};
    chosen_[key] = e;
    return true;
  }

  CL15Proof build(const std::string& target_key, const Cirquent15& tgt,
                  Formula f) {
    std::vector<std::string> path;
    std::string k = target_key;
    while (true) {
      path.push_back(k);
      if (chosen_.at(k).inst.tag == CL15RuleInstance::A) break;
      k = chosen_.at(k).prem_key;
    }
    CL15Proof pr;
    pr.target = normalize(f);
    const Cirquent15& axrep = reps_.at(path.back());
    Cirquent15 L = axiom_layout(axrep);
    pr.steps.push_back({L, CL15RuleInstance{CL15RuleInstance::A}});
    append_chain(pr, L, axrep);
    Cirquent15 cur = axrep;
    for (int t = static_cast<int>(path.size()) - 2; t >= 0; --t) {
      const SearchEdge& e = chosen_.at(path[t]);
      append_chain(pr, cur, e.prem_layout);
      pr.steps.push_back({e.concl_layout, e.inst});
      const Cirquent15& rep = reps_.at(path[t]);
      append_chain(pr, e.concl_layout, rep);
      cur = rep;
    }
    append_chain(pr, cur, tgt);
    return pr;
  }

  void append_chain(CL15Proof& pr, const Cirquent15& from,
                    const Cirquent15& to) {
    for (auto& step : exchange_chain15(from, to)) pr.steps.push_back(step);
  }

  CL15SearchConfig cfg_;
  long visits_ = 0;
  bool limit_hit_ = false;
  std::map<std::string, Cirquent15> reps_;
  std::map<std::string, SearchEdge> chosen_;
  std::map<std::string, int> fail_depth_;
  std::set<std::string> on_branch_;
};

} // namespace

CL15Verdict decide_cl15(Formula f, const CL15SearchConfig& cfg) {
  Searcher15 s(cfg);
  return s.run(f);
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

nlohmann::json groups_to_json(const Groups& gs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& g : gs) out.push_back(std::vector<int>(g.begin(), g.end()));
  return out;
}

Groups groups_from_json(const nlohmann::json& j) {
  Groups out;
  for (const auto& g : j) out.push_back(std::set<int>(g.begin(), g.end()));
  return out;
}

const char* tag_name(CL15RuleInstance::Tag t) {
  switch (t) {
    case CL15RuleInstance::A: return "A";
    case CL15RuleInstance::EUnder: return "E-under";
    case CL15RuleInstance::EOformula: return "E-oformula";
    case CL15RuleInstance::EOver: return "E-over";
    case CL15RuleInstance::W: return "W";
    case CL15RuleInstance::C: return "C";
    case CL15RuleInstance::DUnder: return "D-under";
    case CL15RuleInstance::DOver: return "D-over";
    case CL15RuleInstance::M: return "M";
    case CL15RuleInstance::OrI: return "OrI";
    case CL15RuleInstance::AndI: return "AndI";
    case CL15RuleInstance::RecI: return "RecI";
    case CL15RuleInstance::CorecI: return "CorecI";
  }
  return "?";
}

CL15RuleInstance::Tag tag_from_name(const std::string& s) {
  for (int t = CL15RuleInstance::A; t <= CL15RuleInstance::CorecI; ++t) {
    auto tag = static_cast<CL15RuleInstance::Tag>(t);
    if (s == tag_name(tag)) return tag;
  }
  if (s == "axiom") return CL15RuleInstance::A;
  throw std::invalid_argument("unknown rule name: " + s);
}

nlohmann::json inst_to_json(const CL15RuleInstance& inst) {
  if (inst.tag == CL15RuleInstance::A) return "axiom";
  nlohmann::json params = nlohmann::json::object();
  if (inst.i >= 0) params["i"] = inst.i;
  if (inst.j >= 0) params["j"] = inst.j;
  if (inst.formula) params["formula"] = render(inst.formula, Style::Ascii);
  if (inst.tag == CL15RuleInstance::CorecI || inst.insert_at >= 0)
    params["over_subset"] =
        std::vector<int>(inst.over_subset.begin(), inst.over_subset.end());
  if (inst.insert_at >= 0) {
    params["insert_at"] = inst.insert_at;
    params["new_overgroups"] = inst.new_overgroups;
  }
  return {{"name", tag_name(inst.tag)}, {"params", params}};
}

CL15RuleInstance inst_from_json(const nlohmann::json& j) {
  CL15RuleInstance inst{CL15RuleInstance::A};
  if (j.is_string()) {
    inst.tag = tag_from_name(j.get<std::string>());
    return inst;
  }
  inst.tag = tag_from_name(j.at("name").get<std::string>());
  nlohmann::json params = j.value("params", nlohmann::json::object());
  inst.i = params.value("i", -1);
  inst.j = params.value("j", -1);
  if (params.contains("formula"))
    inst.formula = parse(params["formula"].get<std::string>());
  if (params.contains("over_subset"))
    for (int s : params["over_subset"]) inst.over_subset.insert(s);
  inst.insert_at = params.value("insert_at", -1);
  if (params.contains("new_overgroups"))
    inst.new_overgroups = params["new_overgroups"].get<std::vector<int>>();
  return inst;
}

} // namespace

nlohmann::json cirquent15_to_json(const Cirquent15& c) {
  nlohmann::json fs = nlohmann::json::array();
  for (Formula f : c.oformulas) fs.push_back(render(f, Style::Ascii));
  return {{"oformulas", fs},
          {"undergroups", groups_to_json(c.undergroups)},
          {"overgroups", groups_to_json(c.overgroups)}};
}

Cirquent15 cirquent15_from_json(const nlohmann::json& j) {
  Cirquent15 c;
  for (const auto& s : j.at("oformulas"))
    c.oformulas.push_back(normalize(parse(s.get<std::string>())));
  c.undergroups = groups_from_json(j.at("undergroups"));
  c.overgroups = groups_from_json(j.at("overgroups"));
  return c;
}

nlohmann::json cl15_proof_to_json(const CL15Proof& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : p.steps)
    steps.push_back({{"cirquent", cirquent15_to_json(s.cirquent)},
                     {"rule", inst_to_json(s.inst)}});
  return {{"system", "cl15"},
          {"target", render(p.target, Style::Ascii)},
          {"steps", steps}};
}

CL15Proof cl15_proof_from_json(const nlohmann::json& j) {
  if (j.value("system", "cl15") != std::string("cl15"))
    throw std::invalid_argument("proof is not for cl15");
  CL15Proof p;
  p.target = normalize(parse(j.at("target").get<std::string>()));
  for (const auto& s : j.at("steps"))
    p.steps.push_back(
        {cirquent15_from_json(s.at("cirquent")), inst_from_json(s.at("rule"))});
  return p;
}

std::string cirquent15_to_dot(const Cirquent15& c) {
  std::string out = "digraph cirquent15 {\n  rankdir=TB;\n";
  out += "  { rank=source;";
  for (size_t g = 0; g < c.overgroups.size(); ++g)
    out += " o" + std::to_string(g) + " [shape=point];";
  out += " }\n";
  for (size_t i = 0; i < c.oformulas.size(); ++i)
    out += "  f" + std::to_string(i) + " [shape=box, label=\"" +
           render(c.oformulas[i], Style::Ascii) + "\"];\n";
  out += "  { rank=sink;";
  for (size_t g = 0; g < c.undergroups.size(); ++g)
    out += " u" + std::to_string(g) + " [shape=point];";
  out += " }\n";
  for (size_t g = 0; g < c.overgroups.size(); ++g)
    for (int j : c.overgroups[g])
      out += "  o" + std::to_string(g) + " -> f" + std::to_string(j) + ";\n";
  for (size_t g = 0; g < c.undergroups.size(); ++g)
    for (int j : c.undergroups[g])
      out += "  f" + std::to_string(j) + " -> u" + std::to_string(g) + ";\n";
  out += "}\n";
  return out;
}

} // namespace col
