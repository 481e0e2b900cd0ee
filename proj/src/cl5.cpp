#include "col/cl5.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace col {

namespace {

[[noreturn]] void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}

Formula negf(Formula f) { return normalize(mk(Conn::Not, {f})); }

bool sig_ok(Formula f) {
  switch (f->kind) {
    case Conn::Lit: return true;
    case Conn::And:
    case Conn::Or:
      for (Formula x : f->args)
        if (!sig_ok(x)) return false;
      return true;
    default: return false;
  }
}

std::set<int> shift_from(const std::set<int>& g, int at, int delta) {
  std::set<int> out;
  for (int j : g) out.insert(j >= at ? j + delta : j);
  return out;
}

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

// All (F, G) splits of an n-ary node.
std::vector<std::pair<Formula, Formula>> splits(Formula H) {
  std::vector<std::pair<Formula, Formula>> out;
  int n = static_cast<int>(H->args.size());
  for (int k = 1; k < n; ++k)
    out.push_back({slice_combine(H->kind, H->args, 0, k),
                   slice_combine(H->kind, H->args, k, n)});
  return out;
}

} // namespace

bool ShallowCirquent::well_formed() const {
  for (const auto& g : groups)
    for (int j : g)
      if (j < 0 || j >= static_cast<int>(pool.size())) return false;
  if (pool.empty() && !groups.empty()) return false;
  return true;
}

bool or_combines(Formula H, Formula F, Formula G) {
  return combines(Conn::Or, H, F, G);
}

bool and_combines(Formula H, Formula F, Formula G) {
  return combines(Conn::And, H, F, G);
}

ShallowCirquent singleton_cirquent(Formula f) {
  return {{normalize(f)}, {{0}}};
}

ShallowCirquent apply_cl5(const std::vector<ShallowCirquent>& premises,
                          const CL5Rule& rule) {
  auto arity = [&](size_t k) {
    if (premises.size() != k) fail("rule arity mismatch");
  };
  auto one = [&]() -> const ShallowCirquent& {
    arity(1);
    return premises[0];
  };
  switch (rule.kind) {
    case CL5Rule::AxiomEmpty:
      arity(0);
      return {};
    case CL5Rule::AxiomIdentity: {
      arity(0);
      if (!rule.formula) fail("identity axiom needs a formula");
      Formula F = normalize(rule.formula);
      return {{negf(F), F}, {{0, 1}}};
    }
    case CL5Rule::Mix: {
      arity(2);
      ShallowCirquent out = premises[0];
      int off = static_cast<int>(out.pool.size());
      for (Formula f : premises[1].pool) out.pool.push_back(f);
      for (const auto& g : premises[1].groups) out.groups.push_back(shift_from(g, 0, off));
      return out;
    }
    case CL5Rule::ExchangeOformula: {
      ShallowCirquent c = one();
      int i = rule.i;
      if (i < 0 || i + 1 >= static_cast<int>(c.pool.size()))
        fail("oformula exchange position out of range");
      std::swap(c.pool[i], c.pool[i + 1]);
      for (auto& g : c.groups) {
        bool a = g.count(i), b = g.count(i + 1);
        if (a != b) {
          if (a) { g.erase(i); g.insert(i + 1); }
          else { g.erase(i + 1); g.insert(i); }
        }
      }
      return c;
    }
    case CL5Rule::ExchangeOgroup: {
      ShallowCirquent c = one();
      int i = rule.i;
      if (i < 0 || i + 1 >= static_cast<int>(c.groups.size()))
        fail("ogroup exchange position out of range");
      std::swap(c.groups[i], c.groups[i + 1]);
      return c;
    }
    case CL5Rule::WeakenPool: {
      ShallowCirquent c = one();
      int i = rule.i;
      if (i < 0 || i > static_cast<int>(c.pool.size()))
        fail("pool weakening position out of range");
      if (!rule.formula) fail("pool weakening needs a formula");
      for (auto& g : c.groups) g = shift_from(g, i, 1);
      c.pool.insert(c.pool.begin() + i, normalize(rule.formula));
      return c;
    }
    case CL5Rule::WeakenOgroup: {
      ShallowCirquent c = one();
      if (rule.i < 0 || rule.i >= static_cast<int>(c.groups.size()))
        fail("weakening group out of range");
      if (rule.j < 0 || rule.j >= static_cast<int>(c.pool.size()))
        fail("weakening oformula out of range");
      if (c.groups[rule.i].count(rule.j)) fail("arc already present");
      c.groups[rule.i].insert(rule.j);
      return c;
    }
    case CL5Rule::DuplicateDown: {
      ShallowCirquent c = one();
      if (rule.i < 0 || rule.i >= static_cast<int>(c.groups.size()))
        fail("duplication group out of range");
      c.groups.insert(c.groups.begin() + rule.i, c.groups[rule.i]);
      return c;
    }
    case CL5Rule::DuplicateUp: {
      ShallowCirquent c = one();
      int i = rule.i;
      if (i < 0 || i + 1 >= static_cast<int>(c.groups.size()))
        fail("duplication group out of range");
      if (c.groups[i] != c.groups[i + 1])
        fail("adjacent groups are not identical");
      c.groups.erase(c.groups.begin() + i + 1);
      return c;
    }
    case CL5Rule::Contract: {
      const ShallowCirquent& p = one();
      int i = rule.i;
      if (i < 0 || i + 1 >= static_cast<int>(p.pool.size()))
        fail("contraction position out of range");
      if (p.pool[i] != p.pool[i + 1])
        fail("adjacent oformulas are not identical");
      ShallowCirquent c;
      c.pool = p.pool;
      c.pool.erase(c.pool.begin() + i + 1);
      for (const auto& g : p.groups) {
        std::set<int> ng;
        for (int j : g) ng.insert(j <= i ? j : (j == i + 1 ? i : j - 1));
        c.groups.push_back(ng);
      }
      return c;
    }
    case CL5Rule::OrIntro:
    case CL5Rule::AndIntro: {
      const ShallowCirquent& p = one();
      int i = rule.i;
      if (i < 0 || i + 1 >= static_cast<int>(p.pool.size()))
        fail("introduction position out of range");
      Formula F = p.pool[i], G = p.pool[i + 1];
      bool isOr = rule.kind == CL5Rule::OrIntro;
      Formula H = rule.formula
                      ? rule.formula
                      : mk(isOr ? Conn::Or : Conn::And, {F, G});
      if (!combines(isOr ? Conn::Or : Conn::And, H, F, G))
        fail("introduced formula does not combine the adjacent oformulas");
      ShallowCirquent c;
      c.pool = p.pool;
      c.pool[i] = H;
      c.pool.erase(c.pool.begin() + i + 1);
      auto remap = [&](const std::set<int>& g) {
        std::set<int> ng;
        for (int j : g) ng.insert(j <= i ? j : (j == i + 1 ? i : j - 1));
        return ng;
      };
      if (isOr) {
        for (const auto& g : p.groups) c.groups.push_back(remap(g));
        return c;
      }
      int m = static_cast<int>(p.groups.size());
      std::vector<bool> hasF(m), hasG(m);
      for (int g = 0; g < m; ++g) {
        hasF[g] = p.groups[g].count(i);
        hasG[g] = p.groups[g].count(i + 1);
        if (hasF[g] && hasG[g]) fail("an ogroup contains both conjuncts");
      }
      for (int g = 0; g < m; ++g) {
        if (hasF[g] && !(g + 1 < m && hasG[g + 1]))
          fail("left-conjunct ogroup not followed by a right-conjunct ogroup");
        if (hasG[g] && !(g > 0 && hasF[g - 1]))
          fail("right-conjunct ogroup not preceded by a left-conjunct ogroup");
      }
      for (int g = 0; g < m;) {
        if (hasF[g]) {
          std::set<int> merged = p.groups[g];
          merged.insert(p.groups[g + 1].begin(), p.groups[g + 1].end());
          c.groups.push_back(remap(merged));
          g += 2;
        } else {
          c.groups.push_back(remap(p.groups[g]));
          g += 1;
        }
      }
      return c;
    }
  }
  fail("unknown rule");
}

bool check_step(const std::vector<ShallowCirquent>& premises,
                const ShallowCirquent& conclusion, const CL5Rule& rule,
                SystemId system, std::string* error) {
  auto put = [&](const std::string& m) {
    if (error) *error = m;
    return false;
  };
  if (system != SystemId::CL5 && system != SystemId::CCC)
    return put("system must be CL5 or CCC");
  if (rule.kind == CL5Rule::Contract && system != SystemId::CCC)
    return put("contraction is not available in CL5");
  for (const auto& p : premises)
    if (!p.well_formed()) return put("malformed premise cirquent");
  if (!conclusion.well_formed()) return put("malformed conclusion cirquent");
  try {
    if (apply_cl5(premises, rule) != conclusion)
      return put("conclusion is not the result of the rule application");
  } catch (const std::invalid_argument& e) {
    return put(e.what());
  }
  return true;
}

bool check_proof(const CL5Proof& p, std::string* error) {
  auto put = [&](const std::string& m) {
    if (error) *error = m;
    return false;
  };
  if (p.system != SystemId::CL5 && p.system != SystemId::CCC)
    return put("system must be CL5 or CCC");
  if (!p.target) return put("missing target");
  if (p.steps.empty()) return put("empty proof");
  Formula tgt = normalize(p.target);
  if (!sig_ok(tgt)) return put("target outside the -,&,| signature");
  for (size_t k = 0; k < p.steps.size(); ++k) {
    const CL5Step& s = p.steps[k];
    std::vector<ShallowCirquent> prem;
    for (int idx : s.premises) {
      if (idx < 0 || idx >= static_cast<int>(k))
        return put("step " + std::to_string(k) + ": premise index not earlier");
      prem.push_back(p.steps[idx].cirquent);
    }
    for (Formula f : s.cirquent.pool)
      if (!sig_ok(f))
        return put("step " + std::to_string(k) +
                   ": oformula outside the -,&,| signature");
    std::string why;
    if (!check_step(prem, s.cirquent, s.rule, p.system, &why))
      return put("step " + std::to_string(k) + ": " + why);
  }
  if (p.steps.back().cirquent != singleton_cirquent(tgt))
    return put("final cirquent is not the singleton of the target");
  return true;
}

// ---------------------------------------------------------------------------
// Abstract resource semantics.

namespace {

struct PortInfo {
  Port port;
  std::string atom;
  bool neg;
};

void collect_ports(Formula f, int pool_index, std::vector<int>& path,
                   std::vector<PortInfo>& out) {
  if (f->kind == Conn::Lit) {
    out.push_back({{pool_index, path}, f->atom, f->neg});
    return;
  }
  for (size_t i = 0; i < f->args.size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_ports(f->args[i], pool_index, path, out);
    path.pop_back();
  }
}

std::vector<PortInfo> cirquent_ports(const ShallowCirquent& c) {
  std::vector<PortInfo> out;
  std::vector<int> path;
  for (size_t i = 0; i < c.pool.size(); ++i)
    collect_ports(c.pool[i], static_cast<int>(i), path, out);
  return out;
}

// Evaluates a pool formula reading each literal occurrence's value directly
// from the port vector; `next` indexes ports in collection order.
bool eval_by_ports(Formula f, const std::vector<char>& values, int& next) {
  switch (f->kind) {
    case Conn::Lit: return values[next++];
    case Conn::True: return true;
    case Conn::False: return false;
    case Conn::And: {
      bool r = true;
      for (Formula x : f->args) r = eval_by_ports(x, values, next) && r;
      return r;
    }
    case Conn::Or: {
      bool r = false;
      for (Formula x : f->args) r = eval_by_ports(x, values, next) || r;
      return r;
    }
    default: throw std::invalid_argument("cirquent formula outside signature");
  }
}

bool cirquent_true_ports(const ShallowCirquent& c,
                         const std::vector<char>& values,
                         const std::vector<int>& pool_port_base) {
  for (const auto& g : c.groups) {
    bool ok = false;
    for (int j : g) {
      int next = pool_port_base[j];
      if (eval_by_ports(c.pool[j], values, next)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

} // namespace

ArsResult ars_valid(const ShallowCirquent& c, int max_ports) {
  if (!c.well_formed()) throw std::invalid_argument("malformed cirquent");
  std::vector<PortInfo> ports = cirquent_ports(c);
  int P = static_cast<int>(ports.size());
  if (P > max_ports)
    throw std::runtime_error("ars_valid: port count exceeds the bound");
  std::vector<int> base(c.pool.size(), 0);
  {
    int acc = 0;
    for (size_t i = 0; i < c.pool.size(); ++i) {
      base[i] = acc;
      int dummy = 0;
      std::vector<int> path;
      std::vector<PortInfo> tmp;
      collect_ports(c.pool[i], static_cast<int>(i), path, tmp);
      (void)dummy;
      acc += static_cast<int>(tmp.size());
    }
  }

  std::vector<std::vector<char>> countermodels;
  std::vector<int> mate(P, -1);

  // Checks the current full arrangement; on failure caches a countermodel.
  auto arrangement_ok = [&]() -> bool {
    for (const auto& cm : countermodels) {
      bool consistent = true;
      for (int a = 0; a < P; ++a)
        if (mate[a] > a && cm[a] == cm[mate[a]]) {
          consistent = false;
          break;
        }
      if (consistent) return false;
    }
    std::vector<int> free_or_lead;
    for (int a = 0; a < P; ++a)
      if (mate[a] < 0 || mate[a] > a) free_or_lead.push_back(a);
    int k = static_cast<int>(free_or_lead.size());
    std::vector<char> values(P, 0);
    for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
      for (int b = 0; b < k; ++b) {
        int a = free_or_lead[b];
        values[a] = (mask >> b) & 1;
        if (mate[a] > a) values[mate[a]] = !values[a];
      }
      if (!cirquent_true_ports(c, values, base)) {
        countermodels.push_back(values);
        return false;
      }
    }
    return true;
  };

  std::function<bool(int)> enumerate = [&](int a) -> bool {
    while (a < P && mate[a] >= 0) ++a;
    if (a == P) return arrangement_ok();
    if (enumerate(a + 1)) return true; // leave port a unpaired
    for (int b = a + 1; b < P; ++b) {
      if (mate[b] >= 0) continue;
      if (ports[b].atom != ports[a].atom || ports[b].neg == ports[a].neg)
        continue;
      mate[a] = b;
      mate[b] = a;
      if (enumerate(a + 1)) return true;
      mate[a] = mate[b] = -1;
    }
    return false;
  };

  if (enumerate(0)) {
    Arrangement w;
    for (int a = 0; a < P; ++a)
      if (mate[a] > a) w.pairs.push_back({ports[a].port, ports[mate[a]].port});
    return {true, w};
  }
  return {false, std::nullopt};
}

bool cirquent_true(const ShallowCirquent& c,
                   const std::map<std::string, bool>& assignment) {
  std::function<bool(Formula)> ev = [&](Formula f) -> bool {
    switch (f->kind) {
      case Conn::Lit: {
        bool v = assignment.at(f->atom);
        return f->neg ? !v : v;
      }
      case Conn::True: return true;
      case Conn::False: return false;
      case Conn::And:
        for (Formula x : f->args)
          if (!ev(x)) return false;
        return true;
      case Conn::Or:
        for (Formula x : f->args)
          if (ev(x)) return true;
        return false;
      default: throw std::invalid_argument("cirquent formula outside signature");
    }
  };
  for (const auto& g : c.groups) {
    bool ok = false;
    for (int j : g)
      if (ev(c.pool[j])) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

bool cirquent_tautology(const ShallowCirquent& c) {
  std::set<std::string> names;
  for (Formula f : c.pool) collect_atoms(f, names);
  std::vector<std::string> vars(names.begin(), names.end());
  if (vars.size() > 24)
    throw std::runtime_error("cirquent_tautology: too many atoms");
  std::map<std::string, bool> a;
  for (std::uint32_t mask = 0; mask < (1u << vars.size()); ++mask) {
    for (size_t i = 0; i < vars.size(); ++i) a[vars[i]] = (mask >> i) & 1;
    if (!cirquent_true(c, a)) return false;
  }
  return true;
}

bool decide_binary(Formula f, int max_occurrences) {
  f = normalize(f);
  if (!sig_ok(f)) throw std::invalid_argument("formula outside the -,&,| signature");
  ShallowCirquent single{{f}, {{0}}};
  std::vector<PortInfo> occ = cirquent_ports(single);
  int P = static_cast<int>(occ.size());
  if (P > max_occurrences)
    throw std::runtime_error("decide_binary: occurrence count exceeds the bound");

  std::vector<int> mate(P, -1);
  // Tautology of the skeleton in which paired occurrences share an atom.
  auto skeleton_taut = [&]() -> bool {
    std::vector<int> var(P, -1);
    int nv = 0;
    for (int a = 0; a < P; ++a) {
      if (var[a] >= 0) continue;
      var[a] = nv;
      if (mate[a] > a) var[mate[a]] = nv;
      ++nv;
    }
    std::vector<char> values(P, 0);
    for (std::uint32_t mask = 0; mask < (1u << nv); ++mask) {
      for (int a = 0; a < P; ++a) {
        bool v = (mask >> var[a]) & 1;
        values[a] = occ[a].neg ? !v : v;
      }
      int next = 0;
      if (!eval_by_ports(f, values, next)) return false;
    }
    return true;
  };

  std::function<bool(int)> enumerate = [&](int a) -> bool {
    while (a < P && mate[a] >= 0) ++a;
    if (a == P) return skeleton_taut();
    if (enumerate(a + 1)) return true;
    for (int b = a + 1; b < P; ++b) {
      if (mate[b] >= 0) continue;
      if (occ[b].atom != occ[a].atom || occ[b].neg == occ[a].neg) continue;
      mate[a] = b;
      mate[b] = a;
      if (enumerate(a + 1)) return true;
      mate[a] = mate[b] = -1;
    }
    return false;
  };
  return enumerate(0);
}

bool decide_cl5(Formula f, SystemId system) {
  f = normalize(f);
  if (!sig_ok(f)) throw std::invalid_argument("formula outside the -,&,| signature");
  if (system == SystemId::CCC) return cirquent_tautology({{f}, {{0}}});
  if (system == SystemId::CL5) return decide_binary(f);
  throw std::invalid_argument("system must be CL5 or CCC");
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

// Stable partition of pool items into interchangeability classes by iterated
// membership-signature refinement; classes come out in a deterministic order.
std::vector<std::vector<int>> refine_classes(const ShallowCirquent& c) {
  int n = static_cast<int>(c.pool.size());
  int m = static_cast<int>(c.groups.size());
  std::vector<std::string> icol(n);
  for (int i = 0; i < n; ++i) icol[i] = render(c.pool[i], Style::Ascii);
  for (int round = 0; round <= n; ++round) {
    std::vector<std::string> gcol(m);
    for (int g = 0; g < m; ++g) {
      std::vector<std::string> mem;
      for (int j : c.groups[g]) mem.push_back(icol[j]);
      std::sort(mem.begin(), mem.end());
      gcol[g] = join(mem, ',');
    }
    std::vector<std::string> next(n);
    for (int i = 0; i < n; ++i) {
      std::vector<std::string> gs;
      for (int g = 0; g < m; ++g)
        if (c.groups[g].count(i)) gs.push_back(gcol[g]);
      std::sort(gs.begin(), gs.end());
      next[i] = icol[i] + "/" + join(gs, ';');
    }
    std::vector<std::string> uniq = next;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    bool stable = uniq.size() ==
                  [&] {
                    std::vector<std::string> u0 = icol;
                    std::sort(u0.begin(), u0.end());
                    u0.erase(std::unique(u0.begin(), u0.end()), u0.end());
                    return u0.size();
                  }();
    for (int i = 0; i < n; ++i) {
      auto it = std::lower_bound(uniq.begin(), uniq.end(), next[i]);
      icol[i] = render(c.pool[i], Style::Ascii) + "#" +
                std::to_string(it - uniq.begin());
    }
    if (stable) break;
  }
  std::map<std::string, std::vector<int>> byColor;
  for (int i = 0; i < n; ++i) byColor[icol[i]].push_back(i);
  std::vector<std::vector<int>> classes;
  for (auto& [k, v] : byColor) classes.push_back(v);
  return classes;
}

std::string encode_under_order(const ShallowCirquent& c,
                               const std::vector<int>& pos_of,
                               std::vector<int>* group_perm) {
  int n = static_cast<int>(c.pool.size());
  std::vector<std::string> pool_part(n);
  for (int i = 0; i < n; ++i)
    pool_part[pos_of[i]] = render(c.pool[i], Style::Ascii);
  int m = static_cast<int>(c.groups.size());
  std::vector<std::pair<std::vector<int>, int>> gs(m);
  for (int g = 0; g < m; ++g) {
    std::vector<int> mapped;
    for (int j : c.groups[g]) mapped.push_back(pos_of[j]);
    std::sort(mapped.begin(), mapped.end());
    gs[g] = {mapped, g};
  }
  std::stable_sort(gs.begin(), gs.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  if (group_perm) {
    group_perm->assign(m, 0);
    for (int t = 0; t < m; ++t) (*group_perm)[gs[t].second] = t;
  }
  std::string out = join(pool_part, '\x1f');
  out += "!!";
  for (const auto& [mapped, orig] : gs) {
    out += '[';
    for (size_t i = 0; i < mapped.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(mapped[i]);
    }
    out += ']';
  }
  return out;
}

struct Canon {
  std::string key;
  std::vector<int> pool_perm;  // old position -> canonical position
  std::vector<int> group_perm; // old position -> canonical position
  ShallowCirquent rep;
};

constexpr long kTieCap = 5040;

Canon canonicalize(const ShallowCirquent& c) {
  int n = static_cast<int>(c.pool.size());
  std::vector<std::vector<int>> classes = refine_classes(c);
  long perms = 1;
  for (const auto& cl : classes) {
    for (size_t k = 2; k <= cl.size() && perms <= kTieCap; ++k)
      perms *= static_cast<long>(k);
  }

  std::vector<int> pos_of(n, -1);
  {
    int next = 0;
    for (const auto& cl : classes)
      for (int i : cl) pos_of[i] = next++;
  }
  Canon best;
  best.pool_perm = pos_of;
  best.key = encode_under_order(c, pos_of, &best.group_perm);

  if (perms > 1 && perms <= kTieCap) {
    std::vector<std::vector<int>> perm_state = classes;
    std::function<void(size_t)> rec = [&](size_t ci) {
      if (ci == classes.size()) {
        std::vector<int> cand(n, -1);
        int next = 0;
        for (const auto& cl : perm_state)
          for (int i : cl) cand[i] = next++;
        std::vector<int> gp;
        std::string key = encode_under_order(c, cand, &gp);
        if (key < best.key) {
          best.key = key;
          best.pool_perm = cand;
          best.group_perm = gp;
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

  best.rep.pool.resize(n);
  for (int i = 0; i < n; ++i) best.rep.pool[best.pool_perm[i]] = c.pool[i];
  best.rep.groups.resize(c.groups.size());
  for (size_t g = 0; g < c.groups.size(); ++g) {
    std::set<int> ng;
    for (int j : c.groups[g]) ng.insert(best.pool_perm[j]);
    best.rep.groups[best.group_perm[g]] = ng;
  }
  return best;
}

// A pool bijection from -> to preserving formulas and group structure.
std::optional<std::vector<int>> find_isomorphism(const ShallowCirquent& from,
                                                 const ShallowCirquent& to) {
  int n = static_cast<int>(from.pool.size());
  if (static_cast<int>(to.pool.size()) != n) return std::nullopt;
  if (from.groups.size() != to.groups.size()) return std::nullopt;
  std::vector<int> bij(n, -1);
  std::vector<char> used(n, 0);
  auto groups_match = [&]() {
    std::vector<std::set<int>> mapped;
    for (const auto& g : from.groups) {
      std::set<int> ng;
      for (int j : g) ng.insert(bij[j]);
      mapped.push_back(ng);
    }
    std::sort(mapped.begin(), mapped.end());
    std::vector<std::set<int>> tg(to.groups.begin(), to.groups.end());
    std::sort(tg.begin(), tg.end());
    return mapped == tg;
  };
  std::function<bool(int)> rec = [&](int i) -> bool {
    if (i == n) return groups_match();
    for (int t = 0; t < n; ++t) {
      if (used[t] || to.pool[t] != from.pool[i]) continue;
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

// Emits exchange steps rewriting `from` into `to`; both must be exchange
// equivalent. Each emitted pair is (rule, resulting cirquent).
std::vector<std::pair<CL5Rule, ShallowCirquent>> exchange_chain(
    const ShallowCirquent& from, const ShallowCirquent& to) {
  std::vector<std::pair<CL5Rule, ShallowCirquent>> out;
  if (from == to) return out;
  auto bij = find_isomorphism(from, to);
  if (!bij) throw std::logic_error("exchange_chain: cirquents not equivalent");
  int n = static_cast<int>(from.pool.size());
  ShallowCirquent cur = from;
  std::vector<int> want = *bij; // want[pos] = target position of item at pos
  for (int pass = 0; pass < n; ++pass) {
    bool swapped = false;
    for (int i = 0; i + 1 < n; ++i) {
      if (want[i] > want[i + 1]) {
        CL5Rule r{CL5Rule::ExchangeOformula, i, -1, nullptr};
        cur = apply_cl5({cur}, r);
        std::swap(want[i], want[i + 1]);
        out.push_back({r, cur});
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  int m = static_cast<int>(cur.groups.size());
  std::vector<int> gwant(m, -1);
  std::vector<char> taken(m, 0);
  for (int g = 0; g < m; ++g) {
    for (int t = 0; t < m; ++t) {
      if (!taken[t] && to.groups[t] == cur.groups[g]) {
        gwant[g] = t;
        taken[t] = 1;
        break;
      }
    }
    if (gwant[g] < 0) throw std::logic_error("exchange_chain: group mismatch");
  }
  for (int pass = 0; pass < m; ++pass) {
    bool swapped = false;
    for (int i = 0; i + 1 < m; ++i) {
      if (gwant[i] > gwant[i + 1]) {
        CL5Rule r{CL5Rule::ExchangeOgroup, i, -1, nullptr};
        cur = apply_cl5({cur}, r);
        std::swap(gwant[i], gwant[i + 1]);
        out.push_back({r, cur});
        swapped = true;
      }
    }
    if (!swapped) break;
  }
  if (cur != to) throw std::logic_error("exchange_chain: failed to converge");
  return out;
}

} // namespace

std::string cl5_canonical_key(const ShallowCirquent& c) {
  return canonicalize(c).key;
}

// ---------------------------------------------------------------------------
// Bounded bottom-up proof search.

namespace {

struct SearchEdge {
  CL5Rule rule;
  std::vector<ShallowCirquent> prem_ordered;
  std::vector<std::string> prem_keys;
};

struct SearchNode {
  ShallowCirquent rep;
  std::optional<SearchEdge> how;
};

struct BudgetUp {};

class Searcher {
 public:
  Searcher(SystemId system, const CL5SearchConfig& cfg)
      : system_(system), cfg_(cfg) {}

  std::optional<CL5Proof> run(Formula f) {
    ShallowCirquent root = singleton_cirquent(f);
    Canon rc = canonicalize(root);
    root_key_ = rc.key;
    nodes_[root_key_] = {rc.rep, std::nullopt};
    bool found = false;
    try {
      // First pass: the shrinking fragment (no upward duplication) explored
      // to full depth; the growing rules join only in the fallback rounds.
      found = dfs(root_key_, cfg_.max_depth, cfg_.contraction_budget, false);
      for (int depth = 4; depth <= cfg_.max_depth && !found; depth += 4) {
        fail_rem_.clear();
        found = dfs(root_key_, depth, cfg_.contraction_budget, true);
      }
    } catch (const BudgetUp&) {
      return std::nullopt;
    }
    if (!found) return std::nullopt;
    CL5Proof proof;
    proof.system = system_;
    proof.target = f;
    std::map<std::string, int> built;
    int last = build(root_key_, proof, built);
    if (proof.steps[last].cirquent != root) {
      for (auto& [r, c] : exchange_chain(proof.steps[last].cirquent, root)) {
        proof.steps.push_back({r, {last}, c});
        last = static_cast<int>(proof.steps.size()) - 1;
      }
    }
    return proof;
  }

 private:
  bool proved(const std::string& key) const {
    auto it = nodes_.find(key);
    return it != nodes_.end() && it->second.how.has_value();
  }

  bool admissible(const ShallowCirquent& c) {
    if (static_cast<int>(c.pool.size()) > cfg_.max_pool) return false;
    if (static_cast<int>(c.groups.size()) > cfg_.max_groups) return false;
    try {
      if (system_ == SystemId::CL5) return ars_valid(c).valid;
      return cirquent_tautology(c);
    } catch (const std::runtime_error&) {
      return true; // beyond oracle bounds: do not prune
    }
  }

  bool dfs(const std::string& key, int depth, int cbudget, bool growth) {
    if (proved(key)) return true;
    if (++visits_ > cfg_.max_nodes) throw BudgetUp{};
    std::string fkey = key + "#" + std::to_string(cbudget) + (growth ? "g" : "s");
    auto fit = fail_rem_.find(fkey);
    if (fit != fail_rem_.end() && fit->second >= depth) return false;
    if (depth <= 0) return false;
    if (on_branch_.count(key)) return false;
    on_branch_.insert(key);
    bool ok = expand(key, depth, cbudget, growth);
    on_branch_.erase(key);
    if (!ok) {
      int& rem = fail_rem_[fkey];
      rem = std::max(rem, depth);
    }
    return ok;
  }

  // Registers a candidate edge; returns true when all premises are provable.
  bool try_edge(const std::string& key, CL5Rule rule,
                std::vector<ShallowCirquent> prems, int depth, int cbudget,
                bool growth, std::set<std::string>& tried) {
    SearchEdge edge;
    edge.rule = rule;
    edge.prem_ordered = prems;
    for (const auto& p : prems) {
      if (!admissible(p)) return false;
      Canon cp = canonicalize(p);
      if (!nodes_.count(cp.key)) nodes_[cp.key] = {cp.rep, std::nullopt};
      edge.prem_keys.push_back(cp.key);
    }
    {
      std::string sig = std::to_string(rule.kind);
      for (const auto& k : edge.prem_keys) sig += "&" + k;
      if (!tried.insert(sig).second) return false;
    }
    for (const auto& pk : edge.prem_keys)
      if (!dfs(pk, depth - 1, cbudget, growth)) return false;
    nodes_[key].how = std::move(edge);
    return true;
  }

  bool expand(const std::string& key, int depth, int cbudget, bool growth) {
    std::set<std::string> tried; // dedupes candidate edges within this call
    ShallowCirquent c = nodes_[key].rep;
    int n = static_cast<int>(c.pool.size());
    int m = static_cast<int>(c.groups.size());

    // Axioms.
    if (n == 0 && m == 0) {
      nodes_[key].how = SearchEdge{{CL5Rule::AxiomEmpty, -1, -1, nullptr}, {}, {}};
      return true;
    }
    if (n == 2 && m == 1 && c.groups[0] == std::set<int>{0, 1}) {
      if (c.pool[0] == negf(c.pool[1]) || c.pool[1] == negf(c.pool[0])) {
        Formula F = c.pool[0] == negf(c.pool[1]) ? c.pool[1] : c.pool[0];
        nodes_[key].how =
            SearchEdge{{CL5Rule::AxiomIdentity, -1, -1, F}, {}, {}};
        return true;
      }
    }

    auto containing = [&](int i) {
      std::vector<int> out;
      for (int g = 0; g < m; ++g)
        if (c.groups[g].count(i)) out.push_back(g);
      return out;
    };

    // OrIntro upward: split a disjunction, choosing arcs per containing group.
    for (int i = 0; i < n; ++i) {
      if (c.pool[i]->kind != Conn::Or) continue;
      std::vector<int> cont = containing(i);
      long options = 1;
      for (size_t k = 0; k < cont.size() && options <= 81; ++k) options *= 3;
      for (auto& [F, G] : splits(c.pool[i])) {
        long top = options > 81 ? 1 : options;
        for (long mask = 0; mask < top; ++mask) {
          ShallowCirquent p;
          p.pool = c.pool;
          p.pool[i] = F;
          p.pool.insert(p.pool.begin() + i + 1, G);
          bool bad = false;
          long mm = mask;
          p.groups.resize(m);
          for (int g = 0; g < m; ++g) p.groups[g] = shift_from(c.groups[g], i + 1, 1);
          for (int g : cont) {
            int choice = static_cast<int>(mm % 3); // 0 both, 1 left, 2 right
            mm /= 3;
            p.groups[g].erase(i);
            p.groups[g].erase(i + 1);
            if (choice != 2) p.groups[g].insert(i);
            if (choice != 1) p.groups[g].insert(i + 1);
          }
          if (bad) continue;
          if (try_edge(key, {CL5Rule::OrIntro, i, -1, c.pool[i]}, {p}, depth,
                       cbudget, growth, tried))
            return true;
        }
      }
    }

    // AndIntro upward: split a conjunction; each containing group splits into
    // an adjacent pair, distributing its other members.
    for (int i = 0; i < n; ++i) {
      if (c.pool[i]->kind != Conn::And) continue;
      std::vector<int> cont = containing(i);
      for (auto& [F, G] : splits(c.pool[i])) {
        std::vector<std::vector<int>> rests;
        long options = 1;
        for (int g : cont) {
          std::vector<int> rest;
          for (int j : c.groups[g])
            if (j != i) rest.push_back(j);
          rests.push_back(rest);
          for (size_t k = 0; k < rest.size() && options <= 243; ++k)
            options *= 3;
        }
        long top = options > 243 ? 1 : options;
        for (long mask = 0; mask < top; ++mask) {
          ShallowCirquent p;
          p.pool = c.pool;
          p.pool[i] = F;
          p.pool.insert(p.pool.begin() + i + 1, G);
          long mm = mask;
          bool bad = false;
          for (int g = 0; g < m && !bad; ++g) {
            auto pos = std::find(cont.begin(), cont.end(), g);
            if (pos == cont.end()) {
              p.groups.push_back(shift_from(c.groups[g], i + 1, 1));
              continue;
            }
            const std::vector<int>& rest = rests[pos - cont.begin()];
            std::set<int> gf{i}, gg{i + 1};
            for (int j : rest) {
              int jj = j > i ? j + 1 : j;
              int choice = static_cast<int>(mm % 3);
              mm /= 3;
              if (choice != 2) gf.insert(jj);
              if (choice != 1) gg.insert(jj);
            }
            p.groups.push_back(gf);
            p.groups.push_back(gg);
          }
          if (bad) continue;
          if (try_edge(key, {CL5Rule::AndIntro, i, -1, c.pool[i]}, {p}, depth,
                       cbudget, growth, tried))
            return true;
        }
      }
    }

    // Mix upward: split into group-connected components.
    {
      std::vector<int> comp(n);
      std::iota(comp.begin(), comp.end(), 0);
      std::function<int(int)> find = [&](int x) {
        return comp[x] == x ? x : comp[x] = find(comp[x]);
      };
      for (const auto& g : c.groups) {
        if (g.empty()) continue;
        int r = find(*g.begin());
        for (int j : g) comp[find(j)] = r;
      }
      std::vector<int> roots;
      for (int i = 0; i < n; ++i)
        if (find(i) == i) roots.push_back(i);
      int k = static_cast<int>(roots.size());
      if (k >= 2 && k <= 7) {
        for (std::uint32_t mask = 0; mask + 1 < (1u << (k - 1)); ++mask) {
          // roots[0] always goes left; mask selects the left set among rest.
          std::vector<char> left_of(n, 0);
          for (int ri = 0; ri < k; ++ri) {
            bool left = ri == 0 || ((mask >> (ri - 1)) & 1);
            for (int i = 0; i < n; ++i)
              if (find(i) == roots[ri]) left_of[i] = left;
          }
          ShallowCirquent A, B;
          std::vector<int> remap(n);
          for (int i = 0; i < n; ++i) {
            if (left_of[i]) {
              remap[i] = static_cast<int>(A.pool.size());
              A.pool.push_back(c.pool[i]);
            } else {
              remap[i] = static_cast<int>(B.pool.size());
              B.pool.push_back(c.pool[i]);
            }
          }
          if (B.pool.empty()) continue;
          for (const auto& g : c.groups) {
            std::set<int> ng;
            bool left = g.empty() ? true : left_of[*g.begin()];
            for (int j : g) ng.insert(remap[j]);
            (left ? A : B).groups.push_back(ng);
          }
          if (try_edge(key, {CL5Rule::Mix, -1, -1, nullptr}, {A, B}, depth,
                       cbudget, growth, tried))
            return true;
        }
      }
    }

    // Weakening upward: drop one arc (keeping the group inhabited).
    for (int g = 0; g < m; ++g) {
      if (c.groups[g].size() < 2) continue;
      for (int j : c.groups[g]) {
        ShallowCirquent p = c;
        p.groups[g].erase(j);
        if (try_edge(key, {CL5Rule::WeakenOgroup, g, j, nullptr}, {p}, depth,
                     cbudget, growth, tried))
          return true;
      }
    }

    // Pool weakening upward: drop an arcless oformula.
    for (int i = 0; i < n; ++i) {
      if (!containing(i).empty()) continue;
      ShallowCirquent p;
      p.pool = c.pool;
      p.pool.erase(p.pool.begin() + i);
      for (const auto& g : c.groups) p.groups.push_back(shift_from(g, i + 1, -1));
      if (try_edge(key, {CL5Rule::WeakenPool, i, -1, c.pool[i]}, {p}, depth,
                   cbudget, growth, tried))
        return true;
    }

    // Downward duplication upward: merge two identical groups.
    for (int g1 = 0; g1 < m; ++g1)
      for (int g2 = g1 + 1; g2 < m; ++g2) {
        if (c.groups[g1] != c.groups[g2]) continue;
        ShallowCirquent p = c;
        p.groups.erase(p.groups.begin() + g2);
        if (try_edge(key, {CL5Rule::DuplicateDown, g1, -1, nullptr}, {p},
                     depth, cbudget, growth, tried))
          return true;
        break;
      }

    // Upward duplication upward: the premise carries an extra copy of a group.
    if (growth && m + 1 <= cfg_.max_groups) {
      for (int g = 0; g < m; ++g) {
        ShallowCirquent p = c;
        p.groups.insert(p.groups.begin() + g, p.groups[g]);
        if (try_edge(key, {CL5Rule::DuplicateUp, g, -1, nullptr}, {p}, depth,
                     cbudget, growth, tried))
          return true;
      }
    }

    // Contraction upward (CCC): the premise carries two copies of an oformula.
    if (system_ == SystemId::CCC && cbudget > 0 && n + 1 <= cfg_.max_pool) {
      for (int i = 0; i < n; ++i) {
        std::vector<int> cont = containing(i);
        long options = 1;
        for (size_t k = 0; k < cont.size() && options <= 81; ++k) options *= 3;
        long top = options > 81 ? 1 : options;
        for (long mask = 0; mask < top; ++mask) {
          ShallowCirquent p;
          p.pool = c.pool;
          p.pool.insert(p.pool.begin() + i + 1, c.pool[i]);
          p.groups.resize(m);
          for (int g = 0; g < m; ++g) p.groups[g] = shift_from(c.groups[g], i + 1, 1);
          long mm = mask;
          for (int g : cont) {
            int choice = static_cast<int>(mm % 3);
            mm /= 3;
            p.groups[g].erase(i);
            if (choice != 2) p.groups[g].insert(i);
            if (choice != 1) p.groups[g].insert(i + 1);
          }
          CL5Rule r{CL5Rule::Contract, i, -1, nullptr};
          if (!admissible(p)) continue;
          Canon cp = canonicalize(p);
          if (!nodes_.count(cp.key)) nodes_[cp.key] = {cp.rep, std::nullopt};
          std::string sig = std::to_string(r.kind) + "&" + cp.key;
          if (!tried.insert(sig).second) continue;
          if (dfs(cp.key, depth - 1, cbudget - 1, growth)) {
            nodes_[key].how = SearchEdge{r, {p}, {cp.key}};
            return true;
          }
        }
      }
    }
    return false;
  }

  int build(const std::string& key, CL5Proof& proof,
            std::map<std::string, int>& built) {
    auto it = built.find(key);
    if (it != built.end()) return it->second;
    SearchNode& nr = nodes_[key];
    const SearchEdge& e = *nr.how;
    std::vector<int> prem_idx;
    for (size_t pi = 0; pi < e.prem_keys.size(); ++pi) {
      int idx = build(e.prem_keys[pi], proof, built);
      const ShallowCirquent& want = e.prem_ordered[pi];
      if (proof.steps[idx].cirquent != want) {
        for (auto& [r, cc] : exchange_chain(proof.steps[idx].cirquent, want)) {
          proof.steps.push_back({r, {idx}, cc});
          idx = static_cast<int>(proof.steps.size()) - 1;
        }
      }
      prem_idx.push_back(idx);
    }
    ShallowCirquent layout = apply_cl5(e.prem_ordered, e.rule);
    proof.steps.push_back({e.rule, prem_idx, layout});
    int idx = static_cast<int>(proof.steps.size()) - 1;
    if (layout != nr.rep) {
      for (auto& [r, cc] : exchange_chain(layout, nr.rep)) {
        proof.steps.push_back({r, {idx}, cc});
        idx = static_cast<int>(proof.steps.size()) - 1;
      }
    }
    built[key] = idx;
    return idx;
  }

  SystemId system_;
  CL5SearchConfig cfg_;
  std::string root_key_;
  std::map<std::string, SearchNode> nodes_;
  std::map<std::string, int> fail_rem_;
  std::set<std::string> on_branch_;
  long visits_ = 0;
};

} // namespace

std::optional<CL5Proof> search_proof(Formula f, SystemId system,
                                     const CL5SearchConfig& cfg) {
  f = normalize(f);
  if (!sig_ok(f)) throw std::invalid_argument("formula outside the -,&,| signature");
  if (system != SystemId::CL5 && system != SystemId::CCC)
    throw std::invalid_argument("system must be CL5 or CCC");
  Searcher s(system, cfg);
  return s.run(f);
}

// ---------------------------------------------------------------------------
// Serialization.

namespace {

const char* rule_name(CL5Rule::Kind k) {
  switch (k) {
    case CL5Rule::AxiomEmpty: return "axiom_empty";
    case CL5Rule::AxiomIdentity: return "axiom_identity";
    case CL5Rule::Mix: return "mix";
    case CL5Rule::ExchangeOformula: return "exchange_oformula";
    case CL5Rule::ExchangeOgroup: return "exchange_ogroup";
    case CL5Rule::WeakenPool: return "weaken_pool";
    case CL5Rule::WeakenOgroup: return "weaken_ogroup";
    case CL5Rule::DuplicateDown: return "duplicate_down";
    case CL5Rule::DuplicateUp: return "duplicate_up";
    case CL5Rule::Contract: return "contract";
    case CL5Rule::OrIntro: return "or_intro";
    case CL5Rule::AndIntro: return "and_intro";
  }
  return "?";
}

CL5Rule::Kind rule_kind(const std::string& name) {
  for (int k = CL5Rule::AxiomEmpty; k <= CL5Rule::AndIntro; ++k)
    if (name == rule_name(static_cast<CL5Rule::Kind>(k)))
      return static_cast<CL5Rule::Kind>(k);
  throw std::invalid_argument("unknown rule name: " + name);
}

} // namespace

nlohmann::json cirquent_to_json(const ShallowCirquent& c) {
  nlohmann::json pool = nlohmann::json::array();
  for (Formula f : c.pool) pool.push_back(render(f, Style::Ascii));
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : c.groups) {
    nlohmann::json arr = nlohmann::json::array();
    for (int j : g) arr.push_back(j);
    groups.push_back(arr);
  }
  return {{"pool", pool}, {"groups", groups}};
}

ShallowCirquent cirquent_from_json(const nlohmann::json& j) {
  ShallowCirquent c;
  for (const auto& s : j.at("pool")) c.pool.push_back(parse(s.get<std::string>()));
  for (const auto& g : j.at("groups")) {
    std::set<int> gs;
    for (const auto& x : g) gs.insert(x.get<int>());
    c.groups.push_back(gs);
  }
  if (!c.well_formed()) throw std::invalid_argument("malformed cirquent JSON");
  return c;
}

nlohmann::json cl5_proof_to_json(const CL5Proof& p) {
  nlohmann::json steps = nlohmann::json::array();
  for (const CL5Step& s : p.steps) {
    nlohmann::json js;
    js["rule"] = rule_name(s.rule.kind);
    if (s.rule.i >= 0) js["i"] = s.rule.i;
    if (s.rule.j >= 0) js["j"] = s.rule.j;
    if (s.rule.formula) js["formula"] = render(s.rule.formula, Style::Ascii);
    js["premises"] = s.premises;
    js["cirquent"] = cirquent_to_json(s.cirquent);
    steps.push_back(js);
  }
  return {{"system", p.system == SystemId::CCC ? "ccc" : "cl5"},
          {"target", render(p.target, Style::Ascii)},
          {"steps", steps}};
}

CL5Proof cl5_proof_from_json(const nlohmann::json& j) {
  CL5Proof p;
  std::string sys = j.at("system").get<std::string>();
  if (sys == "ccc") p.system = SystemId::CCC;
  else if (sys == "cl5") p.system = SystemId::CL5;
  else throw std::invalid_argument("unknown system: " + sys);
  p.target = parse(j.at("target").get<std::string>());
  for (const auto& js : j.at("steps")) {
    CL5Step s;
    s.rule.kind = rule_kind(js.at("rule").get<std::string>());
    if (js.contains("i")) s.rule.i = js.at("i").get<int>();
    if (js.contains("j")) s.rule.j = js.at("j").get<int>();
    if (js.contains("formula"))
      s.rule.formula = parse(js.at("formula").get<std::string>());
    if (js.contains("premises"))
      s.premises = js.at("premises").get<std::vector<int>>();
    s.cirquent = cirquent_from_json(js.at("cirquent"));
    p.steps.push_back(s);
  }
  return p;
}

std::string cirquent_to_dot(const ShallowCirquent& c) {
  std::ostringstream os;
  os << "digraph cirquent {\n  rankdir=BT;\n  node [fontname=\"monospace\"];\n";
  for (size_t i = 0; i < c.pool.size(); ++i)
    os << "  f" << i << " [shape=box, label=\""
       << render(c.pool[i], Style::Ascii) << "\"];\n";
  for (size_t g = 0; g < c.groups.size(); ++g) {
    os << "  g" << g << " [shape=point, width=0.12, label=\"\"];\n";
    os << "  root -> g" << g << ";\n";
    for (int j : c.groups[g]) os << "  g" << g << " -> f" << j << ";\n";
  }
  os << "  root [shape=point, width=0.16, label=\"\"];\n}\n";
  return os.str();
}

} // namespace col
