#include "col/formula.hpp"

#include <functional>
#include <memory>
#include <unordered_map>

namespace col {

namespace {

std::size_t node_hash(Conn kind, const std::string& atom, bool neg,
                      const std::vector<Formula>& args) {
  std::size_t h = static_cast<std::size_t>(kind) * 0x9e3779b97f4a7c15ull;
  h ^= std::hash<std::string>{}(atom) + 0x9e3779b9 + (h << 6) + (h >> 2);
  h ^= std::hash<bool>{}(neg) + 0x9e3779b9 + (h << 6) + (h >> 2);
  for (Formula a : args)
    h ^= std::hash<const void*>{}(a) + 0x9e3779b9 + (h << 6) + (h >> 2);
  return h;
}

struct InternKey {
  Conn kind;
  std::string atom;
  bool neg;
  std::vector<Formula> args;
  std::size_t hash;
  bool operator==(const InternKey& o) const {
    return kind == o.kind && atom == o.atom && neg == o.neg && args == o.args;
  }
};

struct InternKeyHash {
  std::size_t operator()(const InternKey& k) const { return k.hash; }
};

// Grows for the lifetime of the process; formulas are small and shared.
std::unordered_map<InternKey, std::unique_ptr<Node>, InternKeyHash>& table() {
  static std::unordered_map<InternKey, std::unique_ptr<Node>, InternKeyHash> t;
  return t;
}

Formula intern(Conn kind, std::string atom, bool neg, std::vector<Formula> args) {
  InternKey key{kind, atom, neg, args, node_hash(kind, atom, neg, args)};
  auto it = table().find(key);
  if (it != table().end()) return it->second.get();
  auto node = std::make_unique<Node>();
  node->kind = kind;
  node->atom = std::move(atom);
  node->neg = neg;
  node->args = std::move(args);
  node->hash = key.hash;
  Formula f = node.get();
  table().emplace(std::move(key), std::move(node));
  return f;
}

} // namespace

Formula mk_true() { return intern(Conn::True, "", false, {}); }
Formula mk_false() { return intern(Conn::False, "", false, {}); }
Formula mk_lit(const std::string& atom, bool neg) {
  return intern(Conn::Lit, atom, neg, {});
}

Formula mk(Conn kind, std::vector<Formula> args) {
  switch (kind) {
    case Conn::True: return mk_true();
    case Conn::False: return mk_false();
    case Conn::Lit: throw std::invalid_argument("use mk_lit for literals");
    case Conn::And:
    case Conn::Or:
    case Conn::Chand:
    case Conn::Chor:
      if (args.size() < 2) throw std::invalid_argument("connective arity must be >= 2");
      break;
    case Conn::Brec:
    case Conn::Cobrec:
    case Conn::Not:
      if (args.size() != 1) throw std::invalid_argument("unary connective arity must be 1");
      break;
    case Conn::Impl:
    case Conn::Brimpl:
      if (args.size() != 2) throw std::invalid_argument("implication arity must be 2");
      break;
  }
  return intern(kind, "", false, std::move(args));
}

// ---------------------------------------------------------------- parsing

namespace {

enum class Tok {
  Atom, One, Zero, Neg, Rec, Corec, And, Chand, Or, Chor, Impl, Brimpl,
  LParen, RParen, End
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

struct Lexer {
  const std::string& s;
  std::size_t i = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& s) : s(s) {}

  bool starts(const char* pat) const {
    std::size_t n = std::char_traits<char>::length(pat);
    return s.compare(i, n, pat) == 0;
  }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i + k] == '\n') { ++line; col = 1; }
      else ++col;
    }
    i += n;
  }

  Token next() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r'))
      advance(1);
    int l = line, c = col;
    if (i >= s.size()) return {Tok::End, "", l, c};
    auto tok = [&](Tok k, std::size_t n) {
      std::string t = s.substr(i, n);
      advance(n);
      return Token{k, t, l, c};
    };
    char ch = s[i];
    if (ch == '(') return tok(Tok::LParen, 1);
    if (ch == ')') return tok(Tok::RParen, 1);
    if (ch == '~') return tok(Tok::Neg, 1);
    if (ch == '!') return tok(Tok::Rec, 1);
    if (ch == '?') return tok(Tok::Corec, 1);
    if (ch == '&') return tok(Tok::And, 1);
    if (ch == '*') return tok(Tok::Chand, 1);
    if (ch == '|') return tok(Tok::Or, 1);
    if (ch == '+') return tok(Tok::Chor, 1);
    if (starts("->")) return tok(Tok::Impl, 2);
    if (starts("o->")) return tok(Tok::Brimpl, 3);
    if (ch == '1') return tok(Tok::One, 1);
    if (ch == '0') return tok(Tok::Zero, 1);
    // unicode aliases
    if (starts("\xc2\xac")) return tok(Tok::Neg, 2);             // ¬
    if (starts("\xe2\x88\xa7")) return tok(Tok::And, 3);         // ∧
    if (starts("\xe2\x88\xa8")) return tok(Tok::Or, 3);          // ∨
    if (starts("\xe2\x8a\x93")) return tok(Tok::Chand, 3);       // ⊓
    if (starts("\xe2\x8a\x94")) return tok(Tok::Chor, 3);        // ⊔
    if (starts("\xe2\x97\x8b")) return tok(Tok::Rec, 3);         // ○
    if (starts("\xe2\xab\xb0")) return tok(Tok::Corec, 3);       // ⫰
    if (starts("\xe2\x86\x92")) return tok(Tok::Impl, 3);        // →
    if (starts("\xe2\x97\xa6\xe2\x80\x93")) return tok(Tok::Brimpl, 6); // ◦–
    if ((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z')) {
      std::size_t j = i;
      while (j < s.size() &&
             ((s[j] >= 'a' && s[j] <= 'z') || (s[j] >= 'A' && s[j] <= 'Z') ||
              (s[j] >= '0' && s[j] <= '9') || s[j] == '_'))
        ++j;
      std::string name = s.substr(i, j - i);
      // `o->` written without spaces: "o" immediately followed by "->"
      if (name == "o" && s.compare(j, 2, "->") == 0) return tok(Tok::Brimpl, 3);
      advance(j - i);
      return Token{Tok::Atom, name, l, c};
    }
    throw ParseError("unknown token", l, c);
  }
};

struct Parser {
  std::vector<Token> toks;
  std::size_t pos = 0;

  explicit Parser(const std::string& text) {
    Lexer lx(text);
    for (;;) {
      Token t = lx.next();
      toks.push_back(t);
      if (t.kind == Tok::End) break;
    }
  }

  const Token& peek() const { return toks[pos]; }
  Token take() { return toks[pos++]; }

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = peek();
    throw ParseError(msg + (t.kind == Tok::End ? " at end of input"
                                               : " at '" + t.text + "'"),
                    t.line, t.col);
  }

  static int prec(Tok k) {
    switch (k) {
      case Tok::And: return 5;
      case Tok::Chand: return 4;
      case Tok::Or: return 3;
      case Tok::Chor: return 2;
      case Tok::Impl:
      case Tok::Brimpl: return 1;
      default: return -1;
    }
  }

  static Conn conn_of(Tok k) {
    switch (k) {
      case Tok::And: return Conn::And;
      case Tok::Chand: return Conn::Chand;
      case Tok::Or: return Conn::Or;
      case Tok::Chor: return Conn::Chor;
      case Tok::Impl: return Conn::Impl;
      case Tok::Brimpl: return Conn::Brimpl;
      default: throw std::logic_error("not a binary token");
    }
  }

  Formula parse_unary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Neg: {
        take();
        Formula a = parse_unary();
        if (a->kind == Conn::Lit && !a->neg) return mk_lit(a->atom, true);
        return mk(Conn::Not, {a});
      }
      case Tok::Rec: take(); return mk(Conn::Brec, {parse_unary()});
      case Tok::Corec: take(); return mk(Conn::Cobrec, {parse_unary()});
      case Tok::Atom: return mk_lit(take().text);
      case Tok::One: take(); return mk_true();
      case Tok::Zero: take(); return mk_false();
      case Tok::LParen: {
        take();
        Formula f = parse_expr(1);
        if (peek().kind != Tok::RParen) fail("expected ')'");
        take();
        return f;
      }
      default: fail("expected a formula");
    }
  }

  Formula parse_expr(int min_prec) {
    Formula lhs = parse_unary();
    for (;;) {
      Tok k = peek().kind;
      int p = prec(k);
      if (p < min_prec) break;
      if (k == Tok::Impl || k == Tok::Brimpl) {
        take();
        Formula rhs = parse_expr(1); // right-associative
        lhs = mk(conn_of(k), {lhs, rhs});
      } else {
        // left-associative chains collect into one n-ary node
        std::vector<Formula> args{lhs};
        while (peek().kind == k) {
          take();
          args.push_back(parse_expr(p + 1));
        }
        lhs = mk(conn_of(k), std::move(args));
      }
    }
    return lhs;
  }

  Formula run() {
    Formula f = parse_expr(1);
    if (peek().kind != Tok::End) fail("unexpected trailing input");
    return f;
  }
};

} // namespace

Formula parse(const std::string& text) { return Parser(text).run(); }

// --------------------------------------------------------------- rendering

namespace {

int level(Formula f) {
  switch (f->kind) {
    case Conn::And: return 5;
    case Conn::Chand: return 4;
    case Conn::Or: return 3;
    case Conn::Chor: return 2;
    case Conn::Impl:
    case Conn::Brimpl: return 1;
    default: return 9; // atoms, constants, unary
  }
}

const char* op_str(Conn k, Style st) {
  bool u = st == Style::Unicode;
  switch (k) {
    case Conn::And: return u ? " \xe2\x88\xa7 " : " & ";
    case Conn::Chand: return u ? " \xe2\x8a\x93 " : " * ";
    case Conn::Or: return u ? " \xe2\x88\xa8 " : " | ";
    case Conn::Chor: return u ? " \xe2\x8a\x94 " : " + ";
    case Conn::Impl: return u ? " \xe2\x86\x92 " : " -> ";
    case Conn::Brimpl: return u ? " \xe2\x97\xa6\xe2\x80\x93 " : " o-> ";
    default: throw std::logic_error("not a binary connective");
  }
}

void render_rec(Formula f, Style st, std::string& out) {
  bool u = st == Style::Unicode;
  auto child = [&](Formula c, bool need_parens) {
    if (need_parens) {
      out += '(';
      render_rec(c, st, out);
      out += ')';
    } else {
      render_rec(c, st, out);
    }
  };
  switch (f->kind) {
    case Conn::True: out += '1'; return;
    case Conn::False: out += '0'; return;
    case Conn::Lit:
      if (f->neg) out += u ? "\xc2\xac" : "~";
      out += f->atom;
      return;
    case Conn::Not:
      out += u ? "\xc2\xac" : "~";
      child(f->args[0], level(f->args[0]) < 9);
      return;
    case Conn::Brec:
      out += u ? "\xe2\x97\x8b" : "!";
      child(f->args[0], level(f->args[0]) < 9);
      return;
    case Conn::Cobrec:
      out += u ? "\xe2\xab\xb0" : "?";
      child(f->args[0], level(f->args[0]) < 9);
      return;
    case Conn::Impl:
    case Conn::Brimpl:
      child(f->args[0], level(f->args[0]) <= 1);
      out += op_str(f->kind, st);
      child(f->args[1], level(f->args[1]) < 1);
      return;
    default: {
      int p = level(f);
      bool first = true;
      for (Formula a : f->args) {
        if (!first) out += op_str(f->kind, st);
        first = false;
        child(a, level(a) <= p);
      }
      return;
    }
  }
}

} // namespace

std::string render(Formula f, Style style) {
  std::string out;
  render_rec(f, style, out);
  return out;
}

// ------------------------------------------------------------ normalization

namespace {

Formula norm(Formula f, bool pos) {
  switch (f->kind) {
    case Conn::True: return pos ? mk_true() : mk_false();
    case Conn::False: return pos ? mk_false() : mk_true();
    case Conn::Lit: return pos ? f : mk_lit(f->atom, !f->neg);
    case Conn::Not: return norm(f->args[0], !pos);
    case Conn::And:
    case Conn::Or: {
      std::vector<Formula> args;
      args.reserve(f->args.size());
      for (Formula a : f->args) args.push_back(norm(a, pos));
      bool keep = (f->kind == Conn::And) == pos;
      return mk(keep ? Conn::And : Conn::Or, std::move(args));
    }
    case Conn::Chand:
    case Conn::Chor: {
      std::vector<Formula> args;
      args.reserve(f->args.size());
      for (Formula a : f->args) args.push_back(norm(a, pos));
      bool keep = (f->kind == Conn::Chand) == pos;
      return mk(keep ? Conn::Chand : Conn::Chor, std::move(args));
    }
    case Conn::Brec:
    case Conn::Cobrec: {
      bool keep = (f->kind == Conn::Brec) == pos;
      return mk(keep ? Conn::Brec : Conn::Cobrec, {norm(f->args[0], pos)});
    }
    case Conn::Impl:
      if (pos) return mk(Conn::Or, {norm(f->args[0], false), norm(f->args[1], true)});
      return mk(Conn::And, {norm(f->args[0], true), norm(f->args[1], false)});
    case Conn::Brimpl:
      if (pos)
        return mk(Conn::Or,
                  {mk(Conn::Cobrec, {norm(f->args[0], false)}), norm(f->args[1], true)});
      return mk(Conn::And,
                {mk(Conn::Brec, {norm(f->args[0], true)}), norm(f->args[1], false)});
  }
  throw std::logic_error("unreachable");
}

} // namespace

Formula normalize(Formula f) { return norm(f, true); }

bool is_normalized(Formula f) {
  if (f->kind == Conn::Not || f->kind == Conn::Impl || f->kind == Conn::Brimpl)
    return false;
  for (Formula a : f->args)
    if (!is_normalized(a)) return false;
  return true;
}

// --------------------------------------------- elementarisation / stability

namespace {

Formula elem(Formula f) {
  switch (f->kind) {
    case Conn::True:
    case Conn::False: return f;
    case Conn::Lit:
      return is_general_atom(f->atom) ? mk_false() : f;
    case Conn::Chand: return mk_true();
    case Conn::Chor: return mk_false();
    case Conn::And:
    case Conn::Or: {
      std::vector<Formula> args;
      args.reserve(f->args.size());
      for (Formula a : f->args) args.push_back(elem(a));
      return mk(f->kind, std::move(args));
    }
    default:
      throw std::invalid_argument("elementarise: recurrence operators not allowed");
  }
}

} // namespace

Formula elementarise(Formula f) {
  if (!is_normalized(f)) throw std::invalid_argument("elementarise: formula not normalized");
  return elem(f);
}

bool is_elementary(Formula f) {
  switch (f->kind) {
    case Conn::True:
    case Conn::False: return true;
    case Conn::Lit: return !is_general_atom(f->atom);
    case Conn::And:
    case Conn::Or:
      for (Formula a : f->args)
        if (!is_elementary(a)) return false;
      return true;
    default: return false;
  }
}

bool eval_elementary(Formula f, const std::map<std::string, bool>& assignment) {
  switch (f->kind) {
    case Conn::True: return true;
    case Conn::False: return false;
    case Conn::Lit: {
      if (is_general_atom(f->atom))
        throw std::invalid_argument("eval_elementary: general atom " + f->atom);
      auto it = assignment.find(f->atom);
      if (it == assignment.end())
        throw std::invalid_argument("eval_elementary: unassigned atom " + f->atom);
      return f->neg ? !it->second : it->second;
    }
    case Conn::And:
      for (Formula a : f->args)
        if (!eval_elementary(a, assignment)) return false;
      return true;
    case Conn::Or:
      for (Formula a : f->args)
        if (eval_elementary(a, assignment)) return true;
      return false;
    default:
      throw std::invalid_argument("eval_elementary: non-elementary formula");
  }
}

bool is_tautology(Formula f) {
  if (!is_elementary(f)) throw std::invalid_argument("is_tautology: non-elementary formula");
  std::set<std::string> as = atoms(f);
  std::vector<std::string> names(as.begin(), as.end());
  if (names.size() > 24) throw std::invalid_argument("is_tautology: too many atoms");
  std::map<std::string, bool> assignment;
  for (std::uint64_t mask = 0; mask < (1ull << names.size()); ++mask) {
    for (std::size_t i = 0; i < names.size(); ++i)
      assignment[names[i]] = (mask >> i) & 1;
    if (!eval_elementary(f, assignment)) return false;
  }
  return true;
}

bool is_stable(Formula f) { return is_tautology(elementarise(f)); }

// ---------------------------------------------------------------- sites

namespace {

void sites_rec(Formula f, Conn filter, std::vector<int>& path, bool surface,
               bool semisurface, std::vector<Site>& out) {
  if (f->kind == filter) out.push_back({path, f, surface, semisurface});
  bool child_surface = surface;
  bool child_semi = semisurface;
  if (f->kind == Conn::Chand || f->kind == Conn::Chor) {
    child_surface = false;
    child_semi = false;
  } else if (f->kind == Conn::Brec || f->kind == Conn::Cobrec) {
    child_surface = false;
  }
  for (std::size_t i = 0; i < f->args.size(); ++i) {
    path.push_back(static_cast<int>(i));
    sites_rec(f->args[i], filter, path, child_surface, child_semi, out);
    path.pop_back();
  }
}

} // namespace

std::vector<Site> surface_sites(Formula f, Conn filter) {
  std::vector<Site> out;
  std::vector<int> path;
  sites_rec(f, filter, path, true, true, out);
  return out;
}

int recurrence_complexity(Formula f) {
  int n = (f->kind == Conn::Brec || f->kind == Conn::Cobrec) ? 1 : 0;
  for (Formula a : f->args) n += recurrence_complexity(a);
  return n;
}

Formula rename_atoms(Formula f, const std::map<std::string, std::string>& mapping) {
  switch (f->kind) {
    case Conn::Lit: {
      auto it = mapping.find(f->atom);
      return it == mapping.end() ? f : mk_lit(it->second, f->neg);
    }
    case Conn::True:
    case Conn::False: return f;
    default: {
      std::vector<Formula> args;
      args.reserve(f->args.size());
      for (Formula a : f->args) args.push_back(rename_atoms(a, mapping));
      return intern(f->kind, f->atom, f->neg, std::move(args));
    }
  }
}

// ---------------------------------------------------------------- gates

bool in_language(Formula f, SystemId sys) {
  switch (f->kind) {
    case Conn::Not:
    case Conn::Impl:
    case Conn::Brimpl:
      return in_language(normalize(f), sys);
    default: break;
  }
  switch (sys) {
    case SystemId::CL1:
    case SystemId::CL2:
      switch (f->kind) {
        case Conn::True:
        case Conn::False: return true;
        case Conn::Lit:
          return sys == SystemId::CL2 || !is_general_atom(f->atom);
        case Conn::And:
        case Conn::Or:
        case Conn::Chand:
        case Conn::Chor: break;
        default: return false;
      }
      break;
    case SystemId::CCC:
    case SystemId::CL5:
      switch (f->kind) {
        case Conn::True:
        case Conn::False:
        case Conn::Lit: return true;
        case Conn::And:
        case Conn::Or: break;
        default: return false;
      }
      break;
    case SystemId::CL15:
      switch (f->kind) {
        case Conn::Lit: return is_general_atom(f->atom);
        case Conn::And:
        case Conn::Or:
        case Conn::Brec:
        case Conn::Cobrec: break;
        default: return false; // constants are not in the CL15 language
      }
      break;
  }
  for (Formula a : f->args)
    if (!in_language(a, sys)) return false;
  return true;
}

// ---------------------------------------------------------------- paths

Formula subformula_at(Formula f, const std::vector<int>& path) {
  Formula cur = f;
  for (int i : path) {
    if (i < 0 || static_cast<std::size_t>(i) >= cur->args.size())
      throw std::out_of_range("subformula_at: bad path");
    cur = cur->args[i];
  }
  return cur;
}

Formula replace_at(Formula f, const std::vector<int>& path, Formula repl) {
  if (path.empty()) return repl;
  int i = path[0];
  if (i < 0 || static_cast<std::size_t>(i) >= f->args.size())
    throw std::out_of_range("replace_at: bad path");
  std::vector<Formula> args = f->args;
  args[i] = replace_at(args[i], std::vector<int>(path.begin() + 1, path.end()), repl);
  return intern(f->kind, f->atom, f->neg, std::move(args));
}

void collect_atoms(Formula f, std::set<std::string>& out) {
  if (f->kind == Conn::Lit) out.insert(f->atom);
  for (Formula a : f->args) collect_atoms(a, out);
}

std::set<std::string> atoms(Formula f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

} // namespace col
