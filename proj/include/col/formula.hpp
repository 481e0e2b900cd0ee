#ifndef COL_FORMULA_HPP_
#define COL_FORMULA_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace col {

// Connective kinds. Not/Impl/Brimpl are sugar and survive only until
// normalize(); everything downstream assumes negation normal form.
enum class Conn {
  True,
  False,
  Lit,
  And,    // parallel conjunction
  Or,     // parallel disjunction
  Chand,  // choice conjunction
  Chor,   // choice disjunction
  Brec,   // branching recurrence
  Cobrec, // branching corecurrence
  Not,
  Impl,
  Brimpl
};

struct Node;
using Formula = const Node*;

// Immutable, hash-consed AST node. Structural equality is pointer equality.
struct Node {
  Conn kind;
  std::string atom; // Lit only
  bool neg = false; // Lit only
  std::vector<Formula> args;
  std::size_t hash = 0;
};

enum class SystemId { CL1, CL2, CCC, CL5, CL15 };

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(msg), line(line), col(col) {}
};

// Constructors (interning).
Formula mk_true();
Formula mk_false();
Formula mk_lit(const std::string& atom, bool neg = false);
Formula mk(Conn kind, std::vector<Formula> args);

inline bool is_general_atom(const std::string& name) {
  return !name.empty() && name[0] >= 'A' && name[0] <= 'Z';
}

Formula parse(const std::string& text);

enum class Style { Ascii, Unicode };
std::string render(Formula f, Style style = Style::Ascii);

Formula normalize(Formula f);
bool is_normalized(Formula f);

// Only meaningful for CL1/CL2 formulas; rejects recurrence operators.
Formula elementarise(Formula f);
bool is_stable(Formula f);

// An occurrence of some subformula together with scope information.
struct Site {
  std::vector<int> path;
  Formula subformula;
  bool surface;     // not under Chand/Chor/Brec/Cobrec
  bool semisurface; // not under Chand/Chor
};

std::vector<Site> surface_sites(Formula f, Conn filter);

int recurrence_complexity(Formula f);

Formula rename_atoms(Formula f, const std::map<std::string, std::string>& mapping);

bool is_elementary(Formula f);
bool eval_elementary(Formula f, const std::map<std::string, bool>& assignment);
bool is_tautology(Formula f); // elementary f only

// Language gates per system.
bool in_language(Formula f, SystemId sys);

// Path addressing helpers shared by the provers.
Formula subformula_at(Formula f, const std::vector<int>& path);
Formula replace_at(Formula f, const std::vector<int>& path, Formula repl);

void collect_atoms(Formula f, std::set<std::string>& out);
std::set<std::string> atoms(Formula f);

} // namespace col

#endif
