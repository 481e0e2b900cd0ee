#ifndef COL_TESTS_ORACLE_HPP_
#define COL_TESTS_ORACLE_HPP_

// Independent decision oracles used only by tests: a game-theoretic
// uniform-policy recursion over formula states, with terminal safety
// evaluated as the game-root winner under every elementary assignment.

#include <map>
#include <set>
#include <vector>

#include "col/bruteforce.hpp"
#include "col/formula.hpp"
#include "col/games.hpp"

namespace col_test {

using namespace col;

inline Player root_winner(Formula f, const std::map<std::string, bool>& a) {
  switch (f->kind) {
    case Conn::True: return Player::Machine;
    case Conn::False: return Player::Environment;
    case Conn::Lit: {
      bool v = a.at(f->atom);
      if (f->neg) v = !v;
      return v ? Player::Machine : Player::Environment;
    }
    case Conn::And:
      for (Formula x : f->args)
        if (root_winner(x, a) == Player::Environment) return Player::Environment;
      return Player::Machine;
    case Conn::Or:
      for (Formula x : f->args)
        if (root_winner(x, a) == Player::Machine) return Player::Machine;
      return Player::Environment;
    case Conn::Chand: return Player::Machine;
    case Conn::Chor: return Player::Environment;
    default: throw std::invalid_argument("root_winner: unsupported node");
  }
}

// True iff the position is Machine-won under every assignment when neither
// player moves again.
inline bool safe_everywhere(Formula f) {
  std::vector<std::string> names;
  for (const auto& n : atoms(f)) names.push_back(n);
  std::map<std::string, bool> a;
  for (unsigned mask = 0; mask < (1u << names.size()); ++mask) {
    for (std::size_t i = 0; i < names.size(); ++i) a[names[i]] = (mask >> i) & 1;
    if (root_winner(f, a) == Player::Environment) return false;
  }
  return true;
}

// Machine has a uniform (assignment-independent) winning policy iff it can
// move to a winning state now, or the state is safe and stays winning under
// every Environment choice.
inline bool uniform_win(Formula f, std::map<Formula, char>& memo) {
  auto it = memo.find(f);
  if (it != memo.end()) return it->second;
  memo[f] = 0;
  bool win = false;
  for (const Site& s : surface_sites(f, Conn::Chor)) {
    if (!s.surface) continue;
    for (Formula comp : s.subformula->args)
      if (uniform_win(replace_at(f, s.path, comp), memo)) {
        win = true;
        break;
      }
    if (win) break;
  }
  if (!win && safe_everywhere(f)) {
    win = true;
    for (const Site& s : surface_sites(f, Conn::Chand)) {
      if (!s.surface) continue;
      for (Formula comp : s.subformula->args)
        if (!uniform_win(replace_at(f, s.path, comp), memo)) {
          win = false;
          break;
        }
      if (!win) break;
    }
  }
  memo[f] = win ? 1 : 0;
  return win;
}

} // namespace col_test

#endif
