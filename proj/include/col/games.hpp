#ifndef COL_GAMES_HPP_
#define COL_GAMES_HPP_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "col/formula.hpp"

namespace col {

enum class Player { Machine, Environment }; // T and B in file formats

inline Player opp(Player p) {
  return p == Player::Machine ? Player::Environment : Player::Machine;
}

struct LabMove {
  Player by;
  std::string move;
  bool operator==(const LabMove&) const = default;
};

using Run = std::vector<LabMove>;

struct GNode;
using Game = std::shared_ptr<const GNode>;

// Finite constant game: a prefix-closed labeled move tree with a winner at
// every node. The edge sequences from the root form the legal-run set.
struct GNode {
  Player winner;
  std::vector<std::pair<LabMove, Game>> edges;
};

Game make_leaf(Player winner);
Game negate_game(const Game& g);
bool game_equal(const Game& a, const Game& b);
int game_depth(const Game& g);

struct Interpretation {
  std::map<std::string, bool> elementary; // true = Machine-won
  std::map<std::string, Game> general;
};

Game interpret(Formula f, const Interpretation& itp);

struct Adjudication {
  bool legal;
  std::optional<Player> offender;
  Player winner;
};

Adjudication adjudicate(const Game& g, const Run& run);
Game prefixation(const Game& g, const Run& pos);

// Deterministic positional move policy for one player; nullopt = pass.
using Strategy = std::function<std::optional<std::string>(const Run&)>;

struct MatchResult {
  Run run;
  Player winner;
  std::optional<Player> offender;
};

// Alternating scheduler, Environment offered first; stops on double pass.
MatchResult play_match(const Game& g, const Strategy& machine,
                       const Strategy& environment, int max_steps);

// Exhaustive adversary: true iff every Environment behavior loses to machine.
bool verify_strategy(const Game& g, const Strategy& machine);

// Copycat between parallel components `left` and `right` of the root.
Strategy make_copycat(int left = 0, int right = 1);
Strategy always_pass();

bool is_delay(const Run& candidate, const Run& original, Player p);

struct StaticCheckConfig {
  int max_run_length = 4;
  long max_pairs = 4000000;
};

bool is_static(const Game& g, const StaticCheckConfig& cfg = {});

// Catalogue serialization: {"winner":"T"|"B","edges":[{"by","move","to"}]}
nlohmann::json game_to_json(const Game& g);
Game game_from_json(const nlohmann::json& j);
nlohmann::json run_to_json(const Run& r);
Run run_from_json(const nlohmann::json& j);

} // namespace col

#endif
