#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "col/games.hpp"

using namespace col;

namespace {

Interpretation elem_itp(std::map<std::string, bool> m) {
  Interpretation itp;
  itp.elementary = std::move(m);
  return itp;
}

// A small two-move game: Environment picks a side, then Machine may flip it.
Game sample_game() {
  Interpretation itp = elem_itp({{"p", true}, {"q", false}});
  return interpret(parse("(p + q) * (q + p)"), itp);
}

Run run_of(std::initializer_list<std::pair<Player, const char*>> moves) {
  Run r;
  for (auto& [p, m] : moves) r.push_back({p, m});
  return r;
}

} // namespace

TEST_CASE("interpret literals and constants") {
  Game g = interpret(parse("p"), elem_itp({{"p", true}}));
  CHECK(g->winner == Player::Machine);
  CHECK(g->edges.empty());
  CHECK(interpret(parse("~p"), elem_itp({{"p", true}}))->winner ==
        Player::Environment);
  CHECK(interpret(parse("1"), {})->winner == Player::Machine);
  CHECK_THROWS(interpret(parse("P"), {}));
  CHECK_THROWS(interpret(normalize(parse("!P")), {}));
}

TEST_CASE("choice games") {
  Game g = interpret(parse("p + q"), elem_itp({{"p", false}, {"q", true}}));
  CHECK(g->winner == Player::Environment);
  REQUIRE(g->edges.size() == 2);
  CHECK(g->edges[0].first == LabMove{Player::Machine, "0"});
  CHECK(g->edges[1].first == LabMove{Player::Machine, "1"});
  CHECK(g->edges[1].second->winner == Player::Machine);

  Game h = interpret(parse("p * q"), elem_itp({{"p", true}, {"q", true}}));
  CHECK(h->winner == Player::Machine);
  CHECK(h->edges[0].first.by == Player::Environment);
}

TEST_CASE("parallel games carry prefixed moves") {
  Interpretation itp;
  itp.general["G"] = sample_game();
  Game g = interpret(normalize(parse("~G | G")), itp);
  CHECK(!g->edges.empty());
  for (const auto& [lm, child] : g->edges) {
    bool p0 = lm.move.rfind("0.", 0) == 0;
    bool p1 = lm.move.rfind("1.", 0) == 0;
    CHECK((p0 || p1));
  }
}

TEST_CASE("adjudicate") {
  Game g = interpret(parse("p * q"), elem_itp({{"p", true}, {"q", true}}));
  auto a = adjudicate(g, {});
  CHECK(a.legal);
  CHECK(a.winner == Player::Machine); // Environment failed to choose

  auto b = adjudicate(g, run_of({{Player::Machine, "0"}}));
  CHECK_FALSE(b.legal);
  CHECK(b.offender == Player::Machine);
  CHECK(b.winner == Player::Environment);

  Game h = interpret(parse("p + q"), elem_itp({{"p", false}, {"q", true}}));
  auto c = adjudicate(h, run_of({{Player::Machine, "1"}}));
  CHECK(c.legal);
  CHECK(c.winner == Player::Machine);
}

TEST_CASE("prefixation") {
  Interpretation itp = elem_itp({{"p", true}, {"q", false}});
  Game g = interpret(parse("p * q"), itp);
  CHECK(game_equal(prefixation(g, run_of({{Player::Environment, "0"}})),
                   interpret(parse("p"), itp)));
  CHECK(game_equal(prefixation(g, {}), g));
  Game h = interpret(parse("p + q"), itp);
  CHECK(game_equal(prefixation(h, run_of({{Player::Machine, "1"}})),
                   interpret(parse("q"), itp)));
  CHECK_THROWS(prefixation(g, run_of({{Player::Machine, "0"}})));
}

TEST_CASE("play_match") {
  Interpretation itp;
  itp.general["G"] = sample_game();
  Game g = interpret(normalize(parse("~G | G")), itp);

  // environment opens in component 1, copycat mirrors into component 0
  int step = 0;
  Strategy env = [&step](const Run&) -> std::optional<std::string> {
    return step++ == 0 ? std::optional<std::string>("1.0") : std::nullopt;
  };
  auto res = play_match(g, make_copycat(), env, 32);
  CHECK(res.winner == Player::Machine);
  CHECK(!res.offender.has_value());

  auto quiet = play_match(interpret(parse("1"), {}), always_pass(), always_pass(), 8);
  CHECK(quiet.run.empty());
  CHECK(quiet.winner == Player::Machine);

  // environment chooses the losing side of p * q and stalls
  Game pc = interpret(parse("p * q"), elem_itp({{"p", false}, {"q", true}}));
  int s2 = 0;
  Strategy env2 = [&s2](const Run&) -> std::optional<std::string> {
    return s2++ == 0 ? std::optional<std::string>("0") : std::nullopt;
  };
  CHECK(play_match(pc, always_pass(), env2, 8).winner == Player::Environment);

  // an illegal move loses immediately for its author
  Strategy bad = [](const Run&) { return std::optional<std::string>("7"); };
  auto r3 = play_match(pc, bad, always_pass(), 8);
  CHECK(r3.offender == Player::Machine);
  CHECK(r3.winner == Player::Environment);
}

TEST_CASE("verify_strategy") {
  // copycat wins ~G | G for a catalogue of small games
  std::vector<Game> cat;
  cat.push_back(interpret(parse("p"), elem_itp({{"p", true}})));
  cat.push_back(interpret(parse("p"), elem_itp({{"p", false}})));
  cat.push_back(interpret(parse("p + q"), elem_itp({{"p", false}, {"q", true}})));
  cat.push_back(interpret(parse("p * q"), elem_itp({{"p", true}, {"q", false}})));
  cat.push_back(sample_game());
  for (const Game& G : cat) {
    Interpretation itp;
    itp.general["G"] = G;
    CHECK(verify_strategy(interpret(normalize(parse("~G | G")), itp), make_copycat()));
  }

  CHECK_FALSE(verify_strategy(interpret(parse("p + ~p"), elem_itp({{"p", true}})),
                              always_pass()));
  CHECK(verify_strategy(interpret(parse("p | ~p"), elem_itp({{"p", true}})),
                        always_pass()));
}

TEST_CASE("is_delay worked example") {
  auto B = Player::Environment, T = Player::Machine;
  Run original = {{B, "0"}, {T, "1"}, {B, "2"}, {T, "3"}, {B, "4"}, {T, "5"},
                  {T, "6"}, {B, "7"}, {B, "8"}, {T, "9"}, {B, "10"}};
  Run candidate = {{B, "0"}, {B, "2"}, {T, "1"}, {T, "3"}, {B, "4"}, {T, "5"},
                   {B, "7"}, {B, "8"}, {T, "6"}, {B, "10"}, {T, "9"}};
  CHECK(is_delay(candidate, original, Player::Machine));
  CHECK_FALSE(is_delay(original, candidate, Player::Machine));
  CHECK(is_delay(original, original, Player::Machine));
  CHECK(is_delay(original, original, Player::Environment));

  Run swapped = original;
  std::swap(swapped[1], swapped[3]); // reorders Machine's own moves
  CHECK_FALSE(is_delay(swapped, original, Player::Machine));
  CHECK_FALSE(is_delay(swapped, original, Player::Environment));
}

TEST_CASE("is_static") {
  CHECK(is_static(interpret(parse("p"), elem_itp({{"p", true}}))));
  CHECK(is_static(interpret(parse("p * q"), elem_itp({{"p", true}, {"q", false}}))));
  CHECK(is_static(interpret(parse("p + q"), elem_itp({{"p", true}, {"q", false}}))));
  Interpretation itp = elem_itp({{"p", true}, {"q", false}});
  CHECK(is_static(interpret(parse("(p + q) | ~p"), itp)));
  CHECK(is_static(interpret(parse("(p * q) & (q + p)"), itp)));

  // a non-static content: Machine wins only if it moves before Environment
  auto racy = std::make_shared<GNode>();
  racy->winner = Player::Environment;
  auto afterM = std::make_shared<GNode>();
  afterM->winner = Player::Machine;
  auto afterMB = std::make_shared<GNode>();
  afterMB->winner = Player::Machine;
  afterM->edges.emplace_back(LabMove{Player::Environment, "b"}, afterMB);
  auto afterB = std::make_shared<GNode>();
  afterB->winner = Player::Environment;
  auto afterBM = std::make_shared<GNode>();
  afterBM->winner = Player::Environment;
  afterB->edges.emplace_back(LabMove{Player::Machine, "a"}, afterBM);
  racy->edges.emplace_back(LabMove{Player::Machine, "a"}, afterM);
  racy->edges.emplace_back(LabMove{Player::Environment, "b"}, afterB);
  CHECK_FALSE(is_static(Game(racy)));
}

TEST_CASE("game-level identities") {
  Interpretation itp;
  itp.general["A"] = sample_game();
  itp.general["B"] = interpret(parse("p + q"), elem_itp({{"p", false}, {"q", true}}));
  itp.elementary = {{"p", true}, {"q", false}};

  CHECK(game_equal(interpret(normalize(parse("~~(A & p)")), itp),
                   interpret(normalize(parse("A & p")), itp)));
  CHECK(game_equal(interpret(normalize(parse("~(A & B)")), itp),
                   interpret(normalize(parse("~A | ~B")), itp)));
  Interpretation e2 = elem_itp({{"p", true}, {"q", false}});
  CHECK(game_equal(interpret(normalize(parse("~(p * q)")), e2),
                   interpret(normalize(parse("~p + ~q")), e2)));
}

TEST_CASE("json round trips") {
  Game g = sample_game();
  CHECK(game_equal(game_from_json(game_to_json(g)), g));
  Run r = run_of({{Player::Environment, "0"}, {Player::Machine, "1.0"}});
  CHECK(run_from_json(run_to_json(r)) == r);
}
