#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "col/cl5.hpp"

using namespace col;

namespace {

const char* kBlass = "((~P|~Q)&(~R|~S))|((P|R)&(Q|S))";
const char* kLinear = "((~P|~P)&(~P|~P))|((P|P)&(P|P))";

ShallowCirquent cq(std::vector<const char*> pool,
                   std::vector<std::set<int>> groups) {
  ShallowCirquent c;
  for (const char* s : pool) c.pool.push_back(normalize(parse(s)));
  c.groups = std::move(groups);
  return c;
}

bool equiv_under_all(const ShallowCirquent& a, const ShallowCirquent& b,
                     std::vector<std::string> vars) {
  std::map<std::string, bool> asg;
  for (unsigned mask = 0; mask < (1u << vars.size()); ++mask) {
    for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = (mask >> i) & 1;
    if (cirquent_true(a, asg) != cirquent_true(b, asg)) return false;
  }
  return true;
}

} // namespace

TEST_CASE("axioms and identity") {
  CHECK(apply_cl5({}, {CL5Rule::AxiomEmpty}) == ShallowCirquent{});
  Formula P = parse("P");
  ShallowCirquent id = apply_cl5({}, {CL5Rule::AxiomIdentity, -1, -1, P});
  CHECK(id == cq({"~P", "P"}, {{0, 1}}));
  CHECK(check_step({}, id, {CL5Rule::AxiomIdentity, -1, -1, P}, SystemId::CL5));

  Formula big = parse("P & (Q | ~R)");
  ShallowCirquent id2 = apply_cl5({}, {CL5Rule::AxiomIdentity, -1, -1, big});
  CHECK(id2.pool[0] == normalize(parse("~P | (~Q & R)")));
  CHECK(id2.pool[1] == normalize(big));
}

TEST_CASE("structural rules apply positionally") {
  ShallowCirquent c = cq({"P", "Q", "~P"}, {{0, 2}, {1}});

  ShallowCirquent ex = apply_cl5({c}, {CL5Rule::ExchangeOformula, 0});
  CHECK(ex == cq({"Q", "P", "~P"}, {{1, 2}, {0}}));
  ShallowCirquent ex2 = apply_cl5({ex}, {CL5Rule::ExchangeOformula, 0});
  CHECK(ex2 == c);

  ShallowCirquent gx = apply_cl5({c}, {CL5Rule::ExchangeOgroup, 0});
  CHECK(gx == cq({"P", "Q", "~P"}, {{1}, {0, 2}}));

  ShallowCirquent w = apply_cl5({c}, {CL5Rule::WeakenOgroup, 1, 2});
  CHECK(w == cq({"P", "Q", "~P"}, {{0, 2}, {1, 2}}));
  CHECK_THROWS_AS(apply_cl5({c}, CL5Rule{CL5Rule::WeakenOgroup, 0, 2}),
                  std::invalid_argument);

  ShallowCirquent wp = apply_cl5({c}, {CL5Rule::WeakenPool, 1, -1, parse("S")});
  CHECK(wp == cq({"P", "S", "Q", "~P"}, {{0, 3}, {2}}));

  ShallowCirquent dd = apply_cl5({c}, {CL5Rule::DuplicateDown, 0});
  CHECK(dd == cq({"P", "Q", "~P"}, {{0, 2}, {0, 2}, {1}}));
  CHECK(apply_cl5({dd}, {CL5Rule::DuplicateUp, 0}) == c);
  CHECK_THROWS_AS(apply_cl5({dd}, CL5Rule{CL5Rule::DuplicateUp, 1}),
                  std::invalid_argument);

  ShallowCirquent mx = apply_cl5({c, cq({"R"}, {{0}})}, {CL5Rule::Mix});
  CHECK(mx == cq({"P", "Q", "~P", "R"}, {{0, 2}, {1}, {3}}));
}

TEST_CASE("contraction merges adjacent identical oformulas") {
  ShallowCirquent p = cq({"P", "P", "~P"}, {{0, 2}, {1}});
  ShallowCirquent c = apply_cl5({p}, {CL5Rule::Contract, 0});
  CHECK(c == cq({"P", "~P"}, {{0, 1}, {0}}));
  CHECK(check_step({p}, c, {CL5Rule::Contract, 0}, SystemId::CCC));
  std::string why;
  CHECK_FALSE(check_step({p}, c, {CL5Rule::Contract, 0}, SystemId::CL5, &why));
  CHECK(why.find("contraction") != std::string::npos);
  CHECK_THROWS_AS(apply_cl5({cq({"P", "Q"}, {})}, CL5Rule{CL5Rule::Contract, 0}),
                  std::invalid_argument);
}

TEST_CASE("or-intro merges adjacent oformulas, redirecting arcs") {
  ShallowCirquent p = cq({"~P", "P", "Q"}, {{0, 1}, {1, 2}});
  ShallowCirquent c = apply_cl5({p}, {CL5Rule::OrIntro, 0});
  CHECK(c == cq({"~P|P", "Q"}, {{0}, {0, 1}}));

  // n-ary targets may be introduced by naming the combined formula.
  ShallowCirquent q = cq({"P|Q", "R"}, {{0, 1}});
  ShallowCirquent cc =
      apply_cl5({q}, {CL5Rule::OrIntro, 0, -1, parse("P|Q|R")});
  CHECK(cc.pool[0] == parse("P|Q|R"));
  CHECK_THROWS_AS(
      apply_cl5({q}, CL5Rule{CL5Rule::OrIntro, 0, -1, parse("P|(Q|R)")}),
      std::invalid_argument);
}

TEST_CASE("and-intro enforces both side conditions") {
  // Legal: the two P/Q groups are disjoint and adjacent in order.
  ShallowCirquent p = cq({"P", "Q", "R"}, {{0, 2}, {1, 2}});
  ShallowCirquent c = apply_cl5({p}, {CL5Rule::AndIntro, 0});
  CHECK(c == cq({"P&Q", "R"}, {{0, 1}}));

  std::string why;
  ShallowCirquent shared = cq({"P", "Q"}, {{0, 1}});
  CHECK_FALSE(check_step({shared}, c, {CL5Rule::AndIntro, 0}, SystemId::CL5, &why));
  CHECK(why.find("both conjuncts") != std::string::npos);

  ShallowCirquent unpaired = cq({"P", "Q", "R"}, {{0, 2}, {2}, {1}});
  CHECK_FALSE(check_step({unpaired}, c, {CL5Rule::AndIntro, 0}, SystemId::CL5, &why));
  CHECK(why.find("followed") != std::string::npos);
}

TEST_CASE("check_proof accepts the two-step identity proof and rejects mutations") {
  CL5Proof p;
  p.system = SystemId::CL5;
  p.target = parse("~P|P");
  p.steps.push_back(
      {{CL5Rule::AxiomIdentity, -1, -1, parse("P")}, {}, cq({"~P", "P"}, {{0, 1}})});
  p.steps.push_back({{CL5Rule::OrIntro, 0}, {0}, cq({"~P|P"}, {{0}})});
  std::string why;
  CHECK(check_proof(p, &why));

  CL5Proof bad = p;
  bad.steps[0].cirquent = cq({"~P", "P"}, {{0}}); // drop one arc
  CHECK_FALSE(check_proof(bad, &why));
  CHECK(why.find("step 0") != std::string::npos);

  bad = p;
  bad.target = parse("P|~P");
  CHECK_FALSE(check_proof(bad, &why));
  CHECK(why.find("final cirquent") != std::string::npos);

  bad = p;
  bad.steps[1].premises = {1};
  CHECK_FALSE(check_proof(bad, &why));
  CHECK(why.find("not earlier") != std::string::npos);
}

TEST_CASE("ars validity") {
  ArsResult r = ars_valid(singleton_cirquent(parse("~P|P")));
  CHECK(r.valid);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->pairs.size() == 1);

  CHECK_FALSE(ars_valid(singleton_cirquent(parse("~P|(P&P)"))).valid);
  CHECK(ars_valid(singleton_cirquent(parse(kBlass))).valid);
  CHECK(ars_valid(singleton_cirquent(parse(kLinear))).valid);

  // Group structure matters: both groups must come out true.
  CHECK(ars_valid(cq({"~P", "P"}, {{0, 1}})).valid);
  CHECK_FALSE(ars_valid(cq({"~P", "P"}, {{0}, {1}})).valid);
  CHECK(ars_valid(cq({"P", "Q"}, {})).valid); // empty conjunction of groups

  CHECK_THROWS_AS(ars_valid(singleton_cirquent(parse(kBlass)), 4),
                  std::runtime_error);
}

TEST_CASE("binary-tautology instances") {
  CHECK(decide_binary(parse("~P|P")));
  CHECK(decide_binary(parse(kBlass)));
  CHECK(decide_binary(parse(kLinear)));
  CHECK_FALSE(decide_binary(parse("~P|(P&P)")));
  CHECK_FALSE(decide_binary(parse("P")));
  CHECK_THROWS_AS(decide_binary(parse(kBlass), 4), std::runtime_error);
}

TEST_CASE("decide: CCC is classical, CL5 is resource-conscious") {
  CHECK(decide_cl5(parse("~p|(p&p)"), SystemId::CCC));
  CHECK(decide_cl5(parse("~P|(P&P)"), SystemId::CCC));
  CHECK_FALSE(decide_cl5(parse("~P|(P&P)"), SystemId::CL5));
  CHECK(decide_cl5(parse(kBlass), SystemId::CL5));
  CHECK(decide_cl5(parse(kLinear), SystemId::CL5));
  CHECK_FALSE(decide_cl5(parse("P|Q"), SystemId::CCC));

  // CL5-provable formulas stay provable in CCC and under atom renamings.
  for (const char* s : {"~P|P", kBlass, kLinear}) {
    Formula f = parse(s);
    CHECK(decide_cl5(f, SystemId::CL5));
    CHECK(decide_cl5(f, SystemId::CCC));
    Formula g = rename_atoms(f, {{"P", "X"}, {"Q", "P"}, {"R", "Q"}, {"S", "R"}});
    CHECK(decide_cl5(g, SystemId::CL5));
  }
}

TEST_CASE("rule instances preserve classical truth in the stated directions") {
  ShallowCirquent c = cq({"p", "q", "~p"}, {{0, 2}, {1}});
  CHECK(equiv_under_all(c, apply_cl5({c}, {CL5Rule::ExchangeOformula, 1}),
                        {"p", "q"}));
  CHECK(equiv_under_all(c, apply_cl5({c}, {CL5Rule::ExchangeOgroup, 0}),
                        {"p", "q"}));
  CHECK(equiv_under_all(c, apply_cl5({c}, {CL5Rule::DuplicateDown, 0}),
                        {"p", "q"}));

  ShallowCirquent dup = cq({"p", "p", "~p"}, {{0, 2}, {1}});
  CHECK(equiv_under_all(dup, apply_cl5({dup}, {CL5Rule::Contract, 0}),
                        {"p"}));

  // Conservative or-intro: the containing group holds both disjuncts.
  ShallowCirquent po = cq({"p", "q", "r"}, {{0, 1, 2}});
  CHECK(equiv_under_all(po, apply_cl5({po}, {CL5Rule::OrIntro, 0}),
                        {"p", "q", "r"}));

  // Conservative and-intro: both split groups carry the shared member.
  ShallowCirquent pa = cq({"p", "q", "r"}, {{0, 2}, {1, 2}});
  CHECK(equiv_under_all(pa, apply_cl5({pa}, {CL5Rule::AndIntro, 0}),
                        {"p", "q", "r"}));

  // General or-intro and weakening only guarantee the top-down direction.
  ShallowCirquent gen = cq({"p", "q"}, {{0}});
  ShallowCirquent gc = apply_cl5({gen}, {CL5Rule::OrIntro, 0});
  std::map<std::string, bool> asg{{"p", false}, {"q", true}};
  CHECK_FALSE(cirquent_true(gen, asg));
  CHECK(cirquent_true(gc, asg));
  std::map<std::string, bool> asg2{{"p", true}, {"q", false}};
  CHECK(cirquent_true(gen, asg2));
  CHECK(cirquent_true(gc, asg2));
}

TEST_CASE("canonical keys quotient exactly by exchange") {
  ShallowCirquent a = cq({"P", "P", "~P"}, {{0, 2}, {1}});
  ShallowCirquent b = apply_cl5({a}, {CL5Rule::ExchangeOformula, 0});
  ShallowCirquent bb = apply_cl5({b}, {CL5Rule::ExchangeOgroup, 0});
  CHECK(cl5_canonical_key(a) == cl5_canonical_key(b));
  CHECK(cl5_canonical_key(a) == cl5_canonical_key(bb));
  ShallowCirquent other = cq({"P", "P", "~P"}, {{0, 2}, {0}});
  CHECK(cl5_canonical_key(a) != cl5_canonical_key(other));
  CHECK(cl5_canonical_key(a) !=
        cl5_canonical_key(apply_cl5({a}, {CL5Rule::WeakenOgroup, 1, 0})));
}

TEST_CASE("search finds checkable proofs within the default budget") {
  auto p = search_proof(parse("~P|P"), SystemId::CL5);
  REQUIRE(p.has_value());
  CHECK(check_proof(*p));
  int abstract = 0;
  for (const auto& s : p->steps)
    if (s.rule.kind != CL5Rule::ExchangeOformula &&
        s.rule.kind != CL5Rule::ExchangeOgroup)
      ++abstract;
  CHECK(abstract == 2); // identity axiom, then or-intro

  auto blass = search_proof(parse(kBlass), SystemId::CL5);
  REQUIRE(blass.has_value());
  std::string why;
  CHECK(check_proof(*blass, &why));

  CHECK_FALSE(search_proof(parse("~P|(P&P)"), SystemId::CL5).has_value());

  auto ccc = search_proof(parse("~p|(p&p)"), SystemId::CCC);
  REQUIRE(ccc.has_value());
  CHECK(check_proof(*ccc));
}

TEST_CASE("cirquent and proof serialization round-trips") {
  ShallowCirquent c = cq({"~P|P", "Q"}, {{0}, {0, 1}});
  CHECK(cirquent_from_json(cirquent_to_json(c)) == c);

  auto p = search_proof(parse("~P|P"), SystemId::CL5);
  REQUIRE(p.has_value());
  nlohmann::json j = cl5_proof_to_json(*p);
  CL5Proof back = cl5_proof_from_json(j);
  CHECK(check_proof(back));
  CHECK(cl5_proof_to_json(back) == j);

  std::string dot = cirquent_to_dot(c);
  CHECK(dot.find("digraph") != std::string::npos);
  CHECK(dot.find(render(c.pool[0], Style::Ascii)) != std::string::npos);
  CHECK(dot.find("g1 -> f1") != std::string::npos);
}
