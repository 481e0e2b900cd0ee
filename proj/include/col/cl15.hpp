#ifndef COL_CL15_HPP_
#define COL_CL15_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "col/bruteforce.hpp"
#include "col/formula.hpp"

namespace col {

// A three-level cirquent: oformulas with undergroups below and overgroups
// above; every oformula belongs to at least one group of each kind.
struct Cirquent15 {
  std::vector<Formula> oformulas;
  std::vector<std::set<int>> undergroups;
  std::vector<std::set<int>> overgroups;
  bool operator==(const Cirquent15&) const = default;
  bool well_formed() const;
};

struct CL15RuleInstance {
  enum Tag {
    A,          // axiom (no premise)
    EUnder,     // i: swap undergroups i, i+1
    EOformula,  // i: swap oformulas i, i+1
    EOver,      // i: swap overgroups i, i+1
    W,          // arc form: i = undergroup, j = oformula gaining the arc;
                // oformula form: formula/insert_at/i/over_subset/new_overgroups
    C,          // i: adjacent identical corecurrence oformulas i, i+1 merge
    DUnder,     // i: undergroup i becomes two adjacent copies
    DOver,      // i: overgroup i becomes two adjacent copies
    M,          // i: overgroups i, i+1 merge into their union
    OrI,        // i: adjacent oformulas i, i+1 merge into formula
    AndI,       // i: paired undergroups merge, then i, i+1 merge into formula
    RecI,       // i = oformula, j = the private singleton overgroup removed
    CorecI      // i = oformula; over_subset = overgroups losing the arc
  };
  Tag tag;
  int i = -1;
  int j = -1;
  Formula formula = nullptr;
  std::set<int> over_subset;
  int insert_at = -1;
  std::vector<int> new_overgroups;
};

Cirquent15 formula_to_target(Formula f);

bool axiom_match(const Cirquent15& c);

// Applies a single-premise rule top-down; throws std::invalid_argument
// naming the violated clause. Weakening honors the full deletion cascade.
Cirquent15 apply_forward(const Cirquent15& premise,
                         const CL15RuleInstance& inst);

// The premise obtained from a conclusion by deleting the arc between
// undergroup u (size >= 2) and oformula f, cascading orphaned-oformula and
// empty-overgroup deletion.
Cirquent15 weaken_delete(const Cirquent15& conclusion, int u, int f);

// All (premise, instance) pairs for the given rule whose forward application
// reproduces the conclusion exactly. Weakening enumerates arc deletions only.
std::vector<std::pair<Cirquent15, CL15RuleInstance>> enumerate_premises(
    const Cirquent15& conclusion, CL15RuleInstance::Tag tag);

struct CL15Step {
  Cirquent15 cirquent;
  CL15RuleInstance inst; // transforms the preceding cirquent into this one
};

struct CL15Proof {
  Formula target;
  std::vector<CL15Step> steps; // first step's instance is the axiom
};

bool check_proof(const CL15Proof& p, std::string* error = nullptr);

// Equal for two cirquents iff one is reachable from the other by Exchange
// moves alone.
std::string cl15_canonical_key(const Cirquent15& c);

// Opt-in coarser identity: additionally quotients by commutativity of the
// parallel connectives inside oformulas.
std::string cl15_canonical_key_coarse(const Cirquent15& c);

struct CL15SearchConfig {
  enum Mode { cl15c, bounded, depth_limited };
  Mode mode = bounded;
  int contraction_budget = 1; // forced to 0 in cl15c mode
  long max_nodes = 1000000;
  int max_proof_length = 64; // non-Exchange steps along a branch
  int max_oformulas = 32;
};

struct CL15Verdict {
  VerdictKind kind;
  std::optional<CL15Proof> proof;
  std::string note; // active bounds, attached to non-Provable verdicts
};

CL15Verdict decide_cl15(Formula f, const CL15SearchConfig& cfg = {});

nlohmann::json cirquent15_to_json(const Cirquent15& c);
Cirquent15 cirquent15_from_json(const nlohmann::json& j);
nlohmann::json cl15_proof_to_json(const CL15Proof& p);
CL15Proof cl15_proof_from_json(const nlohmann::json& j);
std::string cirquent15_to_dot(const Cirquent15& c);

} // namespace col

#endif
