#ifndef COL_CL5_HPP_
#define COL_CL5_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "col/formula.hpp"

namespace col {

// Shallow cirquent: a pool of oformulas plus groups of pool positions.
struct ShallowCirquent {
  std::vector<Formula> pool;
  std::vector<std::set<int>> groups;
  bool operator==(const ShallowCirquent&) const = default;
  bool well_formed() const;
};

struct CL5Rule {
  enum Kind {
    AxiomEmpty,
    AxiomIdentity,   // formula = F; conclusion <~F, F> with one group
    Mix,             // two premises
    ExchangeOformula, // i: swap pool i, i+1
    ExchangeOgroup,   // i: swap groups i, i+1
    WeakenPool,       // i: insert formula (arcless) at pool position i
    WeakenOgroup,     // i = group, j = pool position gaining the arc
    DuplicateDown,    // i: group i becomes two adjacent copies
    DuplicateUp,      // i: identical adjacent groups i, i+1 become one
    Contract,         // i: identical adjacent oformulas i, i+1 merge (CCC)
    OrIntro,          // i: oformulas i, i+1 merge into formula
    AndIntro          // i: paired groups merge, then i, i+1 merge into formula
  };
  Kind kind;
  int i = -1;
  int j = -1;
  Formula formula = nullptr; // AxiomIdentity, WeakenPool, OrIntro, AndIntro
};

// Whether H can be read as the disjunction (conjunction) of exactly F and G,
// splitting an n-ary node at any point.
bool or_combines(Formula H, Formula F, Formula G);
bool and_combines(Formula H, Formula F, Formula G);

// Applies a rule top-down; throws std::invalid_argument naming the violated
// clause on a mismatch.
ShallowCirquent apply_cl5(const std::vector<ShallowCirquent>& premises,
                          const CL5Rule& rule);

bool check_step(const std::vector<ShallowCirquent>& premises,
                const ShallowCirquent& conclusion, const CL5Rule& rule,
                SystemId system, std::string* error = nullptr);

struct CL5Step {
  CL5Rule rule;
  std::vector<int> premises; // indices of earlier steps
  ShallowCirquent cirquent;  // this step's conclusion
};

struct CL5Proof {
  SystemId system; // CL5 or CCC
  Formula target;
  std::vector<CL5Step> steps;
};

ShallowCirquent singleton_cirquent(Formula f);

bool check_proof(const CL5Proof& p, std::string* error = nullptr);

// Abstract resource semantics. A port is a literal occurrence; an
// arrangement pairs opposite ports of the same atom, pairwise disjointly.
struct Port {
  int pool_index;
  std::vector<int> path;
  bool operator==(const Port&) const = default;
  auto operator<=>(const Port&) const = default;
};

struct Arrangement {
  std::vector<std::pair<Port, Port>> pairs;
};

struct ArsResult {
  bool valid;
  std::optional<Arrangement> witness;
};

ArsResult ars_valid(const ShallowCirquent& c, int max_ports = 16);

// Classical reading: a cirquent is true under an assignment when every group
// has at least one true member formula.
bool cirquent_true(const ShallowCirquent& c,
                   const std::map<std::string, bool>& assignment);
bool cirquent_tautology(const ShallowCirquent& c);

// True iff some merge of (positive, negative) occurrence pairs into shared
// atoms yields a classical tautology with every atom used at most twice.
bool decide_binary(Formula f, int max_occurrences = 16);

// CCC: classical tautology; CL5: binary-tautology instance.
bool decide_cl5(Formula f, SystemId system);

struct CL5SearchConfig {
  long max_nodes = 200000;
  int max_depth = 64;
  int max_pool = 16;
  int max_groups = 12;
  int contraction_budget = 2; // CCC only
};

std::optional<CL5Proof> search_proof(Formula f, SystemId system,
                                     const CL5SearchConfig& cfg = {});

// Canonical encoding invariant exactly under exchange moves.
std::string cl5_canonical_key(const ShallowCirquent& c);

nlohmann::json cirquent_to_json(const ShallowCirquent& c);
ShallowCirquent cirquent_from_json(const nlohmann::json& j);
nlohmann::json cl5_proof_to_json(const CL5Proof& p);
CL5Proof cl5_proof_from_json(const nlohmann::json& j);
std::string cirquent_to_dot(const ShallowCirquent& c);

} // namespace col

#endif
