#ifndef COL_BRUTEFORCE_HPP_
#define COL_BRUTEFORCE_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "col/formula.hpp"
#include "col/games.hpp"

namespace col {

enum class BFRule { R1, R2, R3 };

struct BFStep {
  Formula formula;
  BFRule rule;
  std::vector<int> premises; // indices of earlier steps
  // Rule 2: site = path of the surface choice, component = chosen index.
  // Rule 3: site/site2 = positive/negative literal paths, fresh = new atom.
  std::vector<int> site;
  int component = -1;
  std::vector<int> site2;
  std::string fresh;
};

struct BFProof {
  SystemId system; // CL1 or CL2
  Formula target;
  std::vector<BFStep> steps;
};

enum class VerdictKind { Provable, Unprovable, ResourceExhausted };

struct BFVerdict {
  VerdictKind kind;
  std::optional<BFProof> proof;
  long nodes = 0;
};

// Rule 1 (wait): defined only for stable formulas; the premise set replaces
// every surface choice-conjunction occurrence by each of its components.
std::optional<std::vector<Formula>> rule1_premises(Formula f);

struct R2Entry {
  Formula premise;
  std::vector<int> site;
  int component;
};
std::vector<R2Entry> rule2_premises(Formula f);

struct R3Entry {
  Formula premise;
  std::vector<int> pos_site;
  std::vector<int> neg_site;
  std::string fresh;
};
std::vector<R3Entry> rule3_premises(Formula f);

// Reusable search state: the memo persists across calls so that large
// formula families share subgoal verdicts.
class Decider {
 public:
  struct How {
    BFRule rule;
    std::vector<Formula> premises;
    std::vector<int> site;
    int component = -1;
    std::vector<int> site2;
    std::string fresh;
  };

  explicit Decider(SystemId sys, long max_nodes = 50000000);
  bool provable(Formula f); // f must be normalized and in the language
  const How* how(Formula f) const;
  BFProof build_proof(Formula f);
  long nodes() const { return nodes_; }

 private:
  SystemId sys_;
  long max_nodes_;
  long nodes_ = 0;
  std::map<Formula, std::optional<How>> memo_;
};

BFVerdict decide(Formula f, SystemId system, long max_nodes = 50000000);

bool check_proof(const BFProof& p, std::string* error = nullptr);

// Shared across extracted strategies so re-deciding is memoized.
struct StrategyContext {
  std::map<SystemId, std::shared_ptr<Decider>> deciders;
  std::shared_ptr<Decider> decider(SystemId sys);
};

Strategy extract_strategy(const BFProof& p,
                          std::shared_ptr<StrategyContext> ctx = nullptr);

nlohmann::json bf_proof_to_json(const BFProof& p);
BFProof bf_proof_from_json(const nlohmann::json& j);

} // namespace col

#endif
