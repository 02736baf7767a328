#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goalinf/grid.hpp"
#include "goalinf/pddl/ast.hpp"
#include "goalinf/pddl/problem.hpp"

namespace goalinf::planner {

inline constexpr std::size_t kMaxDynamicAtoms = 64;
inline constexpr std::size_t kMaxDynamicFluents = 8;

// Concrete simulation state. Only atoms and fluents that some effect can
// change are stored; everything else is folded into the compiled task.
// Fluent slots 0 and 1 always hold the agent's x and y.
struct WorldState {
  std::uint64_t atoms = 0;
  std::array<std::int32_t, kMaxDynamicFluents> fluents{};

  bool holds(std::size_t atom) const { return (atoms >> atom) & 1u; }
  Cell agent_cell() const { return {fluents[0], fluents[1]}; }

  auto operator<=>(const WorldState&) const = default;
};

struct WorldStateHash {
  std::size_t operator()(const WorldState& s) const noexcept {
    std::uint64_t h = s.atoms * 0x9E3779B97F4A7C15ull;
    for (auto v : s.fluents) h = (h ^ static_cast<std::uint32_t>(v)) * 0x100000001B3ull + (h >> 29);
    return static_cast<std::size_t>(h);
  }
};

struct GroundAction {
  enum class Kind { kMove, kPickup, kUnlock, kTake, kOther };

  Kind kind = Kind::kMove;
  Direction direction = Direction::kNorth;  // kMove only
  int op = -1;                              // index into Task::operators(), -1 for moves
  std::string label;                        // "(move east)", "(pickup alice key1)", ...
  double cost = 1.0;

  bool operator==(const GroundAction& o) const { return label == o.label; }
};

GroundAction move_action(Direction d, double cost = 1.0);

// Ground formula over a task's dynamic state; static parts are folded away.
struct CompiledExpr {
  enum class Kind { kConstant, kFluent, kAdd, kSub };
  Kind kind = Kind::kConstant;
  long long value = 0;
  std::size_t slot = 0;
  std::vector<CompiledExpr> operands;

  long long eval(const WorldState& s) const;
};

struct CompiledFormula {
  enum class Kind { kTrue, kFalse, kAnd, kOr, kNot, kAtom, kEquals };
  Kind kind = Kind::kTrue;
  std::size_t atom = 0;
  std::vector<CompiledFormula> children;
  std::vector<CompiledExpr> operands;

  bool eval(const WorldState& s) const;
};

struct CompiledOperator {
  std::string schema;
  std::vector<std::string> args;
  std::string label;
  GroundAction::Kind kind = GroundAction::Kind::kOther;
  CompiledFormula precondition;
  std::uint64_t add = 0;
  std::uint64_t del = 0;
  std::vector<std::pair<std::size_t, CompiledExpr>> assigns;
};

struct CompiledGoal {
  std::string label;
  std::string target;
  CompiledFormula formula;
  std::optional<Cell> target_cell;  // set when the goal pins the agent to one cell
  std::uint64_t needed_locks = 0;   // lock indices whose door blocks every route to the target
};

struct TaskOptions {
  // Every action costs this much; rescaling is used to check invariances.
  double cost_scale = 1.0;
};

struct LockInfo {
  std::string name;
  Cell cell;
  std::size_t locked_atom = 0;
};

struct KeyInfo {
  std::string name;
  std::optional<std::size_t> has_atom;
  std::optional<std::size_t> onmap_atom;
};

struct Successor {
  GroundAction action;
  WorldState state;
};

// Grounded, indexed form of a (domain, problem) pair with grid movement.
// Immutable after construction and safe to share between threads.
class Task {
 public:
  Task(const pddl::DomainAst& domain, const pddl::ProblemInstance& problem, TaskOptions options = {});

  const pddl::DomainAst& domain() const { return domain_; }
  const pddl::ProblemInstance& problem() const { return problem_; }
  const TaskOptions& options() const { return options_; }
  const std::string& agent() const { return agent_; }

  const WorldState& initial_state() const { return initial_; }
  const std::vector<CompiledGoal>& goals() const { return goals_; }
  std::size_t goal_index(const std::string& label) const;
  const std::vector<CompiledOperator>& operators() const { return operators_; }
  const std::vector<pddl::GroundAtom>& dynamic_atoms() const { return atoms_; }
  const std::vector<pddl::GroundFluent>& dynamic_fluents() const { return fluents_; }
  const std::vector<LockInfo>& locks() const { return locks_; }
  const std::vector<KeyInfo>& keys() const { return keys_; }

  CompiledFormula compile(const pddl::Formula& formula) const;
  bool satisfies(const WorldState& s, std::size_t goal) const { return goals_[goal].formula.eval(s); }

  // A cell is passable when in bounds, not a wall and not behind a locked lock.
  bool passable(Cell c, const WorldState& s) const;
  bool terminal(const WorldState& s) const { return (s.atoms & taken_mask_) != 0; }

  std::vector<std::string> inventory(const WorldState& s) const;
  std::vector<std::string> locked_doors(const WorldState& s) const;
  std::map<std::string, Cell> keys_on_map(const WorldState& s) const;
  std::optional<std::string> trophy_taken(const WorldState& s) const;

  // Applicable actions with their results, sorted by label. With a goal,
  // results that hold a surplus key for that goal are dropped when the
  // problem forbids surplus keys.
  std::vector<Successor> successors(const WorldState& s, std::optional<std::size_t> goal = std::nullopt) const;

  // Result of a single action; nullopt when inapplicable.
  std::optional<WorldState> apply(const WorldState& s, const GroundAction& a) const;
  // Same as apply but through an operator index, ignoring location checks on moves.
  WorldState apply_operator(const WorldState& s, std::size_t op) const;

  // Surplus-key rule: held keys can be matched to distinct, still-locked
  // locks that gate the goal.
  bool surplus_free(const WorldState& s, std::size_t goal) const;
  bool key_fits(std::size_t key, std::size_t lock) const { return fits_[key][lock]; }

  // Admissible Manhattan estimate for a goal (0 without a target cell).
  double heuristic(const WorldState& s, std::size_t goal) const;

  std::string describe(const WorldState& s) const;

 private:
  std::optional<std::size_t> atom_slot(const pddl::GroundAtom& a) const;
  std::optional<std::size_t> fluent_slot(const pddl::GroundFluent& f) const;
  CompiledFormula compile(const pddl::Formula& f, const std::map<std::string, std::string>& binding) const;
  CompiledExpr compile(const pddl::NumExpr& e, const std::map<std::string, std::string>& binding) const;

  pddl::DomainAst domain_;
  pddl::ProblemInstance problem_;
  TaskOptions options_;
  std::string agent_;
  std::vector<pddl::GroundAtom> atoms_;
  std::map<pddl::GroundAtom, std::size_t> atom_index_;
  std::vector<pddl::GroundFluent> fluents_;
  std::map<pddl::GroundFluent, std::size_t> fluent_index_;
  std::vector<CompiledOperator> operators_;
  std::vector<CompiledGoal> goals_;
  std::vector<LockInfo> locks_;
  std::vector<KeyInfo> keys_;
  std::vector<std::vector<bool>> fits_;
  std::vector<std::uint8_t> walls_;
  std::map<Cell, std::uint64_t> locks_at_;  // cell -> mask of locked atoms gating it
  std::uint64_t taken_mask_ = 0;
  std::uint64_t held_mask_ = 0;
  WorldState initial_;
};

}  // namespace goalinf::planner
