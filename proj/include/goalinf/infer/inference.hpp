#pragma once

#include <string>
#include <vector>

#include "goalinf/pddl/ast.hpp"
#include "goalinf/planner/planner.hpp"
#include "goalinf/planner/task.hpp"

namespace goalinf::infer {

struct InferenceConfig {
  double beta = 2.0;             // inverse temperature of the Boltzmann policy
  double epsilon_floor = 1e-6;   // likelihood used for observations no goal explains
  int subgoal_horizon = 16;      // macro steps explored for subgoal conditions
};

// Throws InvalidConfig unless beta > 0, 0 <= floor < 1/goal_count and horizon >= 1.
void validate(const InferenceConfig& config, std::size_t goal_count);

struct GoalDistribution {
  std::vector<std::string> labels;
  std::vector<double> mass;

  double at(const std::string& label) const;
  std::size_t argmax() const;
  double sum() const;
};

double total_variation(const GoalDistribution& a, const GoalDistribution& b);

struct PolicyEntry {
  planner::GroundAction action;
  double q = 0.0;
  double probability = 0.0;
};

struct PolicyDistribution {
  std::vector<PolicyEntry> entries;  // every applicable action, in label order

  double probability(const std::string& label) const;
};

struct ObservationTrace {
  enum class Kind { kActions, kCondition };

  Kind kind = Kind::kActions;
  std::vector<planner::GroundAction> actions;
  pddl::Formula condition;  // holds at some state the agent passes through

  static ObservationTrace none() { return {}; }
  static ObservationTrace of_actions(std::vector<planner::GroundAction> actions);
  static ObservationTrace of_condition(pddl::Formula condition);
};

// Softmax of beta * values with max-subtraction; -inf entries get 0.
// Throws GoalUnreachableFromState when every value is -inf.
std::vector<double> boltzmann(const std::vector<double>& values, double beta);

// Optimal cost C(g, s0) of every goal; kInfinity for unreachable goals.
std::vector<double> goal_costs(planner::Planner& planner);

// P(g | s0) proportional to 1/C(g); unreachable goals get 0.
// Throws AllGoalsUnreachable.
GoalDistribution goal_prior(planner::Planner& planner, const InferenceConfig& config);

// Boltzmann policy over all applicable actions from s. Actions that leave the
// goal unreachable (or break the surplus-key rule) get probability 0.
PolicyDistribution policy(planner::Planner& planner, const planner::WorldState& s, std::size_t goal,
                          const InferenceConfig& config);

// Product of policy probabilities along the replayed sequence; floor^t when
// that product is 0 and the floor is positive. Throws InapplicableSequence.
double action_sequence_likelihood(planner::Planner& planner, const planner::WorldState& s0,
                                  const std::vector<planner::GroundAction>& actions, std::size_t goal,
                                  const InferenceConfig& config);

// Probability that a Boltzmann agent heading for `goal` passes through a state
// satisfying `condition`, over the graph of macro actions (walk to the nearest
// spot where an operator applies, then apply it; or walk to the goal).
// Throws HorizonExceeded when unresolved mass remains after the horizon.
double subgoal_condition_likelihood(planner::Planner& planner, const planner::WorldState& s0,
                                    const pddl::Formula& condition, std::size_t goal, const InferenceConfig& config);

// Exact posterior from the initial state; goals are evaluated concurrently.
// Throws ZeroEvidence when every joint mass is 0 and the floor is 0.
GoalDistribution posterior(planner::Planner& planner, const ObservationTrace& obs, const InferenceConfig& config);

// Reference computation by explicit enumeration: Dijkstra costs on the full
// state graph, rollouts over every action sequence for low-level
// observations and step-by-step mass propagation for conditions (up to
// `horizon` primitive steps). Throws StateSpaceTooLarge beyond 1e5 states.
GoalDistribution brute_force_posterior(const planner::Task& task, const ObservationTrace& obs,
                                       const InferenceConfig& config, int horizon);

inline constexpr std::size_t kMaxEnumeratedStates = 100000;

}  // namespace goalinf::infer
