#include "goalinf/infer/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <queue>
#include <unordered_map>

#include "goalinf/error.hpp"

namespace goalinf::infer {

using planner::GroundAction;
using planner::kInfinity;
using planner::Planner;
using planner::Task;
using planner::WorldState;

namespace {

constexpr double kUnresolvedTolerance = 1e-9;

GoalDistribution normalized(const Task& task, const std::vector<double>& weights) {
  GoalDistribution d;
  double total = 0.0;
  for (double w : weights) total += w;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    d.labels.push_back(task.goals()[i].label);
    d.mass.push_back(weights[i] / total);
  }
  return d;
}

// Prior weights 1/C. When some goal already holds (C = 0) the limit puts all
// weight on the goals that hold.
std::vector<double> prior_weights(const std::vector<double>& costs) {
  std::vector<double> w(costs.size(), 0.0);
  bool any_zero = std::any_of(costs.begin(), costs.end(), [](double c) { return c == 0.0; });
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (any_zero)
      w[i] = costs[i] == 0.0 ? 1.0 : 0.0;
    else if (costs[i] < kInfinity)
      w[i] = 1.0 / costs[i];
  }
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; }))
    throw AllGoalsUnreachable("no goal can be reached from the initial state");
  return w;
}

double floored(double likelihood, double floor, std::size_t t) {
  if (likelihood > 0.0 || floor <= 0.0) return likelihood;
  return std::pow(floor, static_cast<double>(std::max<std::size_t>(t, 1)));
}

struct Macro {
  double cost;
  WorldState result;
};

// Cells reachable from the agent without changing anything else, ordered by
// distance and then by cell.
std::vector<std::pair<int, Cell>> walkable(const Task& task, const WorldState& s) {
  std::map<Cell, int> dist = {{s.agent_cell(), 0}};
  std::queue<Cell> q;
  q.push(s.agent_cell());
  while (!q.empty()) {
    Cell c = q.front();
    q.pop();
    for (Direction d : kAllDirections) {
      Cell n = step(c, d);
      if (dist.count(n) || !task.passable(n, s)) continue;
      dist[n] = dist[c] + 1;
      q.push(n);
    }
  }
  std::vector<std::pair<int, Cell>> order;
  for (const auto& [c, d] : dist) order.emplace_back(d, c);
  std::sort(order.begin(), order.end());
  return order;
}

WorldState at(WorldState s, Cell c) {
  s.fluents[0] = c.x;
  s.fluents[1] = c.y;
  return s;
}

std::vector<Macro> macros(const Task& task, const WorldState& s, std::size_t goal) {
  std::vector<Macro> out;
  const double unit = task.options().cost_scale;
  auto cells = walkable(task, s);
  for (const auto& [d, c] : cells) {
    WorldState p = at(s, c);
    if (task.satisfies(p, goal)) {
      out.push_back({d * unit, p});
      break;
    }
  }
  for (std::size_t op = 0; op < task.operators().size(); ++op) {
    for (const auto& [d, c] : cells) {
      WorldState p = at(s, c);
      if (!task.operators()[op].precondition.eval(p)) continue;
      WorldState r = task.apply_operator(p, op);
      if (r != p) out.push_back({(d + 1) * unit, r});
      break;
    }
  }
  return out;
}

// Forward mass propagation shared by the macro model and the reference
// enumeration. `expand` returns (probability, next state) pairs, or an empty
// list when the agent cannot make progress toward the goal.
template <typename Expand>
double propagate(const Task& task, const WorldState& s0, const planner::CompiledFormula& cond, std::size_t goal,
                 int horizon, Expand expand) {
  std::unordered_map<WorldState, double, planner::WorldStateHash> frontier = {{s0, 1.0}};
  double hit = 0.0;
  for (int step = 0; step <= horizon && !frontier.empty(); ++step) {
    std::unordered_map<WorldState, double, planner::WorldStateHash> next;
    for (const auto& [s, m] : frontier) {
      if (cond.eval(s)) {
        hit += m;
        continue;
      }
      if (task.satisfies(s, goal) || task.terminal(s) || step == horizon) continue;
      for (const auto& [p, r] : expand(s)) next[r] += m * p;
    }
    if (step == horizon) {
      double left = 0.0;
      for (const auto& [s, m] : frontier)
        if (!cond.eval(s) && !task.satisfies(s, goal) && !task.terminal(s)) left += m;
      if (left > kUnresolvedTolerance)
        throw HorizonExceeded("probability " + std::to_string(left) + " unresolved after " + std::to_string(horizon) +
                              " steps");
    }
    frontier = std::move(next);
  }
  return std::min(hit, 1.0);
}

}  // namespace

void validate(const InferenceConfig& config, std::size_t goal_count) {
  if (!(config.beta > 0) || !std::isfinite(config.beta)) throw InvalidConfig("beta must be positive and finite");
  if (!(config.epsilon_floor >= 0 && config.epsilon_floor < 1))
    throw InvalidConfig("epsilon floor must lie in [0, 1)");
  if (goal_count > 0 && !(config.epsilon_floor < 1.0 / static_cast<double>(goal_count)))
    throw InvalidConfig("epsilon floor must be below 1/goal count");
  if (config.subgoal_horizon < 1) throw InvalidConfig("subgoal horizon must be at least 1");
}

double GoalDistribution::at(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return mass[i];
  throw InvalidConfig("unknown goal '" + label + "'");
}

std::size_t GoalDistribution::argmax() const {
  return static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
}

double GoalDistribution::sum() const {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

double total_variation(const GoalDistribution& a, const GoalDistribution& b) {
  if (a.labels != b.labels) throw InvalidConfig("distributions range over different goals");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) tv += std::abs(a.mass[i] - b.mass[i]);
  return tv / 2.0;
}

double PolicyDistribution::probability(const std::string& label) const {
  for (const auto& e : entries)
    if (e.action.label == label) return e.probability;
  return 0.0;
}

ObservationTrace ObservationTrace::of_actions(std::vector<GroundAction> actions) {
  ObservationTrace t;
  t.actions = std::move(actions);
  return t;
}

ObservationTrace ObservationTrace::of_condition(pddl::Formula condition) {
  ObservationTrace t;
  t.kind = Kind::kCondition;
  t.condition = std::move(condition);
  return t;
}

std::vector<double> boltzmann(const std::vector<double>& values, double beta) {
  double top = -kInfinity;
  for (double v : values) top = std::max(top, v);
  if (top == -kInfinity) throw GoalUnreachableFromState("every action leaves the goal unreachable");
  std::vector<double> p(values.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == -kInfinity) continue;
    p[i] = std::exp(beta * (values[i] - top));
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<double> goal_costs(Planner& planner) {
  std::vector<double> costs;
  const auto& task = planner.task();
  for (std::size_t g = 0; g < task.goals().size(); ++g) costs.push_back(planner.cost_to_go(task.initial_state(), g));
  return costs;
}

GoalDistribution goal_prior(Planner& planner, const InferenceConfig& config) {
  validate(config, planner.task().goals().size());
  return normalized(planner.task(), prior_weights(goal_costs(planner)));
}

PolicyDistribution policy(Planner& planner, const WorldState& s, std::size_t goal, const InferenceConfig& config) {
  const auto& task = planner.task();
  PolicyDistribution pi;
  std::vector<double> q;
  for (auto& succ : task.successors(s)) {
    double value = planner.q_value(s, succ.action, goal);
    q.push_back(value);
    pi.entries.push_back({succ.action, value, 0.0});
  }
  auto p = boltzmann(q, config.beta);
  for (std::size_t i = 0; i < p.size(); ++i) pi.entries[i].probability = p[i];
  return pi;
}

double action_sequence_likelihood(Planner& planner, const WorldState& s0, const std::vector<GroundAction>& actions,
                                  std::size_t goal, const InferenceConfig& config) {
  const auto& task = planner.task();
  WorldState s = s0;
  double product = 1.0;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    auto next = task.apply(s, actions[t]);
    if (!next)
      throw InapplicableSequence("step " + std::to_string(t + 1) + " '" + actions[t].label + "' is not applicable in " +
                                 task.describe(s));
    if (product > 0.0) {
      try {
        product *= policy(planner, s, goal, config).probability(actions[t].label);
      } catch (const GoalUnreachableFromState&) {
        product = 0.0;
      }
    }
    s = *next;
  }
  return floored(product, config.epsilon_floor, actions.size());
}

double subgoal_condition_likelihood(Planner& planner, const WorldState& s0, const pddl::Formula& condition,
                                    std::size_t goal, const InferenceConfig& config) {
  const auto& task = planner.task();
  auto cond = task.compile(condition);
  auto expand = [&](const WorldState& s) {
    std::vector<std::pair<double, WorldState>> out;
    auto options = macros(task, s, goal);
    std::vector<double> q;
    for (const auto& m : options) {
      if (task.problem().forbid_surplus_keys && !task.surplus_free(m.result, goal)) {
        q.push_back(-kInfinity);
        continue;
      }
      double rest = planner.cost_to_go(m.result, goal);
      q.push_back(rest == kInfinity ? -kInfinity : -(m.cost + rest));
    }
    if (std::none_of(q.begin(), q.end(), [](double v) { return v > -kInfinity; })) return out;
    auto p = boltzmann(q, config.beta);
    for (std::size_t i = 0; i < p.size(); ++i)
      if (p[i] > 0.0) out.emplace_back(p[i], options[i].result);
    return out;
  };
  double hit = propagate(task, s0, cond, goal, config.subgoal_horizon, expand);
  return floored(hit, config.epsilon_floor, 1);
}

GoalDistribution posterior(Planner& planner, const ObservationTrace& obs, const InferenceConfig& config) {
  const auto& task = planner.task();
  validate(config, task.goals().size());
  auto weights = prior_weights(goal_costs(planner));

  std::vector<std::future<double>> likelihoods;
  for (std::size_t g = 0; g < weights.size(); ++g) {
    likelihoods.push_back(std::async(std::launch::async, [&, g]() -> double {
      if (weights[g] == 0.0) return 0.0;
      if (obs.kind == ObservationTrace::Kind::kActions)
        return action_sequence_likelihood(planner, task.initial_state(), obs.actions, g, config);
      return subgoal_condition_likelihood(planner, task.initial_state(), obs.condition, g, config);
    }));
  }
  std::vector<double> joint(weights.size());
  for (std::size_t g = 0; g < weights.size(); ++g) joint[g] = weights[g] * likelihoods[g].get();
  if (std::all_of(joint.begin(), joint.end(), [](double x) { return x == 0.0; }))
    throw ZeroEvidence("the observation has zero probability under every goal");
  return normalized(task, joint);
}

GoalDistribution brute_force_posterior(const Task& task, const ObservationTrace& obs, const InferenceConfig& config,
                                       int horizon) {
  validate(config, task.goals().size());
  const std::size_t goals = task.goals().size();

  // Explicit state graph.
  std::vector<WorldState> states = {task.initial_state()};
  std::unordered_map<WorldState, std::size_t, planner::WorldStateHash> id = {{task.initial_state(), 0}};
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (auto& succ : task.successors(states[i])) {
      if (id.emplace(succ.state, states.size()).second) {
        states.push_back(succ.state);
        if (states.size() > kMaxEnumeratedStates)
          throw StateSpaceTooLarge("more than " + std::to_string(kMaxEnumeratedStates) + " reachable states");
      }
    }
  }

  // Backward Dijkstra per goal over the goal's own transition relation.
  std::vector<std::vector<double>> dist(goals, std::vector<double>(states.size(), kInfinity));
  for (std::size_t g = 0; g < goals; ++g) {
    std::vector<std::vector<std::pair<std::size_t, double>>> reverse(states.size());
    for (std::size_t i = 0; i < states.size(); ++i)
      for (auto& succ : task.successors(states[i], g)) reverse[id.at(succ.state)].emplace_back(i, succ.action.cost);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (task.satisfies(states[i], g)) {
        dist[g][i] = 0.0;
        pq.push({0.0, i});
      }
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[g][v]) continue;
      for (auto [u, c] : reverse[v])
        if (d + c < dist[g][u]) {
          dist[g][u] = d + c;
          pq.push({d + c, u});
        }
    }
  }

  // Low-level policy from the enumerated costs.
  auto local_policy = [&](const WorldState& s, std::size_t g) {
    std::vector<std::pair<double, planner::Successor>> out;
    auto succs = task.successors(s);
    std::vector<double> q;
    for (const auto& succ : succs) {
      bool allowed = !task.problem().forbid_surplus_keys || task.surplus_free(succ.state, g);
      double rest = dist[g][id.at(succ.state)];
      q.push_back(allowed && rest < kInfinity ? -(succ.action.cost + rest) : -kInfinity);
    }
    if (std::none_of(q.begin(), q.end(), [](double v) { return v > -kInfinity; })) return out;
    auto p = boltzmann(q, config.beta);
    for (std::size_t i = 0; i < succs.size(); ++i) out.emplace_back(p[i], succs[i]);
    return out;
  };

  std::vector<double> costs(goals);
  for (std::size_t g = 0; g < goals; ++g) costs[g] = dist[g][0];
  auto weights = prior_weights(costs);

  std::vector<double> joint(goals, 0.0);
  for (std::size_t g = 0; g < goals; ++g) {
    if (weights[g] == 0.0) continue;
    double likelihood = 0.0;
    if (obs.kind == ObservationTrace::Kind::kActions) {
      const auto& seq = obs.actions;
      if (static_cast<int>(seq.size()) > horizon) throw HorizonExceeded("observation is longer than the horizon");
      // Every rollout of the observed length; keep the mass of those that match.
      std::size_t rollouts = 0;
      std::function<void(const WorldState&, std::size_t, double)> roll = [&](const WorldState& s, std::size_t t,
                                                                             double p) {
        if (++rollouts > 10 * kMaxEnumeratedStates) throw StateSpaceTooLarge("too many rollouts to enumerate");
        if (t == seq.size()) {
          likelihood += p;
          return;
        }
        for (const auto& [pa, succ] : local_policy(s, g)) {
          // Rollouts that leave the observed sequence contribute nothing.
          if (succ.action.label != seq[t].label) continue;
          roll(succ.state, t + 1, p * pa);
        }
      };
      roll(task.initial_state(), 0, 1.0);
      likelihood = floored(likelihood, config.epsilon_floor, seq.size());
    } else {
      auto cond = task.compile(obs.condition);
      auto expand = [&](const WorldState& s) {
        std::vector<std::pair<double, WorldState>> out;
        for (const auto& [p, succ] : local_policy(s, g))
          if (p > 0.0) out.emplace_back(p, succ.state);
        return out;
      };
      likelihood = floored(propagate(task, task.initial_state(), cond, g, horizon, expand), config.epsilon_floor, 1);
    }
    joint[g] = weights[g] * likelihood;
  }
  if (std::all_of(joint.begin(), joint.end(), [](double x) { return x == 0.0; }))
    throw ZeroEvidence("the observation has zero probability under every goal");
  return normalized(task, joint);
}

}  // namespace goalinf::infer
