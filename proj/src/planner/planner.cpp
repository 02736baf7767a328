#include "goalinf/planner/planner.hpp"

#include <algorithm>
#include <queue>

#include "goalinf/error.hpp"

namespace goalinf::planner {
namespace {

struct OpenEntry {
  double f;
  double g;
  std::size_t seq;
  std::size_t node;
  bool via_memo;  // f is an exact total through a memoized state

  // Lower f first, then lower g, then generation order; successors are
  // generated in lexicographic action order.
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    if (g != o.g) return g > o.g;
    return seq > o.seq;
  }
};

struct Node {
  WorldState state;
  double g;
  std::size_t parent;
  GroundAction action;
};

constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

}  // namespace

Planner::Planner(const Task& task, bool memoize) : task_(task), memoize_(memoize) {
  for (std::size_t i = 0; i < task.goals().size(); ++i) memos_.push_back(std::make_unique<Memo>());
}

bool Planner::lookup(std::size_t goal, const WorldState& s, Entry& out) {
  if (!memoize_) return false;
  auto& memo = *memos_[goal];
  std::lock_guard lock(memo.mutex);
  auto it = memo.table.find(s);
  if (it == memo.table.end()) return false;
  out = it->second;
  return true;
}

void Planner::store(std::size_t goal, const WorldState& s, Entry e) {
  if (!memoize_) return;
  auto& memo = *memos_[goal];
  std::lock_guard lock(memo.mutex);
  memo.table.emplace(s, std::move(e));
}

void Planner::follow_memo(WorldState s, std::size_t goal, std::vector<GroundAction>& actions) {
  Entry e;
  while (lookup(goal, s, e) && !e.next.empty()) {
    bool moved = false;
    for (auto& succ : task_.successors(s, goal)) {
      if (succ.action.label != e.next) continue;
      actions.push_back(succ.action);
      s = succ.state;
      moved = true;
      break;
    }
    if (!moved) throw std::logic_error("memoized action '" + e.next + "' is not applicable");
  }
}

PlanResult Planner::search(const WorldState& s0, std::size_t goal) {
  const double tol = 1e-9 * task_.options().cost_scale;
  std::vector<Node> nodes;
  std::unordered_map<WorldState, std::size_t, WorldStateHash> index;
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  std::size_t seq = 0;

  nodes.push_back({s0, 0.0, kNoParent, {}});
  index.emplace(s0, 0);
  open.push({task_.heuristic(s0, goal), 0.0, seq++, 0, false});

  std::size_t found = kNoParent;
  double total = kInfinity;
  while (!open.empty()) {
    OpenEntry e = open.top();
    open.pop();
    const Node& n = nodes[e.node];
    if (e.via_memo) {
      found = e.node;
      total = e.f;
      break;
    }
    if (e.g > n.g + tol) continue;
    if (task_.satisfies(n.state, goal)) {
      found = e.node;
      total = n.g;
      break;
    }
    Entry known;
    if (e.node != 0 && lookup(goal, n.state, known)) {
      if (known.cost < kInfinity) open.push({n.g + known.cost, n.g + known.cost, seq++, e.node, true});
      continue;
    }
    ++expansions_;
    const WorldState state = n.state;
    const double g = n.g;
    for (auto& succ : task_.successors(state, goal)) {
      const double g2 = g + succ.action.cost;
      auto [it, inserted] = index.emplace(succ.state, nodes.size());
      if (inserted) {
        nodes.push_back({succ.state, g2, e.node, succ.action});
      } else {
        Node& m = nodes[it->second];
        if (g2 >= m.g - tol) continue;
        m.g = g2;  // reopened if already expanded
        m.parent = e.node;
        m.action = succ.action;
      }
      open.push({g2 + task_.heuristic(succ.state, goal), g2, seq++, it->second, false});
    }
  }

  PlanResult result;
  if (found == kNoParent) {
    for (const auto& n : nodes) store(goal, n.state, {kInfinity, ""});
    return result;
  }

  std::vector<std::size_t> chain;
  for (std::size_t i = found; i != kNoParent; i = nodes[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  result.status = PlanResult::Status::kReached;
  result.cost = total;
  for (std::size_t k = 0; k < chain.size(); ++k) {
    const Node& n = nodes[chain[k]];
    std::string next = k + 1 < chain.size() ? nodes[chain[k + 1]].action.label : std::string{};
    // Suffixes of optimal plans are optimal, so these costs-to-go are exact.
    if (k + 1 < chain.size() || task_.satisfies(n.state, goal)) store(goal, n.state, {total - n.g, next});
    if (k > 0) result.actions.push_back(n.action);
  }
  if (!task_.satisfies(nodes[found].state, goal)) {
    if (!memoize_) throw std::logic_error("memo continuation without a memo");
    follow_memo(nodes[found].state, goal, result.actions);
  }
  return result;
}

PlanResult Planner::optimal_cost(const WorldState& s, std::size_t goal) {
  if (goal >= task_.goals().size()) throw InvalidConfig("goal index out of range");
  Entry known;
  if (lookup(goal, s, known)) {
    PlanResult r;
    if (known.cost == kInfinity) return r;
    r.status = PlanResult::Status::kReached;
    r.cost = known.cost;
    follow_memo(s, goal, r.actions);
    return r;
  }
  return search(s, goal);
}

double Planner::cost_to_go(const WorldState& s, std::size_t goal) {
  if (task_.satisfies(s, goal)) return 0.0;
  Entry known;
  if (lookup(goal, s, known)) return known.cost;
  return search(s, goal).cost;
}

double Planner::q_value(const WorldState& s, const GroundAction& a, std::size_t goal) {
  auto next = task_.apply(s, a);
  if (!next) throw InapplicableAction("'" + a.label + "' is not applicable in " + task_.describe(s));
  if (task_.problem().forbid_surplus_keys && !task_.surplus_free(*next, goal)) return -kInfinity;
  const double rest = cost_to_go(*next, goal);
  if (rest == kInfinity) return -kInfinity;
  return -(task_.options().cost_scale + rest);
}

}  // namespace goalinf::planner
