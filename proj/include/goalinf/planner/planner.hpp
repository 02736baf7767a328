#pragma once

#include <atomic>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "goalinf/planner/task.hpp"

namespace goalinf::planner {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct PlanResult {
  enum class Status { kReached, kUnreachable };

  Status status = Status::kUnreachable;
  double cost = kInfinity;
  std::vector<GroundAction> actions;

  bool reached() const { return status == Status::kReached; }
};

// A* over a Task with a Manhattan heuristic. Exact costs-to-go found along
// optimal plans (and dead ends found by exhausted searches) are memoized per
// goal; the memo is guarded, so one Planner may serve several threads.
class Planner {
 public:
  explicit Planner(const Task& task, bool memoize = true);

  const Task& task() const { return task_; }

  PlanResult optimal_cost(const WorldState& s, std::size_t goal);
  // Optimal cost from s, kInfinity when the goal cannot be reached.
  double cost_to_go(const WorldState& s, std::size_t goal);
  // -(cost(a) + cost_to_go(result)); -inf when the result cannot reach the
  // goal or holds a surplus key for it. Throws InapplicableAction.
  double q_value(const WorldState& s, const GroundAction& a, std::size_t goal);

  std::size_t expansions() const { return expansions_.load(); }

 private:
  struct Entry {
    double cost = kInfinity;
    std::string next;  // label of an optimal first action; empty at the goal
  };
  struct Memo {
    std::mutex mutex;
    std::unordered_map<WorldState, Entry, WorldStateHash> table;
  };

  bool lookup(std::size_t goal, const WorldState& s, Entry& out);
  void store(std::size_t goal, const WorldState& s, Entry e);
  PlanResult search(const WorldState& s0, std::size_t goal);
  void follow_memo(WorldState s, std::size_t goal, std::vector<GroundAction>& actions);

  const Task& task_;
  bool memoize_;
  std::vector<std::unique_ptr<Memo>> memos_;
  std::atomic<std::size_t> expansions_{0};
};

}  // namespace goalinf::planner
