#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "goalinf/error.hpp"
#include "goalinf/infer/inference.hpp"
#include "oracles.hpp"

using namespace goalinf;
using namespace goalinf::infer;
using goalinf::Direction;
using goalinf::planner::GroundAction;
using goalinf::planner::move_action;
using testing::World;

namespace {

// gold locked away in a room, silver and bronze two steps from the agent,
// a key under the agent's feet.
World key_world(worldgen::Variant variant, const std::string& lock, const std::string& key, bool no_extra_keys) {
  worldgen::ScenarioIr ir;
  ir.agents = {"Alice"};
  ir.goals = {"gold", "silver", "bronze"};
  ir.goal_count = 3;
  ir.locations = {{"gold", "Room A"}};
  ir.obstacles = {{"Room A", {lock}}};
  ir.keys = {key};
  ir.len_key = 1;
  ir.max_obstacle = 1;
  ir.keys_per_door = 1;
  ir.no_extra_keys = no_extra_keys;
  ir.variant = variant;
  worldgen::MapSample m;
  m.width = 5;
  m.height = 3;
  m.agent_start = {2, 1};
  m.trophy_cells = {{"gold", {4, 1}}, {"silver", {0, 1}}, {"bronze", {1, 0}}};
  m.door_cells = {{"door-room-a", {{3, 1}, "Room A", {lock}, true}}};
  m.key_cells = {{"key1", {{2, 1}, key}}};
  m.room_membership = {{{4, 1}, "Room A"}};
  m.walls = {{4, 0}, {4, 2}};
  return testing::custom_world(ir, m);
}

std::vector<GroundAction> observed_actions(const World& w) {
  auto obs = w.observation();
  REQUIRE(obs.kind == ObservationTrace::Kind::kActions);
  return obs.actions;
}

// Optimal moves toward `goal` taken from one of its optimal plans.
std::vector<GroundAction> optimal_prefix(World& w, std::size_t goal, std::size_t length) {
  auto r = w.planner->optimal_cost(w.task->initial_state(), goal);
  REQUIRE(r.reached());
  std::vector<GroundAction> out;
  for (const auto& a : r.actions) {
    if (out.size() == length || a.kind != GroundAction::Kind::kMove) break;
    out.push_back(a);
  }
  return out;
}

bool all_optimal(World& w, const std::vector<GroundAction>& steps, std::size_t goal, bool unique = false) {
  auto s = w.task->initial_state();
  for (const auto& a : steps) {
    double best = w.planner->cost_to_go(s, goal);
    if (best == planner::kInfinity || w.planner->q_value(s, a, goal) != -best) return false;
    if (unique)
      for (const auto& succ : w.task->successors(s))
        if (!(succ.action == a) && w.planner->q_value(s, succ.action, goal) == -best) return false;
    s = *w.task->apply(s, a);
  }
  return true;
}

}  // namespace

TEST_CASE("Boltzmann weights") {
  auto p = boltzmann({-1.0, -3.0}, 1.0);
  CHECK(p[0] == doctest::Approx(0.8808).epsilon(1e-4));
  CHECK(p[1] == doctest::Approx(0.1192).epsilon(1e-3));
  auto q = boltzmann({-2.0, -4.0}, 2.0);
  CHECK(q[0] == doctest::Approx(1.0 / (1.0 + std::exp(-4.0))));
  auto r = boltzmann({-1.0, -planner::kInfinity, -1.0}, 3.0);
  CHECK(r[1] == 0.0);
  CHECK(r[0] == doctest::Approx(0.5));
  // Large magnitudes do not overflow.
  auto big = boltzmann({-1e6, -1e6 - 1}, 1.0);
  CHECK(big[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));
  CHECK_THROWS_AS(boltzmann({-planner::kInfinity, -planner::kInfinity}, 1.0), GoalUnreachableFromState);
}

TEST_CASE("config validation") {
  InferenceConfig c;
  CHECK_NOTHROW(validate(c, 3));
  c.beta = 0;
  CHECK_THROWS_AS(validate(c, 3), InvalidConfig);
  c = {};
  c.epsilon_floor = 0.5;
  CHECK_THROWS_AS(validate(c, 3), InvalidConfig);
  c = {};
  c.subgoal_horizon = 0;
  CHECK_THROWS_AS(validate(c, 3), InvalidConfig);
}

TEST_CASE("prior is inverse optimal cost") {
  SUBCASE("two open trophies") {
    auto w = testing::open_grid(6, 1, {0, 0}, {{"gold", {2, 0}}, {"silver", {4, 0}}});
    auto p = goal_prior(*w.planner, {});
    CHECK(p.at("gold") == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(p.at("silver") == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("an unreachable trophy gets nothing") {
    auto w = key_world(worldgen::Variant::kColorDifferent, "yellow", "yellow", false);
    auto p = goal_prior(*w.planner, {});
    CHECK(p.at("gold") == 0.0);
    CHECK(p.at("silver") == 0.5);
    CHECK(p.at("bronze") == 0.5);
  }
  SUBCASE("no reachable trophy") {
    worldgen::ScenarioIr ir;
    ir.agents = {"Alice"};
    ir.goals = {"gold"};
    ir.goal_count = 1;
    ir.variant = worldgen::Variant::kSpatial;
    worldgen::MapSample m;
    m.width = 3;
    m.height = 1;
    m.agent_start = {0, 0};
    m.trophy_cells = {{"gold", {2, 0}}};
    m.walls = {{1, 0}};
    auto w = testing::custom_world(ir, m);
    CHECK_THROWS_AS(goal_prior(*w.planner, {}), AllGoalsUnreachable);
  }
}

TEST_CASE("policy") {
  SUBCASE("near-zero beta is uniform") {
    auto w = testing::open_grid(5, 5, {2, 2}, {{"gold", {4, 4}}});
    InferenceConfig c;
    c.beta = 1e-9;
    auto pol = policy(*w.planner, w.task->initial_state(), 0, c);
    REQUIRE(pol.entries.size() == 4);
    for (const auto& e : pol.entries) CHECK(e.probability == doctest::Approx(0.25).epsilon(1e-6));
  }
  SUBCASE("corridor with high beta walks straight") {
    auto w = testing::open_grid(9, 1, {4, 0}, {{"gold", {8, 0}}});
    InferenceConfig c;
    c.beta = 10;
    auto pol = policy(*w.planner, w.task->initial_state(), 0, c);
    CHECK(pol.probability("(move east)") >= 0.9999);
    double total = 0;
    for (const auto& e : pol.entries) total += e.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("default beta on a gap of two") {
    auto w = testing::open_grid(9, 1, {4, 0}, {{"gold", {8, 0}}});
    auto pol = policy(*w.planner, w.task->initial_state(), 0, {});
    CHECK(pol.probability("(move east)") == doctest::Approx(1.0 / (1.0 + std::exp(-4.0))));
  }
}

TEST_CASE("action-sequence likelihood") {
  auto w = testing::fixture_world("spatial_04");
  auto s0 = w.task->initial_state();
  CHECK(action_sequence_likelihood(*w.planner, s0, {}, 0, {}) == 1.0);
  auto acts = observed_actions(w);
  auto bronze = w.task->goal_index("bronze");
  auto silver = w.task->goal_index("silver");
  auto gold = w.task->goal_index("gold");
  double lb = action_sequence_likelihood(*w.planner, s0, acts, bronze, {});
  double ls = action_sequence_likelihood(*w.planner, s0, acts, silver, {});
  double lg = action_sequence_likelihood(*w.planner, s0, acts, gold, {});
  CHECK(lb > ls);
  CHECK(ls > lg);
  // Walking into the border is not an action.
  auto blocked = testing::open_grid(3, 1, {0, 0}, {{"gold", {2, 0}}});
  CHECK_THROWS_AS(action_sequence_likelihood(*blocked.planner, blocked.task->initial_state(),
                                             {move_action(Direction::kWest)}, 0, {}),
                  InapplicableSequence);
}

TEST_CASE("subgoal-condition likelihood edge cases") {
  auto w = testing::fixture_world("color_same_01");
  auto s0 = w.task->initial_state();
  for (std::size_t g = 0; g < w.task->goals().size(); ++g) {
    if (!w.planner->optimal_cost(s0, g).reached()) continue;
    CHECK(subgoal_condition_likelihood(*w.planner, s0, pddl::Formula::conjunction(), g, {}) == 1.0);
    auto never = pddl::Formula::negation(pddl::Formula::conjunction());
    InferenceConfig c;
    CHECK(subgoal_condition_likelihood(*w.planner, s0, never, g, c) <= c.epsilon_floor);
    c.epsilon_floor = 0;
    CHECK(subgoal_condition_likelihood(*w.planner, s0, never, g, c) == 0.0);
  }
}

TEST_CASE("posterior basics") {
  SUBCASE("empty observation is the prior, exactly") {
    for (const char* id : testing::kAllFixtures) {
      auto w = testing::fixture_world(id);
      auto prior = goal_prior(*w.planner, {});
      auto post = posterior(*w.planner, ObservationTrace::none(), {});
      CHECK_MESSAGE(post.mass == prior.mass, id);
      auto empty_walk = posterior(*w.planner, ObservationTrace::of_actions({}), {});
      CHECK_MESSAGE(empty_walk.mass == prior.mass, id);
    }
  }
  SUBCASE("one hypothesis takes everything") {
    auto w = testing::open_grid(4, 4, {0, 0}, {{"gold", {3, 3}}});
    auto obs = ObservationTrace::of_actions({move_action(Direction::kSouth), move_action(Direction::kNorth)});
    CHECK(posterior(*w.planner, obs, {}).at("gold") == 1.0);
    CHECK(brute_force_posterior(*w.task, obs, {}, 8).at("gold") == 1.0);
  }
  SUBCASE("evidence every goal rules out falls back to the prior") {
    // The key helps nobody, and surplus keys are forbidden.
    auto w = key_world(worldgen::Variant::kColorDifferent, "yellow", "yellow", true);
    auto succs = w.task->successors(w.task->initial_state());
    GroundAction pickup;
    for (const auto& s : succs)
      if (s.action.kind == GroundAction::Kind::kPickup) pickup = s.action;
    REQUIRE(pickup.kind == GroundAction::Kind::kPickup);
    auto obs = ObservationTrace::of_actions({pickup});
    auto post = posterior(*w.planner, obs, {});
    auto prior = goal_prior(*w.planner, {});
    for (std::size_t i = 0; i < prior.mass.size(); ++i) CHECK(post.mass[i] == doctest::Approx(prior.mass[i]));
    auto brute = brute_force_posterior(*w.task, obs, {}, 4);
    CHECK(total_variation(post, brute) <= 1e-9);
    InferenceConfig strict;
    strict.epsilon_floor = 0;
    CHECK_THROWS_AS(posterior(*w.planner, obs, strict), ZeroEvidence);
  }
  SUBCASE("the spatial walk points at bronze") {
    auto w = testing::fixture_world("spatial_04");
    auto post = posterior(*w.planner, w.observation(), {});
    CHECK(post.labels[post.argmax()] == "bronze");
    CHECK(post.sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("total variation") {
  GoalDistribution a{{"gold", "silver"}, {0.25, 0.75}};
  GoalDistribution b{{"gold", "silver"}, {0.5, 0.5}};
  CHECK(total_variation(a, b) == doctest::Approx(0.25));
  CHECK(total_variation(a, a) == 0.0);
  GoalDistribution swapped{{"silver", "gold"}, {0.5, 0.5}};
  CHECK_THROWS_AS(total_variation(a, swapped), InvalidConfig);
}

TEST_CASE("property: likelihood factorizes over segments") {
  std::mt19937_64 rng(5);
  for (const char* id : testing::kSpatialFixtures) {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      auto w = testing::fixture_world(id, seed);
      // A random walk of legal moves.
      std::vector<GroundAction> walk;
      auto s = w.task->initial_state();
      for (int i = 0; i < 6; ++i) {
        std::vector<planner::Successor> moves;
        for (const auto& succ : w.task->successors(s))
          if (succ.action.kind == GroundAction::Kind::kMove) moves.push_back(succ);
        if (moves.empty()) break;
        const auto& pick = moves[rng() % moves.size()];
        walk.push_back(pick.action);
        s = pick.state;
      }
      std::size_t cut = rng() % (walk.size() + 1);
      std::vector<GroundAction> head(walk.begin(), walk.begin() + static_cast<long>(cut));
      std::vector<GroundAction> tail(walk.begin() + static_cast<long>(cut), walk.end());
      auto mid = w.task->initial_state();
      for (const auto& a : head) mid = *w.task->apply(mid, a);
      InferenceConfig c;
      c.epsilon_floor = 0;
      for (std::size_t g = 0; g < w.task->goals().size(); ++g) {
        double whole = action_sequence_likelihood(*w.planner, w.task->initial_state(), walk, g, c);
        double parts = action_sequence_likelihood(*w.planner, w.task->initial_state(), head, g, c) *
                       action_sequence_likelihood(*w.planner, mid, tail, g, c);
        CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("property: posterior is prior times likelihood") {
  for (const char* id : testing::kSpatialFixtures) {
    auto w = testing::fixture_world(id, 21);
    auto acts = observed_actions(w);
    auto prior = goal_prior(*w.planner, {});
    std::vector<double> joint;
    for (std::size_t g = 0; g < prior.mass.size(); ++g)
      joint.push_back(prior.mass[g] *
                      action_sequence_likelihood(*w.planner, w.task->initial_state(), acts, g, {}));
    double z = std::accumulate(joint.begin(), joint.end(), 0.0);
    auto post = posterior(*w.planner, w.observation(), {});
    for (std::size_t g = 0; g < joint.size(); ++g) CHECK(post.mass[g] == doctest::Approx(joint[g] / z).epsilon(1e-12));
  }
}

TEST_CASE("property: scaling costs and dividing beta leaves beliefs alone") {
  for (const char* id : {"spatial_02", "spatial_04", "generic_03", "color_same_02", "color_different_01"}) {
    for (double k : {0.5, 3.0}) {
      auto unit = testing::fixture_world(id, 4);
      auto scaled = testing::fixture_world(id, 4, planner::TaskOptions{k});
      InferenceConfig c;
      InferenceConfig cs;
      cs.beta = c.beta / k;
      auto p1 = goal_prior(*unit.planner, c);
      auto p2 = goal_prior(*scaled.planner, cs);
      for (std::size_t g = 0; g < p1.mass.size(); ++g) CHECK(p1.mass[g] == doctest::Approx(p2.mass[g]).epsilon(1e-12));
      auto q1 = posterior(*unit.planner, unit.observation(), c);
      auto q2 = posterior(*scaled.planner, scaled.observation(), cs);
      CHECK_MESSAGE(total_variation(q1, q2) <= 1e-9, id);
    }
  }
}

TEST_CASE("fixture walks raise the mass of the goal they lead to without ties as beta grows") {
  int checked = 0;
  for (const char* id : testing::kSpatialFixtures) {
    for (std::uint64_t seed : {0ull, 1ull, 2ull, 3ull, 4ull}) {
      auto w = testing::fixture_world(id, seed);
      auto obs = w.observation();
      for (std::size_t g = 0; g < w.task->goals().size(); ++g) {
        if (!all_optimal(w, obs.actions, g, true)) continue;
        double last = -1;
        for (double beta : {0.5, 1.0, 2.0, 4.0}) {
          InferenceConfig c;
          c.beta = beta;
          double m = posterior(*w.planner, obs, c).mass[g];
          CHECK_MESSAGE(m >= last - 1e-12, std::string(id) << " seed " << seed << " beta " << beta);
          last = m;
        }
        ++checked;
      }
    }
  }
  CHECK(checked >= 20);
}

TEST_CASE("a fixture walk tied between moves loses mass for that goal as beta grows") {
  // One step south: the only best move toward silver, one of two toward bronze.
  auto w = testing::fixture_world("spatial_02");
  auto obs = w.observation();
  auto bronze = w.task->goal_index("bronze");
  REQUIRE(all_optimal(w, obs.actions, bronze));
  REQUIRE_FALSE(all_optimal(w, obs.actions, bronze, true));
  double last = 2;
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    InferenceConfig c;
    c.beta = beta;
    double m = posterior(*w.planner, obs, c).mass[bronze];
    CHECK(m < last);
    last = m;
  }
}

TEST_CASE("an optimal walk that crosses another trophy can lose mass as beta grows") {
  // Bronze is reached by going south over silver and then west. At low beta
  // the westward step is cheap to explain as noise around silver.
  auto w = testing::open_grid(13, 10, {6, 3}, {{"gold", {11, 3}}, {"silver", {6, 6}}, {"bronze", {1, 6}}});
  auto s = move_action(Direction::kSouth);
  auto obs = ObservationTrace::of_actions({s, s, s, move_action(Direction::kWest)});
  auto bronze = w.task->goal_index("bronze");
  REQUIRE(all_optimal(w, obs.actions, bronze));
  std::vector<double> mass;
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    InferenceConfig c;
    c.beta = beta;
    auto exact = posterior(*w.planner, obs, c);
    CHECK(total_variation(exact, brute_force_posterior(*w.task, obs, c, 6)) <= 1e-9);
    mass.push_back(exact.mass[bronze]);
  }
  CHECK(mass[1] < mass[0]);
  CHECK(mass[3] > mass[2]);
  CHECK(mass[2] > mass[1]);
}

TEST_CASE("a step two goals share favors the goal with fewer ties as beta grows") {
  // Both trophies lie south-east; the first step south is optimal for both,
  // but only gold has a single best move.
  auto w = testing::open_grid(4, 4, {0, 0}, {{"gold", {0, 3}}, {"silver", {3, 3}}});
  auto obs = ObservationTrace::of_actions({move_action(Direction::kSouth)});
  auto silver = w.task->goal_index("silver");
  REQUIRE(all_optimal(w, obs.actions, silver));
  double last = 2;
  for (double beta : {0.5, 1.0, 2.0, 4.0}) {
    InferenceConfig c;
    c.beta = beta;
    double m = posterior(*w.planner, obs, c).mass[silver];
    CHECK(m < last);
    last = m;
  }
}

TEST_CASE("exact inference agrees with enumeration on a small open grid") {
  auto w = testing::open_grid(4, 4, {0, 0}, {{"gold", {3, 0}}, {"silver", {0, 3}}, {"bronze", {3, 3}}});
  auto obs = ObservationTrace::of_actions({move_action(Direction::kEast), move_action(Direction::kSouth)});
  auto exact = posterior(*w.planner, obs, {});
  auto brute = brute_force_posterior(*w.task, obs, {}, 8);
  CHECK(total_variation(exact, brute) <= 1e-9);
  CHECK(exact.at("bronze") > exact.at("silver"));
}
