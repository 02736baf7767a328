// One line per acceptance criterion; exit status 1 when any of them fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"
#include "goalinf/infer/inference.hpp"
#include "goalinf/random.hpp"
#include "goalinf/translate/translate.hpp"
#include "oracles.hpp"

using namespace goalinf;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and limits.
constexpr double kExactTv = 1e-6;
constexpr double kExactSeconds = 30.0;
constexpr double kSpatialSecondsPerBeta = 1.0;
constexpr double kEqualLowGap = 0.05;
constexpr double kPriorTol = 1e-12;
constexpr double kOptimalitySeconds = 60.0;
constexpr double kSumTol = 1e-9;
constexpr double kCorpusSeconds = 60.0;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kPearsonTol = 1e-12;
constexpr int kBootstrap = 1000;
constexpr double kMacroTv = 0.02;

constexpr std::uint64_t kRunSeed = 0;
const double kBetas[] = {0.5, 1.0, 2.0, 4.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::uint64_t map_seed(const std::string& id) { return derive_seed(kRunSeed, id); }

const std::vector<eval::StimulusRecord>& corpus() {
  static const auto c = eval::load_corpus(testing::source_path("data/corpus.json"));
  return c;
}

eval::ModelRunOptions run_options() {
  eval::ModelRunOptions o;
  o.seed = kRunSeed;
  o.scenario_pool = translate::load_few_shot(testing::source_path("data/fewshot/scenario.json"));
  o.operator_pool = translate::load_few_shot(testing::source_path("data/fewshot/operator.json"));
  return o;
}

translate::FixtureTransport& fixtures() {
  static translate::FixtureTransport t(translate::FixtureStore(testing::source_path("fixtures")));
  return t;
}

bool all_optimal(testing::World& w, const std::vector<planner::GroundAction>& steps, std::size_t goal) {
  auto s = w.task->initial_state();
  for (const auto& a : steps) {
    double best = w.planner->cost_to_go(s, goal);
    if (best == planner::kInfinity || w.planner->q_value(s, a, goal) != -best) return false;
    s = *w.task->apply(s, a);
  }
  return true;
}

double direct_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size()), sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

Outcome exactness() {
  worldgen::SamplerOptions small;
  small.width = 7;
  small.height = 7;
  small.spatial_margin = 0;
  auto t0 = Clock::now();
  double worst = 0;
  bool sizes_ok = true;
  std::ostringstream names;
  for (const char* id : {"spatial_01", "spatial_03", "spatial_04"}) {
    auto w = testing::fixture_world(id, map_seed(id), {}, small);
    sizes_ok = sizes_ok && w.bundle.map.width <= 7 && w.bundle.map.height <= 7;
    auto obs = w.observation();
    auto exact = infer::posterior(*w.planner, obs, {});
    auto brute = infer::brute_force_posterior(*w.task, obs, {}, static_cast<int>(obs.actions.size()));
    worst = std::max(worst, infer::total_variation(exact, brute));
    names << id << " " << w.bundle.map.width << "x" << w.bundle.map.height << "; ";
  }
  double secs = seconds_since(t0);
  return {sizes_ok && worst <= kExactTv && secs < kExactSeconds,
          names.str() + "max TV " + fmt("%.3g", worst) + " (limit 1e-6), " + fmt("%.2f", secs) + " s"};
}

Outcome spatial_example() {
  const auto& rec = eval::find_stimulus(corpus(), "spatial_04");
  std::ostringstream d;
  bool ok = true;
  for (double beta : kBetas) {
    auto opts = run_options();
    opts.inference.beta = beta;
    auto t0 = Clock::now();
    auto r = eval::run_stimulus(rec, fixtures(), opts);
    double secs = seconds_since(t0);
    auto top = r.posterior.labels[r.posterior.argmax()];
    ok = ok && top == "bronze" && secs < kSpatialSecondsPerBeta;
    d << "beta " << beta << ": " << top << " " << fmt("%.3f", r.posterior.at("bronze")) << " in " << fmt("%.3f", secs)
      << " s; ";
  }
  return {ok, d.str()};
}

Outcome color_different_example() {
  auto r = eval::run_stimulus(eval::find_stimulus(corpus(), "color_different_01"), fixtures(), run_options());
  double g = r.posterior.at("gold"), s = r.posterior.at("silver"), b = r.posterior.at("bronze");
  bool ok = b > g && b > s && std::abs(g - s) <= kEqualLowGap;
  return {ok, "gold " + fmt("%.3g", g) + ", silver " + fmt("%.3g", s) + ", bronze " + fmt("%.6f", b)};
}

// Gold behind a yellow lock with only a yellow key, under the color-different rule.
testing::World locked_out_world() {
  worldgen::ScenarioIr ir;
  ir.agents = {"Alice"};
  ir.goals = {"gold", "silver", "bronze"};
  ir.goal_count = 3;
  ir.locations = {{"gold", "Room A"}};
  ir.obstacles = {{"Room A", {"yellow"}}};
  ir.keys = {"yellow"};
  ir.len_key = 1;
  ir.max_obstacle = 1;
  ir.keys_per_door = 1;
  ir.variant = worldgen::Variant::kColorDifferent;
  worldgen::MapSample m;
  m.width = 5;
  m.height = 3;
  m.agent_start = {2, 1};
  m.trophy_cells = {{"gold", {4, 1}}, {"silver", {0, 1}}, {"bronze", {0, 0}}};
  m.door_cells = {{"door-room-a", {{3, 1}, "Room A", {"yellow"}, true}}};
  m.key_cells = {{"key1", {{2, 2}, "yellow"}}};
  m.room_membership = {{{4, 1}, "Room A"}};
  m.walls = {{4, 0}, {4, 2}};
  return testing::custom_world(ir, m);
}

Outcome prior_law() {
  double worst = 0;
  int unreachable = 0;
  bool zero_ok = true;
  std::vector<testing::World> worlds;
  for (const char* id : testing::kAllFixtures) worlds.push_back(testing::fixture_world(id, map_seed(id)));
  worlds.push_back(locked_out_world());
  for (auto& w : worlds) {
    auto prior = infer::goal_prior(*w.planner, {});
    std::vector<double> inv;
    for (std::size_t g = 0; g < w.task->goals().size(); ++g) {
      double c = testing::ucs_cost(*w.task, w.task->initial_state(), g);
      inv.push_back(c == planner::kInfinity ? 0.0 : 1.0 / c);
    }
    double z = 0;
    for (double v : inv) z += v;
    for (std::size_t g = 0; g < inv.size(); ++g) {
      worst = std::max(worst, std::abs(prior.mass[g] - inv[g] / z));
      if (inv[g] == 0) {
        ++unreachable;
        zero_ok = zero_ok && prior.mass[g] == 0.0;
      }
    }
  }
  return {worst <= kPriorTol && zero_ok && unreachable > 0,
          "18 fixtures + 1 locked-out map, max deviation " + fmt("%.3g", worst) + " (limit 1e-12), " +
              std::to_string(unreachable) + " unreachable goals at 0"};
}

Outcome planner_optimality() {
  std::mt19937_64 rng(20240601);
  auto t0 = Clock::now();
  int checked = 0, mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const char* id = testing::kAllFixtures[rng() % std::size(testing::kAllFixtures)];
    auto w = testing::fixture_world(id, rng());
    for (std::size_t g = 0; g < w.task->goals().size(); ++g) {
      double a = w.planner->cost_to_go(w.task->initial_state(), g);
      double u = testing::ucs_cost(*w.task, w.task->initial_state(), g);
      mismatches += a != u;
      ++checked;
    }
  }
  double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOptimalitySeconds, "20 maps, " + std::to_string(checked) + " goals, " +
                                                            std::to_string(mismatches) + " mismatches, " +
                                                            fmt("%.2f", secs) + " s"};
}

std::vector<eval::StimulusResult>& corpus_results() {
  static std::vector<eval::StimulusResult> results;
  return results;
}

Outcome normalization() {
  auto t0 = Clock::now();
  corpus_results() = eval::run_model(corpus(), fixtures(), run_options());
  double secs = seconds_since(t0);
  double worst = 0;
  for (const auto& r : corpus_results()) worst = std::max(worst, std::abs(r.posterior.sum() - 1.0));
  bool ok = corpus_results().size() == 18 && worst <= kSumTol && secs < kCorpusSeconds;
  return {ok, std::to_string(corpus_results().size()) + " posteriors, max |sum - 1| " + fmt("%.3g", worst) + ", " +
                  fmt("%.2f", secs) + " s"};
}

Outcome beta_monotonicity() {
  std::ostringstream bad;
  int cases = 0, failures = 0;
  for (const char* id : testing::kSpatialFixtures) {
    auto w = testing::fixture_world(id, map_seed(id));
    auto obs = w.observation();
    for (std::size_t g = 0; g < w.task->goals().size(); ++g) {
      if (!all_optimal(w, obs.actions, g)) continue;
      ++cases;
      double last = -1;
      std::ostringstream masses;
      bool mono = true;
      for (double beta : kBetas) {
        infer::InferenceConfig c;
        c.beta = beta;
        double m = infer::posterior(*w.planner, obs, c).mass[g];
        mono = mono && m >= last - kMonotoneSlack;
        masses << fmt("%.4f", m) << " ";
        last = m;
      }
      if (!mono) {
        ++failures;
        bad << " [" << id << " " << w.task->goals()[g].label << ": " << masses.str() << "]";
      }
    }
  }
  return {failures == 0 && cases > 0, std::to_string(cases) + " (fixture, goal) cases with all-optimal walks, " +
                                          std::to_string(failures) + " not monotone" + bad.str()};
}

Outcome translation_robustness() {
  translate::FixtureStore store(testing::source_path("fixtures"));
  int ok_count = 0;
  std::ostringstream bad;
  for (const auto& rec : corpus()) {
    try {
      auto scenario = store.read(rec.id, "scenario");
      auto ir = worldgen::parse_scenario_ir(scenario);
      auto ctx = translate::context_for(ir, map_seed(rec.id));
      bool ok = translate::validate_translation(scenario, translate::TargetKind::kScenarioIr, ctx).accepted();
      std::optional<std::string> op;
      if (ir.variant != worldgen::Variant::kSpatial) {
        op = store.read(rec.id, "operator");
        ok = ok && translate::validate_translation(*op, translate::TargetKind::kOperatorDefinition, ctx).accepted();
      }
      auto bundle = build_scenario(ir, op, map_seed(rec.id));
      planner::Task task(bundle.domain, bundle.problem);
      (void)observation_of(bundle.ir, task);
      if (ok) ++ok_count;
      else bad << " " << rec.id;
    } catch (const std::exception& e) {
      bad << " " << rec.id << " (" << e.what() << ")";
    }
  }
  return {ok_count == 18, std::to_string(ok_count) + "/18 fixtures validate and compile offline" + bad.str()};
}

Outcome harness_fidelity() {
  if (corpus_results().empty()) corpus_results() = eval::run_model(corpus(), fixtures(), run_options());
  auto human = eval::load_human_csv(testing::source_path("data/synthetic_human.csv"), &corpus()).means();
  auto pairs = eval::pair_values(corpus(), eval::model_judgments(corpus_results()), human);
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    x.push_back(p.model);
    y.push_back(p.human);
  }
  double r = eval::pearson(x, y);
  double gap = std::abs(r - direct_pearson(x, y));
  auto a = eval::correlation_report(pairs, "overall", kBootstrap, 11);
  auto b = eval::correlation_report(pairs, "overall", kBootstrap, 11);
  bool same = a.ci_low == b.ci_low && a.ci_high == b.ci_high && eval::to_json(a) == eval::to_json(b);
  bool ok = pairs.size() == 54 && gap <= kPearsonTol && same && a.bootstrap_samples == kBootstrap;
  return {ok, std::to_string(pairs.size()) + " pairs, R " + fmt("%.6f", r) + ", |R - direct| " + fmt("%.3g", gap) +
                  ", CI [" + fmt("%.4f", a.ci_low) + ", " + fmt("%.4f", a.ci_high) + "] " +
                  (same ? "identical on rerun" : "differs on rerun")};
}

worldgen::SamplerOptions shrunk() {
  worldgen::SamplerOptions o;
  o.width = 5;
  o.height = 5;
  o.agent_start = {2, 2};
  o.min_distance = 1;
  o.max_distance = 2;
  o.max_attempts = 5000;
  return o;
}

constexpr int kLowLevelHorizon = 240;

Outcome macro_crosscheck() {
  std::ostringstream d;
  bool ok = true;
  for (const char* id : {"color_same_01", "color_different_02"}) {
    auto w = testing::fixture_world(id, map_seed(id), {}, shrunk());
    auto obs = w.observation();
    double tv = infer::total_variation(infer::posterior(*w.planner, obs, {}),
                                       infer::brute_force_posterior(*w.task, obs, {}, kLowLevelHorizon));
    ok = ok && tv <= kMacroTv;
    d << id << " TV " << fmt("%.4f", tv) << "; ";
  }
  // Wider look: every key fixture on five shrunken maps.
  int within = 0, total = 0;
  double worst = 0;
  for (const char* id : testing::kAllFixtures) {
    if (std::string(id).rfind("spatial", 0) == 0) continue;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto w = testing::fixture_world(id, derive_seed(seed, id), {}, shrunk());
      auto obs = w.observation();
      double tv = infer::total_variation(infer::posterior(*w.planner, obs, {}),
                                         infer::brute_force_posterior(*w.task, obs, {}, kLowLevelHorizon));
      worst = std::max(worst, tv);
      within += tv <= kMacroTv;
      ++total;
    }
  }
  d << "sweep: " << within << "/" << total << " maps within 0.02, worst TV " << fmt("%.4f", worst);
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"exact posterior matches enumeration", exactness},
      {"spatial walk points at bronze for every beta", spatial_example},
      {"color-different example favors bronze", color_different_example},
      {"prior follows inverse cost", prior_law},
      {"A* equals uniform-cost search", planner_optimality},
      {"every corpus posterior sums to one", normalization},
      {"beta-monotonicity on spatial fixtures", beta_monotonicity},
      {"shipped translations validate offline", translation_robustness},
      {"Pearson and bootstrap are reproducible", harness_fidelity},
      {"macro subgoal model matches low-level rollouts", macro_crosscheck},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
