#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"
#include "goalinf/io.hpp"
#include "goalinf/pipeline.hpp"
#include "goalinf/planner/planner.hpp"
#include "goalinf/random.hpp"
#include "goalinf/translate/translate.hpp"
#include "goalinf/worldgen/map.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace goalinf;

namespace {

const std::string kSourceDir = GOALINF_SOURCE_DIR;

struct Options {
  std::uint64_t seed = 0;
  std::string fixtures = kSourceDir + "/fixtures";
  std::string corpus = kSourceDir + "/data/corpus.json";
  std::string few_shot_dir = kSourceDir + "/data/fewshot";
  std::string out = "runs";
  bool live = false;
  std::string llm_model;
  std::string api_base = "https://api.openai.com";
  double temperature = 1.2;
  int max_rejections = 10;
  double beta = 2.0;
  double epsilon_floor = 1e-6;
  int subgoal_horizon = 16;
  std::vector<std::string> stimuli;
  bool all = false;
  std::string scenario_path;
  std::string operator_path;
  std::string human = kSourceDir + "/data/synthetic_human.csv";
  std::string judgments;
  int bootstrap_samples = 1000;
  double exclude_below = -1;
  int samples = 30;
  int max_attempts = 0;
  std::string prompt_template = kSourceDir + "/data/baseline_prompt.txt";
  std::string goal;
};

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Records what a run read and wrote; rewritten atomically as the run goes.
class Manifest {
 public:
  Manifest(std::string command, const Options& o) : path_(o.out + "/manifest.json") {
    doc_["command"] = std::move(command);
    doc_["status"] = "running";
    doc_["seed"] = o.seed;
    doc_["config"] = {
        {"fixtures", o.fixtures},
        {"corpus", o.corpus},
        {"few_shot_dir", o.few_shot_dir},
        {"live", o.live},
        {"llm_model", o.llm_model},
        {"api_base", o.api_base},
        {"temperature", o.temperature},
        {"max_rejections", o.max_rejections},
        {"beta", o.beta},
        {"epsilon_floor", o.epsilon_floor},
        {"subgoal_horizon", o.subgoal_horizon},
        {"stimuli", o.stimuli},
        {"all", o.all},
        {"scenario", o.scenario_path},
        {"operator", o.operator_path},
        {"human", o.human},
        {"judgments", o.judgments},
        {"bootstrap_samples", o.bootstrap_samples},
        {"exclude_below", o.exclude_below},
        {"samples", o.samples},
        {"max_attempts", o.max_attempts},
        {"prompt_template", o.prompt_template},
        {"goal", o.goal},
    };
    doc_["started_at"] = now_utc();
    doc_["inputs"] = ordered_json::object();
    doc_["outputs"] = ordered_json::array();
    flush();
  }

  void input(const std::string& path) {
    std::lock_guard lock(mutex_);
    if (fs::exists(path)) doc_["inputs"][path] = io::sha256_hex(io::read_file(path));
  }

  void output(const std::string& path, const std::string& contents) {
    io::write_file_atomic(path, contents);
    std::lock_guard lock(mutex_);
    doc_["outputs"].push_back(path);
  }

  void finish(const std::string& status, const std::string& error = {}) {
    std::lock_guard lock(mutex_);
    doc_["status"] = status;
    if (!error.empty()) doc_["error"] = error;
    doc_["finished_at"] = now_utc();
    io::write_file_atomic(path_, doc_.dump(2) + "\n");
  }

 private:
  void flush() { io::write_file_atomic(path_, doc_.dump(2) + "\n"); }

  std::string path_;
  ordered_json doc_;
  std::mutex mutex_;
};

// Owns the transport chosen by the flags and logs every exchange.
class Session {
 public:
  Session(const Options& o, Manifest& manifest) : options_(o), manifest_(manifest) {
    if (!o.live && fs::is_directory(o.fixtures)) {
      inner_ = std::make_unique<translate::FixtureTransport>(translate::FixtureStore(o.fixtures));
    } else {
      translate::HttpOptions http;
      http.api_key = translate::api_key_from_env();
      http.model = o.llm_model;
      http.base_url = o.api_base;
      inner_ = std::make_unique<translate::HttpTransport>(http);
    }
    recording_ = std::make_unique<translate::RecordingTransport>(
        *inner_, [this](const translate::Completion& c, const std::string& response) { log(c, response); });
  }

  translate::Transport& transport() { return *recording_; }

  void note_fixture_inputs(const std::string& id) {
    if (options_.live) return;
    for (const char* f : {"scenario.json", "operator.pddl", "baseline.txt"})
      manifest_.input(options_.fixtures + "/" + id + "/" + f);
  }

 private:
  void log(const translate::Completion& c, const std::string& response) {
    std::string stem = options_.out + "/transcripts/" + c.key + "." + c.purpose + "." + std::to_string(c.sample_index);
    manifest_.output(stem + ".prompt.txt", c.prompt);
    manifest_.output(stem + ".response.txt", response);
  }

  const Options& options_;
  Manifest& manifest_;
  std::unique_ptr<translate::Transport> inner_;
  std::unique_ptr<translate::Transport> recording_;
};

infer::InferenceConfig inference_config(const Options& o) {
  infer::InferenceConfig c;
  c.beta = o.beta;
  c.epsilon_floor = o.epsilon_floor;
  c.subgoal_horizon = o.subgoal_horizon;
  return c;
}

eval::ModelRunOptions model_options(const Options& o, Manifest& manifest) {
  eval::ModelRunOptions m;
  m.inference = inference_config(o);
  m.seed = o.seed;
  m.temperature = o.temperature;
  m.max_rejections = o.max_rejections;
  const std::string scen = o.few_shot_dir + "/scenario.json";
  const std::string ops = o.few_shot_dir + "/operator.json";
  manifest.input(scen);
  manifest.input(ops);
  m.scenario_pool = translate::load_few_shot(scen);
  m.operator_pool = translate::load_few_shot(ops);
  return m;
}

std::vector<eval::StimulusRecord> selected(const std::vector<eval::StimulusRecord>& corpus, const Options& o) {
  if (o.stimuli.empty()) return corpus;
  std::vector<eval::StimulusRecord> out;
  for (const auto& id : o.stimuli) out.push_back(eval::find_stimulus(corpus, id));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string judgments_csv(const eval::JudgmentMap& values, const std::vector<eval::StimulusRecord>& corpus) {
  std::string out = "stimulus_id,trophy,value\n";
  for (const auto& r : corpus)
    for (const auto& g : r.goals) {
      auto it = values.find({r.id, g});
      if (it != values.end()) out += r.id + "," + g + "," + fmt(it->second) + "\n";
    }
  return out;
}

eval::JudgmentMap read_judgments_csv(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  eval::JudgmentMap out;
  int n = 0;
  while (std::getline(in, line)) {
    if (++n == 1 || line.empty()) continue;
    auto a = line.find(','), b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw SchemaError(path + ":" + std::to_string(n) + ": expected 3 fields");
    try {
      out[{line.substr(0, a), line.substr(a + 1, b - a - 1)}] = std::stod(line.substr(b + 1));
    } catch (const std::exception&) {
      throw SchemaError(path + ":" + std::to_string(n) + ": value is not a number");
    }
  }
  return out;
}

ordered_json posterior_json(const eval::StimulusResult& r, const Options& o) {
  ordered_json j;
  j["stimulus_id"] = r.id;
  j["variant"] = worldgen::to_string(r.variant);
  j["seed"] = o.seed;
  j["beta"] = o.beta;
  j["epsilon_floor"] = o.epsilon_floor;
  j["scenario_attempts"] = r.scenario_attempts;
  j["operator_attempts"] = r.operator_attempts;
  auto& goals = j["goals"] = ordered_json::array();
  for (std::size_t i = 0; i < r.posterior.labels.size(); ++i)
    goals.push_back({{"trophy", r.posterior.labels[i]}, {"prior", r.prior.mass[i]}, {"posterior", r.posterior.mass[i]}});
  return j;
}

std::string posterior_csv(const eval::StimulusResult& r) {
  std::string out = "trophy,prior,posterior\n";
  char buf[96];
  for (std::size_t i = 0; i < r.posterior.labels.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g\n", r.prior.mass[i], r.posterior.mass[i]);
    out += r.posterior.labels[i] + buf;
  }
  return out;
}

void write_result(const eval::StimulusResult& r, const Options& o, Manifest& manifest) {
  manifest.output(o.out + "/posterior_" + r.id + ".json", posterior_json(r, o).dump(2) + "\n");
  manifest.output(o.out + "/posterior_" + r.id + ".csv", posterior_csv(r));
}

void print_result(const eval::StimulusResult& r) {
  std::printf("%s (%s)\n", r.id.c_str(), worldgen::to_string(r.variant).c_str());
  for (std::size_t i = 0; i < r.posterior.labels.size(); ++i)
    std::printf("  %-8s prior %.6f  posterior %.6f\n", r.posterior.labels[i].c_str(), r.prior.mass[i],
                r.posterior.mass[i]);
}

// Scenario (and operator, for key variants) of one stimulus, through translation.
struct Resolved {
  worldgen::ScenarioIr ir;
  std::optional<std::string> operator_text;
  std::uint64_t map_seed = 0;
};

Resolved resolve(const eval::StimulusRecord& rec, Session& session, const eval::ModelRunOptions& m) {
  translate::TranslationRequest req;
  req.stimulus_id = rec.id;
  req.stimulus_text = rec.text;
  req.temperature = m.temperature;
  req.max_rejections = m.max_rejections;
  req.few_shot = translate::sample_few_shot(m.scenario_pool, rec.variant, derive_seed(m.seed, rec.id + "/scenario-shots"));
  Resolved out;
  out.map_seed = derive_seed(m.seed, rec.id);
  translate::DomainContext ctx;
  ctx.variant = rec.variant;
  ctx.seed = out.map_seed;
  out.ir = worldgen::parse_scenario_ir(translate::translate_with_rejection(req, session.transport(), ctx).code);
  if (rec.variant != worldgen::Variant::kSpatial) {
    req.target = translate::TargetKind::kOperatorDefinition;
    req.few_shot = translate::sample_few_shot(m.operator_pool, rec.variant,
                                              derive_seed(m.seed, rec.id + "/operator-shots"),
                                              translate::Draw::kOtherVariants);
    out.operator_text =
        translate::translate_with_rejection(req, session.transport(), translate::context_for(out.ir, out.map_seed)).code;
  }
  return out;
}

int cmd_infer(const Options& o, Manifest& manifest) {
  if (!o.scenario_path.empty()) {
    manifest.input(o.scenario_path);
    auto ir = worldgen::parse_scenario_ir(io::read_file(o.scenario_path));
    std::optional<std::string> op;
    if (!o.operator_path.empty()) {
      manifest.input(o.operator_path);
      op = io::read_file(o.operator_path);
    }
    auto bundle = build_scenario(ir, op, o.seed);
    planner::Task task(bundle.domain, bundle.problem);
    planner::Planner planner(task);
    eval::StimulusResult r;
    r.id = fs::path(o.scenario_path).stem().string();
    r.variant = ir.variant;
    r.prior = infer::goal_prior(planner, inference_config(o));
    r.posterior = infer::posterior(planner, observation_of(ir, task), inference_config(o));
    print_result(r);
    write_result(r, o, manifest);
    return 0;
  }
  if (o.stimuli.empty() && !o.all) throw InvalidRequest("infer needs --stimulus, --all or --scenario");
  manifest.input(o.corpus);
  auto corpus = selected(eval::load_corpus(o.corpus), o);
  Session session(o, manifest);
  for (const auto& r : corpus) session.note_fixture_inputs(r.id);
  auto results = eval::run_model(corpus, session.transport(), model_options(o, manifest));
  for (const auto& r : results) {
    print_result(r);
    write_result(r, o, manifest);
  }
  manifest.output(o.out + "/model_judgments.csv", judgments_csv(eval::model_judgments(results), corpus));
  return 0;
}

int cmd_eval(const Options& o, Manifest& manifest) {
  manifest.input(o.corpus);
  manifest.input(o.human);
  auto corpus = eval::load_corpus(o.corpus);
  auto human = eval::load_human_csv(o.human, &corpus);
  if (o.exclude_below >= 0) {
    std::vector<std::string> excluded;
    human = eval::exclude_low_agreement(human, o.exclude_below, &excluded);
    std::printf("excluded %zu participant(s)\n", excluded.size());
    for (const auto& p : excluded) std::printf("  %s\n", p.c_str());
  }
  eval::JudgmentMap values;
  if (!o.judgments.empty()) {
    manifest.input(o.judgments);
    values = read_judgments_csv(o.judgments);
  } else {
    Session session(o, manifest);
    for (const auto& r : corpus) session.note_fixture_inputs(r.id);
    values = eval::model_judgments(eval::run_model(corpus, session.transport(), model_options(o, manifest)));
    manifest.output(o.out + "/model_judgments.csv", judgments_csv(values, corpus));
  }
  auto means = human.means();

  auto report = [&](const std::string& scope, std::optional<worldgen::Variant> v) {
    auto pairs = eval::pair_values(corpus, values, means, v);
    manifest.output(o.out + "/scatter_" + scope + ".csv", eval::emit_plot_data(pairs));
    try {
      auto rep = eval::correlation_report(pairs, scope, o.bootstrap_samples, o.seed);
      manifest.output(o.out + "/report_" + scope + ".json", eval::to_json(rep));
      std::printf("%-16s R = %.4f  95%% CI [%.4f, %.4f]  pairs %zu\n", scope.c_str(), rep.pearson_r, rep.ci_low,
                  rep.ci_high, rep.n_pairs);
      return true;
    } catch (const InsufficientPairs& e) {
      ordered_json j{{"scope", scope}, {"error", e.what()}, {"n_pairs", pairs.size()}};
      manifest.output(o.out + "/report_" + scope + ".json", j.dump(2) + "\n");
      std::printf("%-16s %s\n", scope.c_str(), e.what());
      return false;
    }
  };
  bool overall = report("overall", std::nullopt);
  for (auto v : {worldgen::Variant::kGeneric, worldgen::Variant::kColorSame, worldgen::Variant::kColorDifferent,
                 worldgen::Variant::kSpatial})
    report(worldgen::to_string(v), v);
  if (!overall) throw InsufficientPairs("overall report could not be computed");
  return 0;
}

int cmd_baseline(const Options& o, Manifest& manifest) {
  manifest.input(o.corpus);
  manifest.input(o.prompt_template);
  auto corpus = selected(eval::load_corpus(o.corpus), o);
  Session session(o, manifest);
  for (const auto& r : corpus) session.note_fixture_inputs(r.id);
  eval::BaselineOptions b;
  b.samples = o.samples;
  b.max_attempts = o.max_attempts;
  b.temperature = o.temperature;
  b.prompt_template = io::read_file(o.prompt_template);
  auto results = eval::run_baseline(corpus, session.transport(), b);
  for (const auto& r : results) {
    std::printf("%s (%zu well-formed of %d)\n", r.id.c_str(), r.accepted.size(), r.attempts);
    for (const auto& g : eval::find_stimulus(corpus, r.id).goals)
      std::printf("  %-8s mean rating %.4f\n", g.c_str(), r.means.at(g));
  }
  manifest.output(o.out + "/baseline_means.csv", judgments_csv(eval::baseline_judgments(results), corpus));
  return 0;
}

eval::StimulusRecord single_stimulus(const Options& o, Manifest& manifest) {
  if (o.stimuli.size() != 1) throw InvalidRequest("exactly one --stimulus is required");
  manifest.input(o.corpus);
  return eval::find_stimulus(eval::load_corpus(o.corpus), o.stimuli.front());
}

int cmd_plan(const Options& o, Manifest& manifest) {
  auto rec = single_stimulus(o, manifest);
  Session session(o, manifest);
  session.note_fixture_inputs(rec.id);
  auto resolved = resolve(rec, session, model_options(o, manifest));
  auto bundle = build_scenario(resolved.ir, resolved.operator_text, resolved.map_seed);
  planner::Task task(bundle.domain, bundle.problem);
  planner::Planner planner(task);
  std::vector<std::string> goals = o.goal.empty() ? rec.goals : std::vector<std::string>{o.goal};
  std::string text = worldgen::render_ascii(bundle.map) + "\n";
  for (const auto& g : goals) {
    auto result = planner.optimal_cost(task.initial_state(), task.goal_index(g));
    text += "goal " + g + "\n";
    if (!result.reached()) {
      text += "UNREACHABLE\n";
      continue;
    }
    text += "cost " + fmt(result.cost) + "\n";
    for (const auto& a : result.actions) text += a.label + "\n";
  }
  std::fputs(text.c_str(), stdout);
  manifest.output(o.out + "/plan_" + rec.id + ".txt", text);
  return 0;
}

int cmd_sample_map(const Options& o, Manifest& manifest) {
  auto rec = single_stimulus(o, manifest);
  Session session(o, manifest);
  session.note_fixture_inputs(rec.id);
  auto resolved = resolve(rec, session, model_options(o, manifest));
  auto map = worldgen::sample_map(resolved.ir, resolved.map_seed);
  std::string text = worldgen::render_ascii(map);
  std::fputs(text.c_str(), stdout);
  manifest.output(o.out + "/map_" + rec.id + ".txt", text);
  return 0;
}

int cmd_validate(const Options& o, Manifest& manifest) {
  manifest.input(o.corpus);
  auto corpus = selected(eval::load_corpus(o.corpus), o);
  translate::FixtureStore store(o.fixtures);
  store.require([&] {
    std::vector<std::string> ids;
    for (const auto& r : corpus) ids.push_back(r.id);
    return ids;
  }());
  int failed = 0;
  std::string text;
  for (const auto& rec : corpus) {
    manifest.input(o.fixtures + "/" + rec.id + "/scenario.json");
    translate::DomainContext ctx;
    ctx.variant = rec.variant;
    ctx.seed = derive_seed(o.seed, rec.id);
    auto raw = store.read(rec.id, "scenario");
    auto report = translate::validate_translation(raw, translate::TargetKind::kScenarioIr, ctx);
    std::string line = rec.id + " scenario " + (report.accepted() ? "ok" : "FAILED");
    if (report.accepted() && rec.variant != worldgen::Variant::kSpatial) {
      manifest.input(o.fixtures + "/" + rec.id + "/operator.pddl");
      auto ir = worldgen::parse_scenario_ir(raw);
      auto op = translate::validate_translation(store.read(rec.id, "operator"),
                                                translate::TargetKind::kOperatorDefinition,
                                                translate::context_for(ir, ctx.seed));
      line += std::string(" operator ") + (op.accepted() ? "ok" : "FAILED");
      for (const auto& f : op.failures) line += "\n  " + f;
      if (!op.accepted()) ++failed;
    }
    for (const auto& f : report.failures) line += "\n  " + f;
    if (!report.accepted()) ++failed;
    text += line + "\n";
  }
  std::fputs(text.c_str(), stdout);
  manifest.output(o.out + "/validation.txt", text);
  if (failed) throw ConsistencyError(std::to_string(failed) + " fixture(s) failed validation");
  return 0;
}

void add_translation_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--fixtures", o.fixtures, "Directory of canned translations (<dir>/<id>/...)")->capture_default_str();
  cmd->add_flag("--live", o.live, "Call the chat-completion endpoint instead of reading fixtures (key in OPENAI_API_KEY)");
  cmd->add_option("--llm-model", o.llm_model, "Model name sent to the endpoint in live mode");
  cmd->add_option("--api-base", o.api_base, "Base URL of the chat-completion endpoint")->capture_default_str();
  cmd->add_option("--temperature", o.temperature, "Sampling temperature for LLM calls")->capture_default_str();
  cmd->add_option("--max-rejections", o.max_rejections, "Translation attempts before giving up")->capture_default_str();
  cmd->add_option("--few-shot-dir", o.few_shot_dir, "Directory with scenario.json and operator.json example pools")
      ->capture_default_str();
}

void add_inference_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--beta", o.beta, "Inverse temperature of the Boltzmann policy")->capture_default_str();
  cmd->add_option("--epsilon-floor", o.epsilon_floor, "Likelihood floor per observed action")->capture_default_str();
  cmd->add_option("--subgoal-horizon", o.subgoal_horizon, "Macro steps explored for subgoal observations")
      ->capture_default_str();
}

void add_common_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Seed for every random choice")->capture_default_str();
  cmd->add_option("--corpus", o.corpus, "Stimulus corpus (JSON)")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory for results, transcripts and the manifest")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal inference over gameshow stimuli: translation, inverse planning and evaluation"};
  app.require_subcommand(1);
  Options o;

  auto* infer = app.add_subcommand("infer", "Posterior over goals for stimuli or a scenario record");
  add_common_flags(infer, o);
  add_translation_flags(infer, o);
  add_inference_flags(infer, o);
  infer->add_option("--stimulus", o.stimuli, "Stimulus id (repeatable)");
  infer->add_flag("--all", o.all, "Every stimulus in the corpus");
  infer->add_option("--scenario", o.scenario_path, "Scenario record file, bypassing translation");
  infer->add_option("--operator", o.operator_path, "Unlock operator file to use with --scenario");

  auto* ev = app.add_subcommand("eval", "Correlate model (or baseline) judgments with human ratings");
  add_common_flags(ev, o);
  add_translation_flags(ev, o);
  add_inference_flags(ev, o);
  ev->add_option("--human", o.human, "Human ratings CSV (participant_id,stimulus_id,trophy,rating)")->capture_default_str();
  ev->add_option("--judgments", o.judgments, "Use these stimulus_id,trophy,value rows instead of running the model");
  ev->add_option("--bootstrap-samples", o.bootstrap_samples, "Bootstrap resamples for the CI")->capture_default_str();
  ev->add_option("--exclude-below", o.exclude_below,
                 "Drop participants whose top choice agrees with the consensus on less than this fraction of stimuli");

  auto* base = app.add_subcommand("baseline", "Zero-shot LLM ratings for each stimulus");
  add_common_flags(base, o);
  add_translation_flags(base, o);
  base->add_option("--stimulus", o.stimuli, "Stimulus id (repeatable; default all)");
  base->add_option("--samples", o.samples, "Well-formed answers collected per stimulus")->capture_default_str();
  base->add_option("--max-attempts", o.max_attempts, "Completions allowed per stimulus (0 = 3 x samples)")
      ->capture_default_str();
  base->add_option("--prompt-template", o.prompt_template, "Prompt with {stimulus} and {answer_format}")
      ->capture_default_str();

  auto* plan = app.add_subcommand("plan", "Optimal plans to each goal on the sampled map");
  add_common_flags(plan, o);
  add_translation_flags(plan, o);
  plan->add_option("--stimulus", o.stimuli, "Stimulus id")->required();
  plan->add_option("--goal", o.goal, "Only this trophy");

  auto* smap = app.add_subcommand("sample-map", "Render the map sampled for a stimulus");
  add_common_flags(smap, o);
  add_translation_flags(smap, o);
  smap->add_option("--stimulus", o.stimuli, "Stimulus id")->required();

  auto* val = app.add_subcommand("validate-fixtures", "Check every canned translation");
  add_common_flags(val, o);
  val->add_option("--fixtures", o.fixtures, "Directory of canned translations")->capture_default_str();
  val->add_option("--stimulus", o.stimuli, "Stimulus id (repeatable; default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(ErrorFamily::kUsage);
  }

  CLI::App* cmd = app.get_subcommands().front();
  std::unique_ptr<Manifest> manifest;
  try {
    manifest = std::make_unique<Manifest>(cmd->get_name(), o);
    int rc = 0;
    if (cmd == infer) rc = cmd_infer(o, *manifest);
    else if (cmd == ev) rc = cmd_eval(o, *manifest);
    else if (cmd == base) rc = cmd_baseline(o, *manifest);
    else if (cmd == plan) rc = cmd_plan(o, *manifest);
    else if (cmd == smap) rc = cmd_sample_map(o, *manifest);
    else rc = cmd_validate(o, *manifest);
    manifest->finish("complete");
    return rc;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    if (manifest) manifest->finish("failed", e.what());
    return static_cast<int>(e.family());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    if (manifest) manifest->finish("failed", e.what());
    return static_cast<int>(ErrorFamily::kInternal);
  }
}
