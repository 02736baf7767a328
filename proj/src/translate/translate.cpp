#include "goalinf/translate/translate.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "goalinf/pddl/parser.hpp"
#include "goalinf/pipeline.hpp"
#include "goalinf/planner/task.hpp"
#include "goalinf/random.hpp"
#include "goalinf/worldgen/compile.hpp"
#include "goalinf/worldgen/domains.hpp"

namespace goalinf::translate {
namespace {

using nlohmann::json;

constexpr const char* kPalette[] = {"black", "blue", "green", "orange", "purple", "red", "white", "yellow"};

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Chat models like to wrap code in markdown fences.
std::string strip_fences(const std::string& raw) {
  auto open = raw.find("```");
  if (open == std::string::npos) return trim(raw);
  auto body = raw.find('\n', open);
  if (body == std::string::npos) return trim(raw);
  auto close = raw.find("```", body);
  return trim(raw.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1));
}

std::string probe_key_color(const DomainContext& context) {
  if (context.variant == worldgen::Variant::kColorDifferent) {
    for (const char* c : kPalette)
      if (std::find(context.colors.begin(), context.colors.end(), c) == context.colors.end()) return c;
  }
  if (!context.colors.empty()) return context.colors.front();
  return "black";
}

// 3x3 grid, agent in the middle holding one key, one locked door of every
// mentioned color on the cells around it.
pddl::ProblemInstance probe_problem(const DomainContext& context) {
  const bool colored = context.variant == worldgen::Variant::kColorSame ||
                       context.variant == worldgen::Variant::kColorDifferent;
  pddl::ProblemInstance p;
  p.name = "unlock-probe";
  p.grid.width = 3;
  p.grid.height = 3;
  p.objects = {{"agent", "agent"}, {"probe-key", "key"}, {"probe-trophy", "trophy"}};
  p.initial_fluents[{"xloc", {"agent"}}] = 1;
  p.initial_fluents[{"yloc", {"agent"}}] = 1;
  p.initial_fluents[{"keys-picked", {"agent"}}] = 1;
  p.initial_fluents[{"xloc", {"probe-key"}}] = 1;
  p.initial_fluents[{"yloc", {"probe-key"}}] = 1;
  p.initial_fluents[{"xloc", {"probe-trophy"}}] = 0;
  p.initial_fluents[{"yloc", {"probe-trophy"}}] = 0;
  p.initial_facts.insert({"has", {"agent", "probe-key"}});

  std::vector<std::string> door_colors = colored ? context.colors : std::vector<std::string>{""};
  if (door_colors.empty()) door_colors.push_back("");
  if (colored) {
    for (const char* c : kPalette) p.objects.emplace(c, "color");
    for (const auto& c : door_colors) p.objects.emplace(c, "color");
    auto key_color = probe_key_color(context);
    p.objects.emplace(key_color, "color");
    p.initial_facts.insert({"iscolor", {"probe-key", key_color}});
  }
  const Cell around[] = {{1, 0}, {2, 1}, {1, 2}, {0, 1}};
  for (std::size_t i = 0; i < door_colors.size(); ++i) {
    std::string door = "probe-door-" + std::to_string(i + 1);
    p.objects.emplace(door, "door");
    p.initial_facts.insert({"locked", {door}});
    if (!door_colors[i].empty()) p.initial_facts.insert({"iscolor", {door, door_colors[i]}});
    Cell c = around[i % 4];
    p.initial_fluents[{"xloc", {door}}] = c.x;
    p.initial_fluents[{"yloc", {door}}] = c.y;
  }
  using pddl::NumExpr;
  p.goals.push_back({"probe", "probe-trophy",
                     pddl::Formula::conjunction({
                         pddl::Formula::equals(NumExpr::fluent_ref("xloc", {"agent"}),
                                               NumExpr::fluent_ref("xloc", {"probe-trophy"})),
                         pddl::Formula::equals(NumExpr::fluent_ref("yloc", {"agent"}),
                                               NumExpr::fluent_ref("yloc", {"probe-trophy"})),
                     })});
  return p;
}

ValidationReport validate_operator(const std::string& code, const DomainContext& context) {
  ValidationReport r;
  pddl::ActionSchema action;
  try {
    action = pddl::parse_action(code);
    r.syntactic_pass = true;
  } catch (const Error& e) {
    r.failures.push_back(e.what());
    return r;
  }
  pddl::DomainAst domain;
  try {
    if (action.name != "unlock") throw SemanticError("expected the unlock action, got '" + action.name + "'");
    domain = pddl::with_action(worldgen::build_domain(context.variant), action);
    r.semantic_pass = true;
  } catch (const Error& e) {
    r.failures.push_back(e.what());
    return r;
  }
  try {
    auto problem = probe_problem(context);
    pddl::check_problem(domain, problem);
    planner::Task task(domain, problem);
    bool applicable = false;
    for (const auto& succ : task.successors(task.initial_state()))
      if (succ.action.op >= 0 && task.operators()[static_cast<std::size_t>(succ.action.op)].schema == "unlock")
        applicable = true;
    if (applicable)
      r.executable_pass = true;
    else
      r.failures.push_back("no applicable unlock instance on the probe state with a " + probe_key_color(context) +
                           " key");
  } catch (const Error& e) {
    r.failures.push_back(e.what());
  }
  return r;
}

ValidationReport validate_scenario(const std::string& code, const DomainContext& context) {
  ValidationReport r;
  try {
    auto parsed = json::parse(code);
    if (!parsed.is_object()) throw SchemaError("a scenario record must be a JSON object");
    r.syntactic_pass = true;
  } catch (const json::exception& e) {
    r.failures.push_back(std::string("JSON: ") + e.what());
    return r;
  } catch (const Error& e) {
    r.failures.push_back(e.what());
    return r;
  }
  worldgen::ScenarioIr ir;
  try {
    ir = worldgen::parse_scenario_ir(code);
    if (ir.variant != context.variant)
      throw ConsistencyError("record is " + worldgen::to_string(ir.variant) + " but the stimulus is " +
                             worldgen::to_string(context.variant));
    r.semantic_pass = true;
  } catch (const Error& e) {
    r.failures.push_back(e.what());
    return r;
  }
  try {
    auto bundle = build_scenario(ir, std::nullopt, context.seed, context.sampler);
    planner::Task task(bundle.domain, bundle.problem);
    observation_of(ir, task);
    r.executable_pass = true;
  } catch (const Error& e) {
    r.failures.push_back(e.what());
  }
  return r;
}

}  // namespace

std::string to_string(TargetKind kind) {
  return kind == TargetKind::kScenarioIr ? "scenario" : "operator";
}

void check_request(const TranslationRequest& request) {
  if (request.few_shot.size() < 2 || request.few_shot.size() > 3)
    throw InvalidRequest("a request needs 2 or 3 few-shot examples, got " + std::to_string(request.few_shot.size()));
  if (!(request.temperature > 0)) throw InvalidRequest("temperature must be positive");
  if (request.max_rejections < 1) throw InvalidRequest("max_rejections must be at least 1");
  if (trim(request.stimulus_text).empty()) throw InvalidRequest("empty stimulus text");
}

std::string build_prompt(const TranslationRequest& request) {
  check_request(request);
  std::string prompt;
  for (const auto& ex : request.few_shot) {
    prompt += "Input: " + trim(ex.text) + "\n";
    prompt += "Output: " + trim(ex.code) + "\n\n";
  }
  prompt += "Input: " + request.stimulus_text + "\n";
  prompt += "Output:";
  return prompt;
}

FixtureStore::FixtureStore(std::string directory) : directory_(std::move(directory)) {}

std::string FixtureStore::path_of(const std::string& id, const std::string& purpose) const {
  std::string file = purpose == "scenario" ? "scenario.json" : purpose == "operator" ? "operator.pddl" : "baseline.txt";
  return directory_ + "/" + id + "/" + file;
}

bool FixtureStore::has(const std::string& id, const std::string& purpose) const {
  return std::ifstream(path_of(id, purpose)).good();
}

std::string FixtureStore::read(const std::string& id, const std::string& purpose) const {
  std::string text;
  if (!read_file(path_of(id, purpose), text)) throw FixtureMissing("no " + purpose + " fixture for '" + id + "' in " + directory_);
  return text;
}

std::vector<std::string> FixtureStore::baseline_samples(const std::string& id) const {
  std::istringstream in(read(id, "baseline"));
  std::vector<std::string> samples(1);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line) == "-----") {
      samples.emplace_back();
      continue;
    }
    samples.back() += line + "\n";
  }
  std::erase_if(samples, [](const std::string& s) { return trim(s).empty(); });
  if (samples.empty()) throw FixtureMissing("baseline fixture for '" + id + "' holds no samples");
  return samples;
}

void FixtureStore::require(const std::vector<std::string>& ids) const {
  for (const auto& id : ids)
    if (!has(id, "scenario")) throw FixtureMissing("no scenario fixture for '" + id + "' in " + directory_);
}

std::string FixtureTransport::complete(const Completion& request) {
  if (request.purpose == "baseline") {
    auto samples = store_.baseline_samples(request.key);
    return samples[static_cast<std::size_t>(request.sample_index) % samples.size()];
  }
  return store_.read(request.key, request.purpose);
}

std::string ScriptedTransport::complete(const Completion&) {
  if (responses_.empty()) throw TransportError("scripted transport has no responses");
  std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(calls_), responses_.size() - 1);
  ++calls_;
  return responses_[i];
}

std::string RecordingTransport::complete(const Completion& request) {
  std::string response = inner_.complete(request);
  sink_(request, response);
  return response;
}

DomainContext context_for(const worldgen::ScenarioIr& ir, std::uint64_t seed) {
  DomainContext c;
  c.variant = ir.variant;
  c.seed = seed;
  std::set<std::string> colors;
  for (const auto& [room, locks] : ir.obstacles)
    for (const auto& l : locks)
      if (l != worldgen::kColorless) colors.insert(l);
  for (const auto& k : ir.keys)
    if (k != worldgen::kColorless) colors.insert(k);
  c.colors.assign(colors.begin(), colors.end());
  return c;
}

ValidationReport validate_translation(const std::string& raw, TargetKind target, const DomainContext& context) {
  std::string code = strip_fences(raw);
  if (target == TargetKind::kScenarioIr) return validate_scenario(code, context);
  return validate_operator(code, context);
}

TranslationOutcome translate_with_rejection(const TranslationRequest& request, Transport& transport,
                                            const DomainContext& context) {
  Completion call;
  call.key = request.stimulus_id;
  call.purpose = to_string(request.target);
  call.prompt = build_prompt(request);
  call.temperature = request.temperature;

  TranslationOutcome out;
  for (int attempt = 1; attempt <= request.max_rejections; ++attempt) {
    call.sample_index = attempt - 1;
    std::string raw = transport.complete(call);
    out.reports.push_back(validate_translation(raw, request.target, context));
    out.attempts = attempt;
    if (out.reports.back().accepted()) {
      out.code = strip_fences(raw);
      return out;
    }
  }
  std::string last = out.reports.back().failures.empty() ? "" : ": " + out.reports.back().failures.back();
  throw RejectionBudgetExhausted("no valid " + call.purpose + " translation for '" + request.stimulus_id +
                                     "' after " + std::to_string(request.max_rejections) + " attempts" + last,
                                 std::move(out.reports));
}

FewShotPool load_few_shot(const std::string& path) {
  std::string text;
  if (!read_file(path, text)) throw SchemaError("cannot read few-shot file " + path);
  FewShotPool pool;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(path + ": " + e.what());
  }
  if (!doc.is_array()) throw SchemaError(path + ": expected a JSON array");
  for (const auto& item : doc) {
    if (!item.is_object() || !item.contains("variant") || !item.contains("text") || !item.contains("code") ||
        !item["variant"].is_string() || !item["text"].is_string())
      throw SchemaError(path + ": every example needs string fields variant, text and code");
    auto variant = worldgen::parse_variant(item["variant"].get<std::string>());
    if (!variant) throw SchemaError(path + ": unknown variant '" + item["variant"].get<std::string>() + "'");
    std::string code = item["code"].is_string() ? item["code"].get<std::string>() : item["code"].dump();
    pool.by_variant[*variant].push_back({item["text"].get<std::string>(), code});
  }
  return pool;
}

std::vector<FewShotExample> sample_few_shot(const FewShotPool& pool, worldgen::Variant variant, std::uint64_t seed,
                                            Draw draw) {
  std::vector<FewShotExample> examples;
  for (const auto& [v, list] : pool.by_variant)
    if ((v == variant) == (draw == Draw::kSameVariant)) examples.insert(examples.end(), list.begin(), list.end());
  if (examples.size() < 2)
    throw InvalidRequest("fewer than 2 few-shot candidates for variant " + worldgen::to_string(variant));
  std::mt19937_64 rng(seed);
  shuffle_in_place(examples, rng);
  std::size_t k = 2 + uniform_index(rng, 2);
  examples.resize(std::min(k, examples.size()));
  return examples;
}

}  // namespace goalinf::translate
