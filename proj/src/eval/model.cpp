#include <future>

#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"
#include "goalinf/pipeline.hpp"
#include "goalinf/planner/planner.hpp"
#include "goalinf/random.hpp"

namespace goalinf::eval {
namespace {

[[noreturn]] void rethrow_tagged(const Error& e, const std::string& id) {
  std::string message = e.what();
  const std::string prefix = e.kind() + ": ";
  if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
  throw Error(e.family(), e.kind(), id + ": " + message);
}

}  // namespace

StimulusResult run_stimulus(const StimulusRecord& record, translate::Transport& transport,
                            const ModelRunOptions& options) {
  try {
    StimulusResult result;
    result.id = record.id;
    result.variant = record.variant;

    translate::TranslationRequest request;
    request.stimulus_id = record.id;
    request.stimulus_text = record.text;
    request.temperature = options.temperature;
    request.max_rejections = options.max_rejections;
    request.target = translate::TargetKind::kScenarioIr;
    request.few_shot = translate::sample_few_shot(options.scenario_pool, record.variant,
                                                  derive_seed(options.seed, record.id + "/scenario-shots"));

    const std::uint64_t map_seed = derive_seed(options.seed, record.id);
    translate::DomainContext context;
    context.variant = record.variant;
    context.seed = map_seed;
    context.sampler = options.sampler;
    auto scenario = translate::translate_with_rejection(request, transport, context);
    result.scenario_attempts = scenario.attempts;
    auto ir = worldgen::parse_scenario_ir(scenario.code);
    if (ir.goals != record.goals) throw ConsistencyError("translated goals differ from the corpus goals");

    std::optional<std::string> operator_text;
    if (record.variant != worldgen::Variant::kSpatial) {
      request.target = translate::TargetKind::kOperatorDefinition;
      request.few_shot =
          translate::sample_few_shot(options.operator_pool, record.variant,
                                     derive_seed(options.seed, record.id + "/operator-shots"),
                                     translate::Draw::kOtherVariants);
      auto op = translate::translate_with_rejection(request, transport, translate::context_for(ir, map_seed));
      result.operator_attempts = op.attempts;
      operator_text = op.code;
    }

    auto bundle = build_scenario(ir, operator_text, map_seed, options.sampler);
    result.map = bundle.map;
    planner::Task task(bundle.domain, bundle.problem);
    planner::Planner planner(task);
    result.prior = infer::goal_prior(planner, options.inference);
    result.posterior = infer::posterior(planner, observation_of(ir, task), options.inference);
    return result;
  } catch (const Error& e) {
    rethrow_tagged(e, record.id);
  }
}

std::vector<StimulusResult> run_model(const std::vector<StimulusRecord>& corpus, translate::Transport& transport,
                                      const ModelRunOptions& options) {
  std::vector<StimulusResult> out;
  if (!options.parallel) {
    for (const auto& r : corpus) out.push_back(run_stimulus(r, transport, options));
    return out;
  }
  std::vector<std::future<StimulusResult>> jobs;
  for (const auto& r : corpus)
    jobs.push_back(std::async(std::launch::async, [&, rec = &r] { return run_stimulus(*rec, transport, options); }));
  // Wait for everything before surfacing the first failure in corpus order.
  for (auto& j : jobs) j.wait();
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

JudgmentMap model_judgments(const std::vector<StimulusResult>& results) {
  JudgmentMap out;
  for (const auto& r : results)
    for (std::size_t i = 0; i < r.posterior.labels.size(); ++i) out[{r.id, r.posterior.labels[i]}] = r.posterior.mass[i];
  return out;
}

}  // namespace goalinf::eval
