#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "goalinf/infer/inference.hpp"
#include "goalinf/translate/translate.hpp"
#include "goalinf/worldgen/map.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace goalinf::eval {

struct StimulusRecord {
  std::string id;
  worldgen::Variant variant = worldgen::Variant::kGeneric;
  std::string text;
  std::vector<std::string> goals;
  std::string fixture;  // path relative to the corpus file's directory or absolute
};

// JSON array of {id, variant, text, goals, fixture}. Throws SchemaError.
std::vector<StimulusRecord> parse_corpus(std::string_view json_text);
std::vector<StimulusRecord> load_corpus(const std::string& path);

const StimulusRecord& find_stimulus(const std::vector<StimulusRecord>& corpus, const std::string& id);

using PairKey = std::pair<std::string, std::string>;  // (stimulus id, trophy)
using JudgmentMap = std::map<PairKey, double>;

struct HumanRow {
  std::string participant;
  std::string stimulus;
  std::string trophy;
  int rating = 0;
};

struct HumanJudgments {
  std::vector<HumanRow> rows;

  JudgmentMap means() const;
  std::vector<std::string> participants() const;
};

// CSV with header participant_id,stimulus_id,trophy,rating; lines starting
// with '#' are comments. Throws RangeError naming the line of a rating outside
// 1..7, SchemaError for structural problems and for a (participant, stimulus)
// that does not rate every trophy of the stimulus. Without a corpus the
// trophies of a stimulus are those anyone rated.
HumanJudgments parse_human_csv(std::string_view text, const std::vector<StimulusRecord>* corpus = nullptr);
HumanJudgments load_human_csv(const std::string& path, const std::vector<StimulusRecord>* corpus = nullptr);

// Drops participants whose top-rated trophies match the consensus top
// trophy on fewer than `min_agreement` of their stimuli.
HumanJudgments exclude_low_agreement(const HumanJudgments& judgments, double min_agreement,
                                     std::vector<std::string>* excluded = nullptr);

struct ModelRunOptions {
  infer::InferenceConfig inference;
  std::uint64_t seed = 0;
  double temperature = 1.2;
  int max_rejections = 10;
  translate::FewShotPool scenario_pool;
  translate::FewShotPool operator_pool;
  worldgen::SamplerOptions sampler;
  bool parallel = true;
};

struct StimulusResult {
  std::string id;
  worldgen::Variant variant = worldgen::Variant::kGeneric;
  infer::GoalDistribution prior;
  infer::GoalDistribution posterior;
  int scenario_attempts = 0;
  int operator_attempts = 0;
  worldgen::MapSample map;
};

// translate -> sample a map -> compile -> posterior, for one stimulus.
// Errors keep their family and gain the stimulus id.
StimulusResult run_stimulus(const StimulusRecord& record, translate::Transport& transport,
                            const ModelRunOptions& options);

// All stimuli, concurrently unless options.parallel is false; results in
// corpus order.
std::vector<StimulusResult> run_model(const std::vector<StimulusRecord>& corpus, translate::Transport& transport,
                                      const ModelRunOptions& options);

JudgmentMap model_judgments(const std::vector<StimulusResult>& results);

struct BaselineOptions {
  int samples = 30;
  int max_attempts = 0;  // per stimulus; 0 means 3 * samples
  double temperature = 1.2;
  std::string prompt_template;  // with {stimulus} and {answer_format} placeholders
};

struct BaselineResult {
  std::string id;
  std::vector<std::map<std::string, int>> accepted;
  std::vector<std::string> raw;  // every completion, accepted or not
  int attempts = 0;
  std::map<std::string, double> means;
};

std::string answer_format(const std::vector<std::string>& goals);
std::string baseline_prompt(const std::string& prompt_template, const StimulusRecord& record);

// Ratings such as "Gold Trophy: 6", one per goal, all within 1..7; nullopt
// for anything else.
std::optional<std::map<std::string, int>> parse_ratings(const std::string& text, const std::vector<std::string>& goals);

// Samples until options.samples well-formed answers; throws
// SampleBudgetExhausted when the attempt cap is reached first.
BaselineResult run_baseline_stimulus(const StimulusRecord& record, translate::Transport& transport,
                                     const BaselineOptions& options);
std::vector<BaselineResult> run_baseline(const std::vector<StimulusRecord>& corpus, translate::Transport& transport,
                                         const BaselineOptions& options);
JudgmentMap baseline_judgments(const std::vector<BaselineResult>& results);

struct PairedValue {
  std::string stimulus;
  std::string trophy;
  worldgen::Variant variant = worldgen::Variant::kGeneric;
  double model = 0.0;
  double human = 0.0;
};

struct CorrelationReport {
  std::string scope;  // "overall" or a variant name
  double pearson_r = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_pairs = 0;
  int bootstrap_samples = 0;
  std::uint64_t seed = 0;
  std::vector<PairedValue> pairs;
};

// Sample Pearson correlation; NaN when either side has zero variance.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

// Pairs for every (stimulus, trophy) in corpus order that has both a model
// value and a human mean, restricted to one variant when given.
std::vector<PairedValue> pair_values(const std::vector<StimulusRecord>& corpus, const JudgmentMap& model,
                                     const JudgmentMap& human, std::optional<worldgen::Variant> scope = std::nullopt);

// Pearson R with a percentile bootstrap CI (95%) over resampled pairs.
// Throws InsufficientPairs below 3 pairs or when R is undefined.
CorrelationReport correlation_report(std::vector<PairedValue> pairs, const std::string& scope, int bootstrap_samples,
                                     std::uint64_t seed);

// stimulus_id,trophy,variant,model,human_mean rows in pair order.
std::string emit_plot_data(const std::vector<PairedValue>& pairs);
std::string emit_plot_data(const CorrelationReport& report);
std::string to_json(const CorrelationReport& report);

}  // namespace goalinf::eval
