#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "goalinf/error.hpp"
#include "goalinf/worldgen/map.hpp"
#include "goalinf/worldgen/scenario.hpp"

namespace goalinf::translate {

enum class TargetKind { kScenarioIr, kOperatorDefinition };

std::string to_string(TargetKind kind);

struct FewShotExample {
  std::string text;
  std::string code;
};

struct TranslationRequest {
  std::string stimulus_id;  // fixture key; also names the audit files
  std::string stimulus_text;
  std::vector<FewShotExample> few_shot;
  double temperature = 1.2;
  int max_rejections = 10;
  TargetKind target = TargetKind::kScenarioIr;
};

// Throws InvalidRequest unless there are 2 or 3 examples, temperature > 0
// and max_rejections >= 1.
void check_request(const TranslationRequest& request);

// Input:/Output: blocks for every example, then the query as a final Input:
// block followed by an empty Output: line.
std::string build_prompt(const TranslationRequest& request);

// One chat-completion call.
struct Completion {
  std::string key;      // stimulus id
  std::string purpose;  // "scenario", "operator" or "baseline"
  std::string prompt;
  double temperature = 1.2;
  int sample_index = 0;  // counts calls for the same key and purpose
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual std::string complete(const Completion& request) = 0;
};

// Canned responses read from a fixtures directory:
//   <dir>/<id>/scenario.json, operator.pddl, baseline.txt
// baseline.txt may hold several samples separated by lines of "-----"; they
// are served in turn, cycling.
class FixtureStore {
 public:
  explicit FixtureStore(std::string directory);

  const std::string& directory() const { return directory_; }
  bool has(const std::string& id, const std::string& purpose) const;
  // Throws FixtureMissing.
  std::string read(const std::string& id, const std::string& purpose) const;
  std::vector<std::string> baseline_samples(const std::string& id) const;
  // Throws FixtureMissing naming the first id without a scenario fixture.
  void require(const std::vector<std::string>& ids) const;

 private:
  std::string path_of(const std::string& id, const std::string& purpose) const;

  std::string directory_;
};

class FixtureTransport : public Transport {
 public:
  explicit FixtureTransport(FixtureStore store) : store_(std::move(store)) {}
  std::string complete(const Completion& request) override;

 private:
  FixtureStore store_;
};

// Returns the given responses in order; the last one repeats.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::vector<std::string> responses) : responses_(std::move(responses)) {}
  std::string complete(const Completion& request) override;
  int calls() const { return calls_; }

 private:
  std::vector<std::string> responses_;
  int calls_ = 0;
};

struct HttpOptions {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string api_key;
  int max_retries = 4;
  int initial_backoff_ms = 500;
  int timeout_seconds = 60;
};

// OpenAI-style chat completion endpoint. Retries 429 and 5xx answers and
// connection failures with exponential backoff. Throws AuthError (missing key,
// 401, 403), RateLimited (429 after the last retry) or TransportError.
class HttpTransport : public Transport {
 public:
  explicit HttpTransport(HttpOptions options);
  std::string complete(const Completion& request) override;

 private:
  HttpOptions options_;
};

// Reads the key from OPENAI_API_KEY; AuthError when unset or empty.
std::string api_key_from_env();

// Receives every prompt and raw completion (for run-directory audit logs).
using AuditSink = std::function<void(const Completion& request, const std::string& response)>;

class RecordingTransport : public Transport {
 public:
  RecordingTransport(Transport& inner, AuditSink sink) : inner_(inner), sink_(std::move(sink)) {}
  std::string complete(const Completion& request) override;

 private:
  Transport& inner_;
  AuditSink sink_;
};

struct ValidationReport {
  bool syntactic_pass = false;
  bool semantic_pass = false;
  bool executable_pass = false;
  std::vector<std::string> failures;

  bool accepted() const { return syntactic_pass && semantic_pass && executable_pass; }
};

// What an operator or record is checked against.
struct DomainContext {
  worldgen::Variant variant = worldgen::Variant::kGeneric;
  std::vector<std::string> colors;  // lock colors mentioned by the stimulus
  std::uint64_t seed = 0;           // map sampling for the executability check
  worldgen::SamplerOptions sampler;
};

// Context for an operator translation of `ir`.
DomainContext context_for(const worldgen::ScenarioIr& ir, std::uint64_t seed);

ValidationReport validate_translation(const std::string& raw, TargetKind target, const DomainContext& context);

class RejectionBudgetExhausted : public Error {
 public:
  RejectionBudgetExhausted(const std::string& message, std::vector<ValidationReport> reports)
      : Error(ErrorFamily::kSchema, "RejectionBudgetExhausted", message), reports_(std::move(reports)) {}

  const std::vector<ValidationReport>& reports() const { return reports_; }

 private:
  std::vector<ValidationReport> reports_;
};

struct TranslationOutcome {
  std::string code;
  int attempts = 0;
  std::vector<ValidationReport> reports;
};

// Samples completions until one validates; at most max_rejections attempts.
TranslationOutcome translate_with_rejection(const TranslationRequest& request, Transport& transport,
                                            const DomainContext& context);

// Held-out examples by variant.
struct FewShotPool {
  std::map<worldgen::Variant, std::vector<FewShotExample>> by_variant;
};

// Reads a JSON array of {"variant", "text", "code"} objects. Throws SchemaError.
FewShotPool load_few_shot(const std::string& path);

// Scenario prompts show examples of the query's own variant. Operator
// prompts show rules of the other variants, so the answer is not copied.
enum class Draw { kSameVariant, kOtherVariants };

// Two or three examples chosen with a seeded shuffle. Throws InvalidRequest
// when fewer than two candidates exist.
std::vector<FewShotExample> sample_few_shot(const FewShotPool& pool, worldgen::Variant variant, std::uint64_t seed,
                                            Draw draw = Draw::kSameVariant);

}  // namespace goalinf::translate
