#include <cctype>
#include <regex>

#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"

namespace goalinf::eval {
namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string title(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) s.replace(pos, from.size(), to);
}

}  // namespace

std::string answer_format(const std::vector<std::string>& goals) {
  std::string out;
  for (const auto& g : goals) out += title(g) + " Trophy: <rating from 1 to 7>\n";
  return out;
}

std::string baseline_prompt(const std::string& prompt_template, const StimulusRecord& record) {
  if (prompt_template.find("{stimulus}") == std::string::npos)
    throw InvalidRequest("baseline prompt template lacks a {stimulus} placeholder");
  std::string prompt = prompt_template;
  replace_all(prompt, "{answer_format}", answer_format(record.goals));
  replace_all(prompt, "{stimulus}", record.text);
  return prompt;
}

std::optional<std::map<std::string, int>> parse_ratings(const std::string& text, const std::vector<std::string>& goals) {
  static const std::regex line(R"(([A-Za-z]+)\s+trophy\s*:\s*\**\s*(-?\d+))", std::regex::icase);
  std::map<std::string, int> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), line); it != std::sregex_iterator(); ++it) {
    std::string trophy = lower((*it)[1].str());
    bool known = false;
    for (const auto& g : goals) known = known || lower(g) == trophy;
    if (!known) continue;
    const std::string digits = (*it)[2].str();
    if (digits.size() > 2) return std::nullopt;
    int rating = std::stoi(digits);
    if (rating < 1 || rating > 7) return std::nullopt;
    auto [pos, inserted] = out.emplace(trophy, rating);
    if (!inserted && pos->second != rating) return std::nullopt;
  }
  std::map<std::string, int> by_goal;
  for (const auto& g : goals) {
    auto it = out.find(lower(g));
    if (it == out.end()) return std::nullopt;
    by_goal[g] = it->second;
  }
  return by_goal;
}

BaselineResult run_baseline_stimulus(const StimulusRecord& record, translate::Transport& transport,
                                     const BaselineOptions& options) {
  if (options.samples < 1) throw InvalidConfig("baseline needs at least one sample");
  const int cap = options.max_attempts > 0 ? options.max_attempts : 3 * options.samples;
  BaselineResult result;
  result.id = record.id;
  translate::Completion call;
  call.key = record.id;
  call.purpose = "baseline";
  call.prompt = baseline_prompt(options.prompt_template, record);
  call.temperature = options.temperature;
  while (static_cast<int>(result.accepted.size()) < options.samples) {
    if (result.attempts >= cap)
      throw SampleBudgetExhausted(record.id + ": " + std::to_string(result.accepted.size()) + " well-formed answers after " +
                                  std::to_string(cap) + " attempts");
    call.sample_index = result.attempts++;
    result.raw.push_back(transport.complete(call));
    if (auto ratings = parse_ratings(result.raw.back(), record.goals)) result.accepted.push_back(std::move(*ratings));
  }
  for (const auto& g : record.goals) {
    double sum = 0;
    for (const auto& a : result.accepted) sum += a.at(g);
    result.means[g] = sum / static_cast<double>(result.accepted.size());
  }
  return result;
}

std::vector<BaselineResult> run_baseline(const std::vector<StimulusRecord>& corpus, translate::Transport& transport,
                                         const BaselineOptions& options) {
  std::vector<BaselineResult> out;
  for (const auto& r : corpus) out.push_back(run_baseline_stimulus(r, transport, options));
  return out;
}

JudgmentMap baseline_judgments(const std::vector<BaselineResult>& results) {
  JudgmentMap out;
  for (const auto& r : results)
    for (const auto& [g, m] : r.means) out[{r.id, g}] = m;
  return out;
}

}  // namespace goalinf::eval
