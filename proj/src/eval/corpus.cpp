#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"

namespace goalinf::eval {
namespace {

using nlohmann::json;

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  for (auto& f : fields) f = trim(f);
  return fields;
}

std::string field_string(const json& item, const char* name, std::size_t index) {
  if (!item.contains(name) || !item[name].is_string())
    throw SchemaError("corpus record " + std::to_string(index) + ": field '" + name + "' must be a string");
  return item[name].get<std::string>();
}

}  // namespace

std::vector<StimulusRecord> parse_corpus(std::string_view json_text) {
  if (trim(json_text).empty()) throw SchemaError("corpus is empty");
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("corpus is not valid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw SchemaError("corpus must be a JSON array of records");
  if (doc.empty()) throw SchemaError("corpus has no records");
  std::vector<StimulusRecord> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& item = doc[i];
    if (!item.is_object()) throw SchemaError("corpus record " + std::to_string(i) + " is not an object");
    StimulusRecord r;
    r.id = field_string(item, "id", i);
    std::string variant = field_string(item, "variant", i);
    auto v = worldgen::parse_variant(variant);
    if (!v) throw SchemaError("corpus record '" + r.id + "': unknown variant '" + variant + "'");
    r.variant = *v;
    r.text = field_string(item, "text", i);
    r.fixture = item.contains("fixture") ? field_string(item, "fixture", i) : "fixtures/" + r.id;
    if (!item.contains("goals") || !item["goals"].is_array())
      throw SchemaError("corpus record '" + r.id + "': field 'goals' must be an array");
    for (const auto& g : item["goals"]) {
      if (!g.is_string()) throw SchemaError("corpus record '" + r.id + "': goals must be strings");
      r.goals.push_back(g.get<std::string>());
    }
    if (r.goals.empty()) throw SchemaError("corpus record '" + r.id + "' has no goals");
    if (!seen.insert(r.id).second) throw SchemaError("duplicate corpus id '" + r.id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<StimulusRecord> load_corpus(const std::string& path) { return parse_corpus(read_all(path)); }

const StimulusRecord& find_stimulus(const std::vector<StimulusRecord>& corpus, const std::string& id) {
  for (const auto& r : corpus)
    if (r.id == id) return r;
  throw FixtureMissing("no stimulus '" + id + "' in the corpus");
}

JudgmentMap HumanJudgments::means() const {
  std::map<PairKey, std::pair<double, int>> acc;
  for (const auto& row : rows) {
    auto& a = acc[{row.stimulus, row.trophy}];
    a.first += row.rating;
    a.second += 1;
  }
  JudgmentMap out;
  for (const auto& [key, a] : acc) out[key] = a.first / a.second;
  return out;
}

std::vector<std::string> HumanJudgments::participants() const {
  std::set<std::string> ids;
  for (const auto& row : rows) ids.insert(row.participant);
  return {ids.begin(), ids.end()};
}

HumanJudgments parse_human_csv(std::string_view text, const std::vector<StimulusRecord>* corpus) {
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  HumanJudgments out;
  std::vector<int> lines;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_csv(t);
    if (header.empty()) {
      header = fields;
      if (header != std::vector<std::string>{"participant_id", "stimulus_id", "trophy", "rating"})
        throw SchemaError("human CSV header must be participant_id,stimulus_id,trophy,rating");
      continue;
    }
    if (fields.size() != 4)
      throw SchemaError("line " + std::to_string(line_no) + ": expected 4 fields, got " + std::to_string(fields.size()));
    HumanRow row{fields[0], fields[1], fields[2], 0};
    const std::string& r = fields[3];
    bool integral = !r.empty() && std::all_of(r.begin() + (r[0] == '-' ? 1 : 0), r.end(),
                                              [](unsigned char c) { return std::isdigit(c); }) &&
                    r != "-" && r.size() < 10;
    if (!integral) throw RangeError("line " + std::to_string(line_no) + ": rating '" + r + "' is not an integer");
    row.rating = std::stoi(r);
    if (row.rating < 1 || row.rating > 7)
      throw RangeError("line " + std::to_string(line_no) + ": rating " + r + " is outside 1..7");
    if (row.participant.empty() || row.stimulus.empty() || row.trophy.empty())
      throw SchemaError("line " + std::to_string(line_no) + ": empty field");
    out.rows.push_back(std::move(row));
    lines.push_back(line_no);
  }
  if (header.empty()) throw SchemaError("human CSV has no header");

  std::map<std::string, std::set<std::string>> trophies;
  if (corpus) {
    for (const auto& rec : *corpus) trophies[rec.id] = {rec.goals.begin(), rec.goals.end()};
  } else {
    for (const auto& row : out.rows) trophies[row.stimulus].insert(row.trophy);
  }
  std::map<std::pair<std::string, std::string>, std::set<std::string>> covered;
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    const auto& row = out.rows[i];
    auto it = trophies.find(row.stimulus);
    if (it == trophies.end())
      throw SchemaError("line " + std::to_string(lines[i]) + ": unknown stimulus '" + row.stimulus + "'");
    if (!it->second.count(row.trophy))
      throw SchemaError("line " + std::to_string(lines[i]) + ": stimulus '" + row.stimulus + "' has no trophy '" +
                        row.trophy + "'");
    if (!covered[{row.participant, row.stimulus}].insert(row.trophy).second)
      throw SchemaError("line " + std::to_string(lines[i]) + ": participant '" + row.participant + "' rated '" +
                        row.trophy + "' of '" + row.stimulus + "' twice");
  }
  for (const auto& [key, seen] : covered) {
    const auto& all = trophies[key.second];
    for (const auto& t : all)
      if (!seen.count(t))
        throw SchemaError("participant '" + key.first + "' did not rate trophy '" + t + "' of stimulus '" +
                          key.second + "'");
  }
  return out;
}

HumanJudgments load_human_csv(const std::string& path, const std::vector<StimulusRecord>* corpus) {
  return parse_human_csv(read_all(path), corpus);
}

HumanJudgments exclude_low_agreement(const HumanJudgments& judgments, double min_agreement,
                                     std::vector<std::string>* excluded) {
  auto means = judgments.means();
  std::map<std::string, double> best_mean;
  for (const auto& [key, m] : means) {
    auto [it, inserted] = best_mean.emplace(key.first, m);
    if (!inserted) it->second = std::max(it->second, m);
  }
  // participant -> stimulus -> (trophy -> rating)
  std::map<std::string, std::map<std::string, std::map<std::string, int>>> by_participant;
  for (const auto& row : judgments.rows) by_participant[row.participant][row.stimulus][row.trophy] = row.rating;

  std::set<std::string> dropped;
  for (const auto& [participant, stimuli] : by_participant) {
    int agree = 0;
    for (const auto& [stimulus, ratings] : stimuli) {
      int top = 0;
      for (const auto& [t, r] : ratings) top = std::max(top, r);
      for (const auto& [t, r] : ratings) {
        if (r == top && means.at({stimulus, t}) == best_mean.at(stimulus)) {
          ++agree;
          break;
        }
      }
    }
    if (static_cast<double>(agree) < min_agreement * static_cast<double>(stimuli.size())) dropped.insert(participant);
  }
  HumanJudgments out;
  for (const auto& row : judgments.rows)
    if (!dropped.count(row.participant)) out.rows.push_back(row);
  if (excluded) excluded->assign(dropped.begin(), dropped.end());
  return out;
}

}  // namespace goalinf::eval
