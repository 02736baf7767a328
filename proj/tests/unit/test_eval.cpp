#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"
#include "helpers.hpp"

using namespace goalinf;
using namespace goalinf::eval;

namespace {

const std::vector<StimulusRecord>& corpus() {
  static const auto c = load_corpus(testing::source_path("data/corpus.json"));
  return c;
}

// The textbook single-pass formula in long double.
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

std::string csv_for(const std::vector<StimulusRecord>& records, int participants, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::ostringstream out;
  out << "participant_id,stimulus_id,trophy,rating\n";
  for (int p = 0; p < participants; ++p)
    for (const auto& r : records)
      for (const auto& g : r.goals) out << "p" << p << "," << r.id << "," << g << "," << 1 + rng() % 7 << "\n";
  return out.str();
}

std::vector<PairedValue> synthetic_pairs(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.15);
  std::vector<PairedValue> out;
  for (std::size_t i = 0; i < n; ++i) {
    double m = std::uniform_real_distribution<double>(0, 1)(rng);
    out.push_back({"s" + std::to_string(i / 3), "t" + std::to_string(i % 3), worldgen::Variant::kGeneric, m,
                   1 + 6 * m + noise(rng)});
  }
  return out;
}

ModelRunOptions fixture_options() {
  ModelRunOptions o;
  o.scenario_pool = translate::load_few_shot(testing::source_path("data/fewshot/scenario.json"));
  o.operator_pool = translate::load_few_shot(testing::source_path("data/fewshot/operator.json"));
  return o;
}

}  // namespace

TEST_CASE("shipped corpus") {
  const auto& c = corpus();
  CHECK(c.size() == 18);
  std::set<worldgen::Variant> variants;
  for (const auto& r : c) {
    variants.insert(r.variant);
    CHECK(r.goals.size() == 3);
    CHECK_FALSE(r.text.empty());
  }
  CHECK(variants.size() == 4);
  CHECK(find_stimulus(c, "spatial_04").variant == worldgen::Variant::kSpatial);
  CHECK_THROWS_AS(find_stimulus(c, "nope"), FixtureMissing);
}

TEST_CASE("corpus errors") {
  CHECK_THROWS_AS(parse_corpus(""), SchemaError);
  CHECK_THROWS_AS(parse_corpus("[]"), SchemaError);
  CHECK_THROWS_AS(parse_corpus(R"([{"id": "a", "variant": "colorful", "text": "t", "goals": ["gold"], "fixture": "f"}])"),
                  SchemaError);
  CHECK_THROWS_AS(parse_corpus(R"([{"id": "a", "variant": "generic", "text": "t", "goals": ["gold"], "fixture": "f"},
                                   {"id": "a", "variant": "generic", "text": "t", "goals": ["gold"], "fixture": "f"}])"),
                  SchemaError);
}

TEST_CASE("human ratings") {
  const auto& c = corpus();
  std::vector<StimulusRecord> seven(c.begin(), c.begin() + 7);
  SUBCASE("a complete file") {
    auto h = parse_human_csv(csv_for(seven, 14, 1), &c);
    CHECK(h.rows.size() == 294);
    CHECK(h.participants().size() == 14);
    CHECK(h.means().size() == 21);
  }
  SUBCASE("means") {
    auto h = parse_human_csv(
        "participant_id,stimulus_id,trophy,rating\n"
        "a,generic_01,gold,7\na,generic_01,silver,1\na,generic_01,bronze,4\n"
        "b,generic_01,gold,4\nb,generic_01,silver,2\nb,generic_01,bronze,4\n",
        &c);
    auto m = h.means();
    CHECK(m.at({"generic_01", "gold"}) == 5.5);
    CHECK(m.at({"generic_01", "silver"}) == 1.5);
    CHECK(m.at({"generic_01", "bronze"}) == 4.0);
  }
  SUBCASE("rating out of range names its line") {
    std::string text = "# comment\nparticipant_id,stimulus_id,trophy,rating\na,generic_01,gold,8\n";
    try {
      parse_human_csv(text, &c);
      FAIL("expected RangeError");
    } catch (const RangeError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_human_csv("participant_id,stimulus_id,trophy,rating\na,generic_01,gold,0\n", &c), RangeError);
    CHECK_THROWS_AS(parse_human_csv("participant_id,stimulus_id,trophy,rating\na,generic_01,gold,5.5\n", &c),
                    RangeError);
  }
  SUBCASE("structural problems") {
    // bronze missing for this participant
    CHECK_THROWS_AS(parse_human_csv("participant_id,stimulus_id,trophy,rating\n"
                                    "a,generic_01,gold,7\na,generic_01,silver,1\n",
                                    &c),
                    SchemaError);
    CHECK_THROWS_AS(parse_human_csv("pid,stimulus,trophy,rating\n", &c), SchemaError);
    CHECK_THROWS_AS(parse_human_csv("participant_id,stimulus_id,trophy,rating\na,unknown,gold,7\n", &c), SchemaError);
    CHECK_THROWS_AS(parse_human_csv("participant_id,stimulus_id,trophy,rating\na,generic_01,platinum,7\n", &c),
                    SchemaError);
    CHECK_THROWS_AS(parse_human_csv("participant_id,stimulus_id,trophy,rating\na,generic_01,gold\n", &c), SchemaError);
  }
  SUBCASE("shipped synthetic file") {
    auto h = load_human_csv(testing::source_path("data/synthetic_human.csv"), &c);
    CHECK(h.rows.size() == 18 * 3 * h.participants().size());
  }
}

TEST_CASE("low-agreement exclusion") {
  const auto& c = corpus();
  std::vector<StimulusRecord> two(c.begin(), c.begin() + 2);
  std::ostringstream csv;
  csv << "participant_id,stimulus_id,trophy,rating\n";
  for (const char* p : {"a", "b", "c"})
    for (const auto& r : two) csv << p << "," << r.id << ",gold,7\n" << p << "," << r.id << ",silver,2\n" << p << "," << r.id << ",bronze,1\n";
  for (const auto& r : two) csv << "d," << r.id << ",gold,1\nd," << r.id << ",silver,1\nd," << r.id << ",bronze,7\n";
  auto h = parse_human_csv(csv.str(), &c);
  std::vector<std::string> excluded;
  auto kept = exclude_low_agreement(h, 0.5, &excluded);
  CHECK(excluded == std::vector<std::string>{"d"});
  CHECK(kept.participants() == std::vector<std::string>{"a", "b", "c"});
  CHECK(exclude_low_agreement(h, 0.0).participants().size() == 4);
}

TEST_CASE("Pearson correlation") {
  CHECK(pearson({1, 2, 3, 4}, {2, 4, 6, 8}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson({1, 2, 3, 4}, {8, 6, 4, 2}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(std::isnan(pearson({1, 1, 1}, {1, 2, 3})));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto pairs = synthetic_pairs(54, seed);
    std::vector<double> x, y;
    for (const auto& p : pairs) {
      x.push_back(p.model);
      y.push_back(p.human);
    }
    CHECK(std::abs(pearson(x, y) - direct_pearson(x, y)) <= 1e-12);
    // Symmetric and unchanged by positive affine maps.
    CHECK(pearson(y, x) == doctest::Approx(pearson(x, y)).epsilon(1e-14));
    std::vector<double> z;
    for (double v : x) z.push_back(3 * v + 11);
    CHECK(pearson(z, y) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("correlation reports") {
  auto pairs = synthetic_pairs(54, 3);
  auto a = correlation_report(pairs, "overall", 1000, 42);
  auto b = correlation_report(pairs, "overall", 1000, 42);
  CHECK(a.ci_low == b.ci_low);
  CHECK(a.ci_high == b.ci_high);
  CHECK(a.n_pairs == 54);
  CHECK(a.ci_low <= a.pearson_r);
  CHECK(a.pearson_r <= a.ci_high);
  auto other = correlation_report(pairs, "overall", 1000, 43);
  CHECK((other.ci_low != a.ci_low || other.ci_high != a.ci_high));
  CHECK(to_json(a) == to_json(b));

  CHECK_THROWS_AS(correlation_report(synthetic_pairs(2, 1), "tiny", 100, 0), InsufficientPairs);
  std::vector<PairedValue> flat = synthetic_pairs(5, 1);
  for (auto& p : flat) p.model = 0.3;
  CHECK_THROWS_AS(correlation_report(flat, "flat", 100, 0), InsufficientPairs);
}

TEST_CASE("plot data") {
  auto pairs = synthetic_pairs(54, 8);
  auto text = emit_plot_data(pairs);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "stimulus_id,trophy,variant,model,human_mean");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 54);
  CHECK(emit_plot_data(std::vector<PairedValue>{}) == "stimulus_id,trophy,variant,model,human_mean\n");
}

TEST_CASE("model run on the shipped corpus against synthetic people") {
  translate::FixtureTransport t(translate::FixtureStore(testing::source_path("fixtures")));
  auto opts = fixture_options();
  auto results = run_model(corpus(), t, opts);
  REQUIRE(results.size() == 18);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(results[i].id == corpus()[i].id);
    CHECK(std::abs(results[i].posterior.sum() - 1.0) <= 1e-9);
    CHECK(results[i].scenario_attempts == 1);
  }
  auto model = model_judgments(results);
  CHECK(model.size() == 54);
  auto human = load_human_csv(testing::source_path("data/synthetic_human.csv"), &corpus()).means();
  auto all = pair_values(corpus(), model, human);
  CHECK(all.size() == 54);
  std::size_t by_variant = 0;
  for (auto v : {worldgen::Variant::kGeneric, worldgen::Variant::kColorSame, worldgen::Variant::kColorDifferent,
                 worldgen::Variant::kSpatial}) {
    auto part = pair_values(corpus(), model, human, v);
    for (const auto& p : part) CHECK(p.variant == v);
    by_variant += part.size();
  }
  CHECK(by_variant == all.size());
  auto report = correlation_report(all, "overall", 1000, 7);
  CHECK(report.ci_low <= report.pearson_r);
  CHECK(report.pearson_r <= report.ci_high);

  // Same seed, same run; the sequential path agrees with the parallel one.
  opts.parallel = false;
  auto again = run_model(corpus(), t, opts);
  for (std::size_t i = 0; i < results.size(); ++i) CHECK(again[i].posterior.mass == results[i].posterior.mass);
}

TEST_CASE("model run errors keep their family and name the stimulus") {
  translate::ScriptedTransport t({"{}"});
  auto opts = fixture_options();
  opts.max_rejections = 2;
  try {
    run_stimulus(find_stimulus(corpus(), "generic_01"), t, opts);
    FAIL("expected a schema error");
  } catch (const Error& e) {
    CHECK(e.family() == ErrorFamily::kSchema);
    CHECK(std::string(e.what()).find("generic_01") != std::string::npos);
  }
}

TEST_CASE("baseline answers") {
  const auto& rec = find_stimulus(corpus(), "color_different_01");
  SUBCASE("answer format and prompt") {
    CHECK(answer_format(rec.goals) ==
          "Gold Trophy: <rating from 1 to 7>\nSilver Trophy: <rating from 1 to 7>\nBronze Trophy: <rating from 1 to 7>\n");
    auto p = baseline_prompt("Story: {stimulus}\nAnswer like this:\n{answer_format}", rec);
    CHECK(p.find(rec.text) != std::string::npos);
    CHECK(p.find("Silver Trophy: <rating") != std::string::npos);
    CHECK_THROWS_AS(baseline_prompt("no placeholder", rec), InvalidRequest);
  }
  SUBCASE("parsing") {
    auto r = parse_ratings("Thinking...\nGold Trophy: 6\nSilver trophy : **4**\nBronze Trophy: 1", rec.goals);
    REQUIRE(r);
    CHECK(r->at("gold") == 6);
    CHECK(r->at("silver") == 4);
    CHECK(r->at("bronze") == 1);
    CHECK_FALSE(parse_ratings("Gold Trophy: 6\nSilver Trophy: 4", rec.goals));
    CHECK_FALSE(parse_ratings("Gold Trophy: 9\nSilver Trophy: 4\nBronze Trophy: 1", rec.goals));
    CHECK_FALSE(parse_ratings("Gold Trophy: 6\nGold Trophy: 2\nSilver Trophy: 4\nBronze Trophy: 1", rec.goals));
    CHECK_FALSE(parse_ratings("I cannot tell.", rec.goals));
  }
  SUBCASE("fixture answers") {
    translate::FixtureTransport t(translate::FixtureStore(testing::source_path("fixtures")));
    BaselineOptions o;
    o.prompt_template = testing::slurp(testing::source_path("data/baseline_prompt.txt"));
    auto res = run_baseline_stimulus(rec, t, o);
    CHECK(res.accepted.size() == 30);
    CHECK(res.means.at("gold") == 6.0);
    CHECK(res.means.at("silver") == 6.0);
    CHECK(res.means.at("bronze") == 1.0);
  }
  SUBCASE("free text is sampled again") {
    translate::ScriptedTransport t({"Hard to say.", "Gold Trophy: 5\nSilver Trophy: 4\nBronze Trophy: 2"});
    BaselineOptions o;
    o.samples = 3;
    o.prompt_template = "{stimulus}\n{answer_format}";
    auto res = run_baseline_stimulus(rec, t, o);
    CHECK(res.attempts == 4);
    CHECK(res.raw.size() == 4);
    CHECK(res.accepted.size() == 3);
    CHECK(res.means.at("gold") == 5.0);
    CHECK(res.means.at("bronze") == 2.0);
  }
  SUBCASE("attempt cap") {
    translate::ScriptedTransport t({"no idea"});
    BaselineOptions o;
    o.samples = 4;
    o.prompt_template = "{stimulus}";
    CHECK_THROWS_AS(run_baseline_stimulus(rec, t, o), SampleBudgetExhausted);
    CHECK(t.calls() == 12);
    o.max_attempts = 5;
    translate::ScriptedTransport t2({"no idea"});
    CHECK_THROWS_AS(run_baseline_stimulus(rec, t2, o), SampleBudgetExhausted);
    CHECK(t2.calls() == 5);
  }
}
