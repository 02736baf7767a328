#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include <json.hpp>

#include "goalinf/error.hpp"
#include "goalinf/eval/eval.hpp"
#include "goalinf/random.hpp"

namespace goalinf::eval {
namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  double pos = q * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<PairedValue> pair_values(const std::vector<StimulusRecord>& corpus, const JudgmentMap& model,
                                     const JudgmentMap& human, std::optional<worldgen::Variant> scope) {
  std::vector<PairedValue> out;
  for (const auto& r : corpus) {
    if (scope && r.variant != *scope) continue;
    for (const auto& g : r.goals) {
      auto m = model.find({r.id, g});
      auto h = human.find({r.id, g});
      if (m == model.end() || h == human.end()) continue;
      out.push_back({r.id, g, r.variant, m->second, h->second});
    }
  }
  return out;
}

CorrelationReport correlation_report(std::vector<PairedValue> pairs, const std::string& scope, int bootstrap_samples,
                                     std::uint64_t seed) {
  if (pairs.size() < 3)
    throw InsufficientPairs(scope + ": " + std::to_string(pairs.size()) + " pairs, at least 3 are needed");
  if (bootstrap_samples < 1) throw InvalidConfig("bootstrap needs at least one resample");
  std::vector<double> x, y;
  for (const auto& p : pairs) {
    x.push_back(p.model);
    y.push_back(p.human);
  }
  CorrelationReport report;
  report.scope = scope;
  report.pearson_r = pearson(x, y);
  if (std::isnan(report.pearson_r)) throw InsufficientPairs(scope + ": correlation undefined (constant values)");
  report.n_pairs = pairs.size();
  report.bootstrap_samples = bootstrap_samples;
  report.seed = seed;

  std::mt19937_64 rng(seed);
  std::vector<double> rs;
  std::vector<double> bx(x.size()), by(y.size());
  for (int b = 0; b < bootstrap_samples; ++b) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      std::size_t j = uniform_index(rng, x.size());
      bx[i] = x[j];
      by[i] = y[j];
    }
    double r = pearson(bx, by);
    if (!std::isnan(r)) rs.push_back(r);  // resamples that repeat one pair have no correlation
  }
  if (rs.empty()) {
    report.ci_low = report.ci_high = report.pearson_r;
  } else {
    std::sort(rs.begin(), rs.end());
    report.ci_low = quantile(rs, 0.025);
    report.ci_high = quantile(rs, 0.975);
  }
  report.pairs = std::move(pairs);
  return report;
}

std::string emit_plot_data(const std::vector<PairedValue>& pairs) {
  std::string out = "stimulus_id,trophy,variant,model,human_mean\n";
  for (const auto& p : pairs)
    out += p.stimulus + "," + p.trophy + "," + worldgen::to_string(p.variant) + "," + number(p.model) + "," +
           number(p.human) + "\n";
  return out;
}

std::string emit_plot_data(const CorrelationReport& report) { return emit_plot_data(report.pairs); }

std::string to_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["scope"] = report.scope;
  j["pearson_r"] = report.pearson_r;
  j["ci_low"] = report.ci_low;
  j["ci_high"] = report.ci_high;
  j["n_pairs"] = report.n_pairs;
  j["bootstrap_samples"] = report.bootstrap_samples;
  j["seed"] = report.seed;
  auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : report.pairs)
    pairs.push_back({{"stimulus_id", p.stimulus},
                     {"trophy", p.trophy},
                     {"variant", worldgen::to_string(p.variant)},
                     {"model", p.model},
                     {"human_mean", p.human}});
  return j.dump(2) + "\n";
}

}  // namespace goalinf::eval
