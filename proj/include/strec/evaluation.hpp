#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "strec/errors.hpp"
#include "strec/index.hpp"
#include "strec/stats.hpp"
#include "strec/topics.hpp"

namespace strec {

inline constexpr std::array<int, 4> kPrecisionCutoffs{5, 10, 20, 30};

struct TopicMetrics {
  std::string topic_id;
  double average_precision = 0.0;
  double r_precision = 0.0;
  std::map<int, double> precision_at;  // k in kPrecisionCutoffs
  size_t relevant_count = 0;           // R: judged relevant, retrieved or not
};

/// AP, rPrecision and P@k for one ranking, evaluated to the ranking's depth.
/// P@k keeps the denominator at k even when fewer documents were retrieved.
inline TopicMetrics evaluate_topic(const RankedList& ranking, const Qrels& qrels,
                                   int relevance_threshold = 1) {
  const size_t r = qrels.relevant_count(ranking.topic_id, relevance_threshold);
  if (r == 0) {
    throw UnjudgedTopicError("topic " + ranking.topic_id + " has no relevant documents judged");
  }
  TopicMetrics m;
  m.topic_id = ranking.topic_id;
  m.relevant_count = r;
  size_t relevant_seen = 0;
  double ap_sum = 0.0;
  size_t relevant_in_top_r = 0;
  std::map<int, size_t> relevant_at_k;
  for (size_t i = 0; i < ranking.entries.size(); ++i) {
    const size_t rank = i + 1;
    if (qrels.is_relevant(ranking.topic_id, ranking.entries[i].doc_id, relevance_threshold)) {
      ++relevant_seen;
      ap_sum += static_cast<double>(relevant_seen) / static_cast<double>(rank);
      if (rank <= r) ++relevant_in_top_r;
      for (int k : kPrecisionCutoffs) {
        if (rank <= static_cast<size_t>(k)) ++relevant_at_k[k];
      }
    }
  }
  m.average_precision = ap_sum / static_cast<double>(r);
  m.r_precision = static_cast<double>(relevant_in_top_r) / static_cast<double>(r);
  for (int k : kPrecisionCutoffs) {
    m.precision_at[k] = static_cast<double>(relevant_at_k[k]) / static_cast<double>(k);
  }
  return m;
}

struct AggregateMetrics {
  std::string label;
  size_t topic_count = 0;
  double mean_average_precision = 0.0;
  double mean_r_precision = 0.0;
  std::map<int, double> mean_precision_at;
};

inline AggregateMetrics aggregate(const std::vector<TopicMetrics>& per_topic,
                                  std::string label = "") {
  if (per_topic.empty()) throw IntegrityError("aggregate: no topics to average");
  AggregateMetrics agg;
  agg.label = std::move(label);
  agg.topic_count = per_topic.size();
  for (int k : kPrecisionCutoffs) agg.mean_precision_at[k] = 0.0;
  for (const TopicMetrics& m : per_topic) {
    agg.mean_average_precision += m.average_precision;
    agg.mean_r_precision += m.r_precision;
    for (int k : kPrecisionCutoffs) agg.mean_precision_at[k] += m.precision_at.at(k);
  }
  const double n = static_cast<double>(per_topic.size());
  agg.mean_average_precision /= n;
  agg.mean_r_precision /= n;
  for (int k : kPrecisionCutoffs) agg.mean_precision_at[k] /= n;
  return agg;
}

struct SignificanceResult {
  std::string metric;
  double t = 0.0;
  size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  bool degenerate_variance = false;  // sd = 0 with non-zero mean difference

  bool significant_at(double alpha) const { return p_value <= alpha; }
  std::string stars() const {
    if (p_value <= 0.01) return "**";
    if (p_value <= 0.05) return "*";
    return "";
  }
};

/// Paired Student's t-test over per-topic values aligned by position.
/// Differences d_i = variant_i - baseline_i; t = mean(d) / (sd(d)/sqrt(n))
/// with the sample (n-1) standard deviation; two-tailed p.
inline SignificanceResult paired_t_test(std::span<const double> baseline,
                                        std::span<const double> variant,
                                        std::string metric = "") {
  if (baseline.size() != variant.size()) {
    throw IntegrityError("paired_t_test: series of different lengths");
  }
  const size_t n = baseline.size();
  if (n < 2) throw IntegrityError("paired_t_test: need at least 2 paired values");
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += variant[i] - baseline[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = (variant[i] - baseline[i]) - mean;
    ss += d * d;
  }
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  SignificanceResult result;
  result.metric = std::move(metric);
  result.degrees_of_freedom = n - 1;
  if (sd == 0.0) {
    if (mean == 0.0) {
      result.t = 0.0;
      result.p_value = 1.0;
    } else {
      result.t = mean > 0.0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
      result.degenerate_variance = true;
    }
    return result;
  }
  result.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  result.p_value = student_t_two_tailed_p(result.t, result.degrees_of_freedom);
  return result;
}

// --- report ---

struct StrategyEvaluation {
  std::string strategy;
  AggregateMetrics aggregates;
  std::vector<TopicMetrics> per_topic;                      // run order
  std::map<std::string, SignificanceResult> significance;   // metric -> vs baseline
  std::vector<std::string> excluded_topics;                 // no relevant judgments
  std::vector<std::string> skipped_topics;                  // empty query etc.
  std::vector<std::string> fallback_topics;                 // fell back to the global model
};

struct EvaluationReport {
  std::string baseline;  // strategy label the stars refer to; may be empty
  std::vector<StrategyEvaluation> strategies;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

inline const std::array<std::string, 6>& metric_names() {
  static const std::array<std::string, 6> names{"MAP", "rPrecision", "P@5",
                                                "P@10", "P@20", "P@30"};
  return names;
}

namespace detail {

inline double metric_of(const TopicMetrics& m, const std::string& name) {
  if (name == "MAP") return m.average_precision;
  if (name == "rPrecision") return m.r_precision;
  if (name == "P@5") return m.precision_at.at(5);
  if (name == "P@10") return m.precision_at.at(10);
  if (name == "P@20") return m.precision_at.at(20);
  if (name == "P@30") return m.precision_at.at(30);
  throw IntegrityError("unknown metric \"" + name + "\"");
}

inline double metric_of(const AggregateMetrics& a, const std::string& name) {
  // an aggregate over zero topics reports 0 everywhere
  auto at = [&](int k) {
    auto it = a.mean_precision_at.find(k);
    return it == a.mean_precision_at.end() ? 0.0 : it->second;
  };
  if (name == "MAP") return a.mean_average_precision;
  if (name == "rPrecision") return a.mean_r_precision;
  if (name == "P@5") return at(5);
  if (name == "P@10") return at(10);
  if (name == "P@20") return at(20);
  if (name == "P@30") return at(30);
  throw IntegrityError("unknown metric \"" + name + "\"");
}

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace detail

/// Computes per-metric paired t-tests of every strategy against the named
/// baseline over their common topics, then assembles the report. Strategies
/// with no evaluated topics keep empty significance tables.
inline EvaluationReport build_report(std::vector<StrategyEvaluation> strategies,
                                     const std::string& baseline_label) {
  EvaluationReport report;
  report.strategies = std::move(strategies);
  const StrategyEvaluation* baseline = nullptr;
  for (const StrategyEvaluation& s : report.strategies) {
    if (s.strategy == baseline_label) baseline = &s;
  }
  if (!baseline) return report;  // nothing to compare against
  report.baseline = baseline_label;
  std::map<std::string, const TopicMetrics*> base_by_topic;
  for (const TopicMetrics& m : baseline->per_topic) base_by_topic[m.topic_id] = &m;
  for (StrategyEvaluation& s : report.strategies) {
    if (s.strategy == baseline_label) continue;
    std::vector<const TopicMetrics*> variant, base;
    for (const TopicMetrics& m : s.per_topic) {
      auto it = base_by_topic.find(m.topic_id);
      if (it != base_by_topic.end()) {
        variant.push_back(&m);
        base.push_back(it->second);
      }
    }
    if (variant.size() < 2) continue;  // too few common topics for a t-test
    for (const std::string& name : metric_names()) {
      std::vector<double> b, v;
      b.reserve(base.size());
      v.reserve(variant.size());
      for (size_t i = 0; i < base.size(); ++i) {
        b.push_back(detail::metric_of(*base[i], name));
        v.push_back(detail::metric_of(*variant[i], name));
      }
      s.significance[name] = paired_t_test(b, v, name);
    }
  }
  return report;
}

inline std::string EvaluationReport::to_text() const {
  std::ostringstream out;
  auto pad = [](std::string s, size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  const size_t label_width = 16;
  const size_t col_width = 12;
  out << pad("Exp. Type", label_width);
  for (const std::string& name : metric_names()) out << pad(name, col_width);
  out << '\n';
  for (const StrategyEvaluation& s : strategies) {
    std::string label = s.strategy;
    if (!baseline.empty() && s.strategy == baseline) label += " (Base)";
    out << pad(label, label_width);
    for (const std::string& name : metric_names()) {
      std::string cell = detail::fixed4(detail::metric_of(s.aggregates, name));
      auto sig = s.significance.find(name);
      if (sig != s.significance.end()) cell += sig->second.stars();
      out << pad(cell, col_width);
    }
    out << '\n';
  }
  out << '\n';
  if (!baseline.empty()) {
    out << "Significance vs. " << baseline
        << " (paired two-tailed t-test): * p <= 0.05, ** p <= 0.01\n";
  }
  for (const StrategyEvaluation& s : strategies) {
    out << s.strategy << ": " << s.aggregates.topic_count << " topics evaluated";
    if (!s.excluded_topics.empty()) {
      out << "; excluded (no relevant judgments):";
      for (const std::string& t : s.excluded_topics) out << ' ' << t;
    }
    if (!s.skipped_topics.empty()) {
      out << "; skipped:";
      for (const std::string& t : s.skipped_topics) out << ' ' << t;
    }
    if (!s.fallback_topics.empty()) {
      out << "; fell back to global model:";
      for (const std::string& t : s.fallback_topics) out << ' ' << t;
    }
    out << '\n';
  }
  out << '\n' << "Per-topic details\n";
  out << pad("topic", label_width) << pad("strategy", label_width);
  for (const std::string& name : metric_names()) {
    out << pad(name == "MAP" ? "AP" : name, col_width);  // per-topic value is AP
  }
  out << '\n';
  // group rows by topic, keeping the first strategy's topic order
  std::vector<std::string> topic_order;
  std::set<std::string> seen;
  for (const StrategyEvaluation& s : strategies) {
    for (const TopicMetrics& m : s.per_topic) {
      if (seen.insert(m.topic_id).second) topic_order.push_back(m.topic_id);
    }
  }
  for (const std::string& topic : topic_order) {
    for (const StrategyEvaluation& s : strategies) {
      for (const TopicMetrics& m : s.per_topic) {
        if (m.topic_id != topic) continue;
        out << pad(topic, label_width) << pad(s.strategy, label_width);
        for (const std::string& name : metric_names()) {
          out << pad(detail::fixed4(detail::metric_of(m, name)), col_width);
        }
        out << '\n';
      }
    }
  }
  return out.str();
}

inline nlohmann::json EvaluationReport::to_json() const {
  nlohmann::json jstrategies = nlohmann::json::object();
  for (const StrategyEvaluation& s : strategies) {
    nlohmann::json jagg{{"topics", s.aggregates.topic_count},
                        {"MAP", s.aggregates.mean_average_precision},
                        {"rPrecision", s.aggregates.mean_r_precision}};
    for (int k : kPrecisionCutoffs) {
      jagg["P@" + std::to_string(k)] = detail::metric_of(s.aggregates, "P@" + std::to_string(k));
    }
    nlohmann::json jsig = nlohmann::json::object();
    for (const auto& [name, sig] : s.significance) {
      nlohmann::json jt;
      if (std::isfinite(sig.t)) {
        jt = sig.t;
      } else {
        jt = nullptr;  // degenerate variance: |t| unbounded
      }
      jsig[name] = nlohmann::json{{"t", jt},
                                  {"df", sig.degrees_of_freedom},
                                  {"p", sig.p_value},
                                  {"stars", sig.stars()},
                                  {"degenerate_variance", sig.degenerate_variance}};
    }
    nlohmann::json jtopics = nlohmann::json::array();
    for (const TopicMetrics& m : s.per_topic) {
      nlohmann::json jm{{"topic", m.topic_id},
                        {"AP", m.average_precision},
                        {"rPrecision", m.r_precision},
                        {"relevant", m.relevant_count}};
      for (int k : kPrecisionCutoffs) jm["P@" + std::to_string(k)] = m.precision_at.at(k);
      jtopics.push_back(std::move(jm));
    }
    jstrategies[s.strategy] =
        nlohmann::json{{"aggregates", std::move(jagg)},
                       {"significance", std::move(jsig)},
                       {"per_topic", std::move(jtopics)},
                       {"excluded_topics", s.excluded_topics},
                       {"skipped_topics", s.skipped_topics},
                       {"fallback_topics", s.fallback_topics}};
  }
  return nlohmann::json{{"baseline", baseline}, {"strategies", std::move(jstrategies)}};
}

}  // namespace strec
