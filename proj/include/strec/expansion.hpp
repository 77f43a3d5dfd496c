#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "strec/corpus.hpp"
#include "strec/errors.hpp"
#include "strec/evaluation.hpp"
#include "strec/index.hpp"
#include "strec/recommender.hpp"
#include "strec/text.hpp"
#include "strec/topics.hpp"

namespace strec {

enum class Strategy { none, general, topic_class, best };

inline std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::none: return "none";
    case Strategy::general: return "general";
    case Strategy::topic_class: return "topic-class";
    case Strategy::best: return "best";
  }
  return "?";
}

inline std::optional<Strategy> strategy_from_string(std::string_view s) {
  if (s == "none") return Strategy::none;
  if (s == "general") return Strategy::general;
  if (s == "topic-class") return Strategy::topic_class;
  if (s == "best") return Strategy::best;
  return std::nullopt;
}

/// Groups a topic's relevant documents by discipline prefix and returns the
/// label of the largest group; a document with codes under k distinct
/// prefixes counts once in each group. Ties break by ascending prefix.
inline std::string classify_topic(const Topic& topic, const Qrels& qrels, const Corpus& corpus,
                                  const DisciplineMap& map, int relevance_threshold = 1) {
  bool any_in_corpus = false;
  std::map<std::string, size_t> group_sizes;  // prefix -> documents
  for (const std::string& doc_id : qrels.relevant_docs(topic.id, relevance_threshold)) {
    const Document* doc = corpus.find(doc_id);
    if (!doc) continue;
    any_in_corpus = true;
    std::unordered_set<std::string> prefixes;
    for (const std::string& code : doc->classifications) {
      if (auto prefix = map.prefix_of(code)) prefixes.insert(*prefix);
    }
    for (const std::string& prefix : prefixes) ++group_sizes[prefix];
  }
  if (!any_in_corpus) {
    throw UnclassifiableError("topic " + topic.id + ": no relevant documents in the corpus");
  }
  if (group_sizes.empty()) {
    throw UnclassifiableError("topic " + topic.id +
                              ": no relevant document carries a mapped classification");
  }
  // ascending map order makes the first maximal group the tie winner
  const std::string* best_prefix = nullptr;
  size_t best_size = 0;
  for (const auto& [prefix, size] : group_sizes) {
    if (size > best_size) {
      best_prefix = &prefix;
      best_size = size;
    }
  }
  return map.label_for(*best_prefix);
}

/// Query = topic title tokens minus stopwords, each with weight 1.
inline WeightedQuery make_query(const Topic& topic, const StopwordSet& stopwords) {
  TokenStream tokens = tokenize(topic.title, stopwords);
  if (tokens.empty()) {
    throw EmptyQueryError("topic " + topic.id + ": query empty after stopword removal");
  }
  WeightedQuery query;
  query.terms.reserve(tokens.size());
  for (std::string& token : tokens) query.terms.push_back({std::move(token), 1.0});
  return query;
}

struct ExpansionPlan {
  std::string topic_id;
  Strategy strategy = Strategy::none;
  std::string model_label;             // empty for strategy none
  std::vector<Suggestion> suggestions; // the terms used for expansion
  WeightedQuery final_query;
  bool fallback = false;               // fell back to the global model
};

/// Expands the query with the model's top-n suggestions: each suggested
/// descriptor is tokenized, and its tokens are appended with weight w.
/// Expansion tokens already present (in the original query or an earlier
/// suggestion) are dropped; original weights are untouched.
inline ExpansionPlan expand(const WeightedQuery& query, const RecommenderModel& model,
                            size_t n, double w, const StopwordSet& stopwords) {
  if (query.terms.empty()) throw EmptyQueryError("expand: query has no terms");
  if (n == 0) throw IntegrityError("expand: n must be >= 1");
  if (w <= 0.0) throw IntegrityError("expand: expansion weight must be > 0");
  ExpansionPlan plan;
  plan.model_label = model.label();
  plan.final_query = query;
  TokenStream query_tokens;
  std::unordered_set<std::string> present;
  for (const WeightedTerm& term : query.terms) {
    query_tokens.push_back(term.token);
    present.insert(term.token);
  }
  plan.suggestions = model.recommend(query_tokens, n);
  for (const Suggestion& suggestion : plan.suggestions) {
    for (const std::string& token : tokenize(suggestion.descriptor, stopwords)) {
      if (present.insert(token).second) {
        plan.final_query.terms.push_back({token, w});
      }
    }
  }
  return plan;
}

/// The global recommender plus one per discipline label.
struct ModelSet {
  RecommenderModel global;
  std::map<std::string, RecommenderModel> disciplines;

  const RecommenderModel& by_label(const std::string& label) const {
    if (label == "global") return global;
    auto it = disciplines.find(label);
    if (it == disciplines.end()) {
      throw IntegrityError("no recommender model for discipline \"" + label + "\"");
    }
    return it->second;
  }
};

struct TopicOutcome {
  std::string topic_id;
  bool skipped = false;
  std::string skip_reason;
  ExpansionPlan plan;
  RankedList ranking;
};

struct StrategyRun {
  Strategy strategy = Strategy::none;
  std::vector<TopicOutcome> outcomes;  // topic order

  std::vector<RankedList> rankings() const {
    std::vector<RankedList> lists;
    for (const TopicOutcome& o : outcomes) {
      if (!o.skipped) lists.push_back(o.ranking);
    }
    return lists;
  }
};

namespace detail {

inline double candidate_average_precision(const RankedList& ranking, const Qrels& qrels,
                                          int relevance_threshold) {
  try {
    return evaluate_topic(ranking, qrels, relevance_threshold).average_precision;
  } catch (const UnjudgedTopicError&) {
    return 0.0;
  }
}

}  // namespace detail

/// Runs one expansion strategy over all topics. Per-topic failures
/// (empty query) skip the topic and are flagged, not fatal. Topics that
/// cannot be classified under topic-class, and topics without judged
/// relevant documents under best, fall back to the global model.
inline StrategyRun run_strategy(const std::vector<Topic>& topics, const Qrels& qrels,
                                const Corpus& corpus, const InvertedIndex& index,
                                const ModelSet& models, const DisciplineMap& map,
                                Strategy strategy, size_t n, double w, size_t depth,
                                const StopwordSet& stopwords, int relevance_threshold = 1) {
  StrategyRun run;
  run.strategy = strategy;
  for (const Topic& topic : topics) {
    TopicOutcome outcome;
    outcome.topic_id = topic.id;
    WeightedQuery query;
    try {
      query = make_query(topic, stopwords);
    } catch (const EmptyQueryError& e) {
      outcome.skipped = true;
      outcome.skip_reason = e.what();
      run.outcomes.push_back(std::move(outcome));
      continue;
    }
    switch (strategy) {
      case Strategy::none:
        outcome.plan.final_query = query;
        break;
      case Strategy::general:
        outcome.plan = expand(query, models.global, n, w, stopwords);
        break;
      case Strategy::topic_class: {
        try {
          const std::string label = classify_topic(topic, qrels, corpus, map, relevance_threshold);
          outcome.plan = expand(query, models.by_label(label), n, w, stopwords);
        } catch (const UnclassifiableError&) {
          outcome.plan = expand(query, models.global, n, w, stopwords);
          outcome.plan.fallback = true;
        }
        break;
      }
      case Strategy::best: {
        if (qrels.relevant_count(topic.id, relevance_threshold) == 0) {
          outcome.plan = expand(query, models.global, n, w, stopwords);
          outcome.plan.fallback = true;
          break;
        }
        bool have_candidate = false;
        double best_ap = -1.0;
        ExpansionPlan best_plan;
        RankedList best_ranking;
        for (const auto& [label, model] : models.disciplines) {
          ExpansionPlan plan = expand(query, model, n, w, stopwords);
          RankedList ranking = index.search(plan.final_query, depth);
          ranking.topic_id = topic.id;
          const double ap = detail::candidate_average_precision(ranking, qrels, relevance_threshold);
          if (!have_candidate || ap > best_ap) {
            have_candidate = true;
            best_ap = ap;
            best_plan = std::move(plan);
            best_ranking = std::move(ranking);
          }
        }
        if (!have_candidate) {
          // no discipline models at all
          outcome.plan = expand(query, models.global, n, w, stopwords);
          outcome.plan.fallback = true;
          break;
        }
        outcome.plan = std::move(best_plan);
        outcome.plan.topic_id = topic.id;
        outcome.plan.strategy = strategy;
        outcome.ranking = std::move(best_ranking);
        run.outcomes.push_back(std::move(outcome));
        continue;
      }
    }
    outcome.plan.topic_id = topic.id;
    outcome.plan.strategy = strategy;
    outcome.ranking = index.search(outcome.plan.final_query, depth);
    outcome.ranking.topic_id = topic.id;
    run.outcomes.push_back(std::move(outcome));
  }
  return run;
}

/// JSON Lines audit trail: one object per topic with the chosen model, the
/// suggestions and the final weighted query.
inline void write_plans_jsonl(std::ostream& out, const StrategyRun& run) {
  for (const TopicOutcome& o : run.outcomes) {
    nlohmann::json j{{"topic", o.topic_id}, {"strategy", to_string(run.strategy)}};
    if (o.skipped) {
      j["skipped"] = true;
      j["reason"] = o.skip_reason;
    } else {
      j["skipped"] = false;
      j["model"] = o.plan.model_label;
      j["fallback"] = o.plan.fallback;
      nlohmann::json jsuggestions = nlohmann::json::array();
      for (const Suggestion& s : o.plan.suggestions) {
        jsuggestions.push_back({{"descriptor", s.descriptor}, {"score", s.score}});
      }
      j["suggestions"] = std::move(jsuggestions);
      nlohmann::json jquery = nlohmann::json::array();
      for (const WeightedTerm& t : o.plan.final_query.terms) {
        jquery.push_back({{"term", t.token}, {"weight", t.weight}});
      }
      j["query"] = std::move(jquery);
    }
    out << j.dump() << '\n';
  }
}

}  // namespace strec
