// strec — discipline-aware search-term recommendation and query expansion.
//
// Subcommands: ingest, build-str, recommend, classify, experiment, evaluate.
// Exit codes: 0 success, 1 usage error, 2 data/integrity error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "strec/strec.hpp"

namespace {

struct Overrides {
  std::optional<size_t> n;
  std::optional<double> weight;
  std::optional<size_t> depth;
  std::optional<std::string> out;
  std::optional<std::string> tag;
  std::vector<std::string> strategies;
};

// Config file first, flags win.
strec::ExperimentConfig effective_config(const std::string& config_path, const Overrides& o) {
  strec::ExperimentConfig config = strec::load_config(config_path);
  if (o.n) config.expansion_terms = *o.n;
  if (o.weight) config.expansion_weight = *o.weight;
  if (o.depth) config.depth = *o.depth;
  if (o.out) config.output_dir = *o.out;
  if (o.tag) config.run_tag = *o.tag;
  if (!o.strategies.empty()) {
    config.strategies.clear();
    for (const std::string& s : o.strategies) {
      auto strategy = strec::strategy_from_string(s);
      if (!strategy) throw strec::IntegrityError("unknown strategy: " + s);
      config.strategies.push_back(*strategy);
    }
  }
  config.validate();
  return config;
}

strec::ModelSet obtain_models(const strec::ExperimentConfig& config, const strec::Corpus& corpus,
                              const strec::DisciplineMap& map,
                              const strec::StopwordSet& stopwords) {
  if (config.models_dir) return strec::load_models(*config.models_dir);
  return strec::build_models(corpus, map, stopwords);
}

int run_ingest(const strec::ExperimentConfig& config) {
  strec::Corpus corpus = strec::load_corpus(config.corpus_path);
  strec::DisciplineMap map = strec::load_discipline_map(config.discipline_map_path);
  strec::IngestSummary summary = strec::summarize_corpus(corpus, map);
  std::cout << summary.to_text();
  return 0;
}

int run_build_str(const strec::ExperimentConfig& config, const std::optional<std::string>& out) {
  strec::StopwordSet stopwords = strec::load_stopwords(config.stopword_path);
  strec::Corpus corpus = strec::load_corpus(config.corpus_path);
  strec::DisciplineMap map = strec::load_discipline_map(config.discipline_map_path);
  std::vector<std::string> skipped;
  strec::ModelSet models = strec::build_models(corpus, map, stopwords, &skipped);
  strec::fs::path dir = out ? strec::fs::path(*out)
                            : (config.models_dir ? *config.models_dir
                                                 : config.output_dir / "models");
  for (const strec::fs::path& path : strec::write_models(models, dir)) {
    std::cout << "wrote " << path.string() << '\n';
  }
  for (const std::string& label : skipped) {
    std::cerr << "warning: empty partition skipped: " << label << '\n';
  }
  return 0;
}

int run_recommend(const strec::ExperimentConfig& config, const std::string& query,
                  const std::string& model_label) {
  strec::StopwordSet stopwords = strec::load_stopwords(config.stopword_path);
  strec::Corpus corpus = strec::load_corpus(config.corpus_path);
  strec::DisciplineMap map = strec::load_discipline_map(config.discipline_map_path);
  strec::ModelSet models = obtain_models(config, corpus, map, stopwords);
  const strec::RecommenderModel& model = models.by_label(model_label);
  strec::TokenStream tokens = strec::tokenize(query, stopwords);
  if (tokens.empty()) throw strec::EmptyQueryError("query has no searchable tokens: " + query);
  for (const strec::Suggestion& s : model.recommend(tokens, config.expansion_terms)) {
    std::cout << s.descriptor << '\t' << strec::format_score(s.score) << '\n';
  }
  return 0;
}

int run_classify(const strec::ExperimentConfig& config, const std::string& topic_id) {
  std::vector<strec::Topic> topics = strec::load_topics(config.topics_path);
  const strec::Topic* topic = nullptr;
  for (const strec::Topic& t : topics) {
    if (t.id == topic_id) {
      topic = &t;
      break;
    }
  }
  if (!topic) throw strec::IntegrityError("unknown topic: " + topic_id);
  strec::Qrels qrels = strec::load_qrels(config.qrels_path);
  strec::Corpus corpus = strec::load_corpus(config.corpus_path);
  strec::DisciplineMap map = strec::load_discipline_map(config.discipline_map_path);
  std::cout << strec::classify_topic(*topic, qrels, corpus, map, config.relevance_threshold)
            << '\n';
  return 0;
}

int run_experiment_cmd(const strec::ExperimentConfig& config) {
  strec::ExperimentResult result = strec::run_experiment(config);
  for (const strec::fs::path& path : result.files) {
    std::cout << "wrote " << path.string() << '\n';
  }
  std::cout << '\n' << result.report.to_text();
  return 0;
}

int run_evaluate(const std::string& run_path, const std::string& qrels_path, int threshold,
                 bool as_json) {
  strec::TrecRun run = strec::load_trec_run(run_path);
  strec::Qrels qrels = strec::load_qrels(qrels_path);
  std::vector<strec::TopicMetrics> per_topic;
  std::vector<std::string> excluded;
  for (const strec::RankedList& list : run.lists) {
    try {
      per_topic.push_back(strec::evaluate_topic(list, qrels, threshold));
    } catch (const strec::UnjudgedTopicError&) {
      excluded.push_back(list.topic_id);
    }
  }
  if (per_topic.empty()) {
    throw strec::IntegrityError("no topic in the run has relevant judgments");
  }
  strec::AggregateMetrics agg = strec::aggregate(per_topic, run.tag);
  if (as_json) {
    nlohmann::json topics_json = nlohmann::json::array();
    for (const strec::TopicMetrics& m : per_topic) {
      nlohmann::json pk;
      for (const auto& [k, v] : m.precision_at) pk["P@" + std::to_string(k)] = v;
      topics_json.push_back({{"topic", m.topic_id},
                             {"AP", m.average_precision},
                             {"rPrecision", m.r_precision},
                             {"precision_at", std::move(pk)},
                             {"relevant", m.relevant_count}});
    }
    nlohmann::json agg_json;
    for (const std::string& name : strec::metric_names()) {
      agg_json[name] = strec::detail::metric_of(agg, name);
    }
    nlohmann::json j{{"run", agg.label},
                     {"topics", agg.topic_count},
                     {"aggregates", std::move(agg_json)},
                     {"per_topic", std::move(topics_json)},
                     {"excluded_topics", excluded}};
    std::cout << j.dump(2) << '\n';
    return 0;
  }
  auto pad = [](std::string s, size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
  };
  const size_t label_width = std::max<size_t>(10, agg.label.size() + 2);
  std::cout << pad("Run", label_width);
  for (const std::string& name : strec::metric_names()) std::cout << pad(name, 12);
  std::cout << '\n' << pad(agg.label, label_width);
  for (const std::string& name : strec::metric_names()) {
    std::cout << pad(strec::detail::fixed4(strec::detail::metric_of(agg, name)), 12);
  }
  std::cout << '\n' << "topics evaluated: " << agg.topic_count << '\n';
  if (!excluded.empty()) {
    std::cout << "excluded (no relevant judgments):";
    for (const std::string& id : excluded) std::cout << ' ' << id;
    std::cout << '\n';
  }
  std::cout << '\n' << pad("Topic", 10);
  for (const std::string& name : strec::metric_names()) {
    std::cout << pad(name == "MAP" ? "AP" : name, 12);
  }
  std::cout << '\n';
  for (const strec::TopicMetrics& m : per_topic) {
    std::cout << pad(m.topic_id, 10);
    for (const std::string& name : strec::metric_names()) {
      std::cout << pad(strec::detail::fixed4(strec::detail::metric_of(m, name)), 12);
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strec — search-term recommendation and query expansion toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  std::string query;
  std::string topic_id;
  std::string model_label = "global";
  std::string run_path;
  std::string qrels_path;
  int threshold = 1;
  bool as_json = false;

  auto add_config = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--n", overrides.n, "suggestions per query");
    cmd->add_option("--weight", overrides.weight, "expansion term weight");
    cmd->add_option("--depth", overrides.depth, "ranking depth");
    cmd->add_option("--out", overrides.out, "output directory");
    cmd->add_option("--tag", overrides.tag, "run tag");
  };

  CLI::App* ingest = app.add_subcommand("ingest", "validate the corpus and print a summary");
  add_config(ingest);

  CLI::App* build = app.add_subcommand("build-str", "build and write recommender models");
  add_config(build);
  build->add_option("--out", overrides.out, "model output directory");

  CLI::App* recommend = app.add_subcommand("recommend", "suggest descriptors for a query");
  add_config(recommend);
  recommend->add_option("query", query, "free-text query")->required();
  recommend->add_option("--model", model_label, "model label (default: global)");
  recommend->add_option("--n", overrides.n, "suggestions to print");

  CLI::App* classify = app.add_subcommand("classify", "assign a topic to a discipline");
  add_config(classify);
  classify->add_option("topic-id", topic_id, "topic identifier")->required();

  CLI::App* experiment = app.add_subcommand("experiment", "run the full expansion experiment");
  add_config(experiment);
  add_overrides(experiment);
  experiment->add_option("--strategy", overrides.strategies,
                         "strategy to run (repeatable): none, general, topic-class, best");

  CLI::App* evaluate = app.add_subcommand("evaluate", "score a TREC run against qrels");
  evaluate->add_option("run", run_path, "TREC run file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("qrels", qrels_path, "TREC qrels file")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--threshold", threshold, "relevance grade threshold (default 1)");
  evaluate->add_flag("--json", as_json, "emit JSON instead of text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*ingest) return run_ingest(effective_config(config_path, overrides));
    if (*build) return run_build_str(effective_config(config_path, overrides), overrides.out);
    if (*recommend) return run_recommend(effective_config(config_path, overrides), query, model_label);
    if (*classify) return run_classify(effective_config(config_path, overrides), topic_id);
    if (*experiment) return run_experiment_cmd(effective_config(config_path, overrides));
    if (*evaluate) return run_evaluate(run_path, qrels_path, threshold, as_json);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
