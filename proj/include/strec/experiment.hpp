#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "strec/corpus.hpp"
#include "strec/errors.hpp"
#include "strec/evaluation.hpp"
#include "strec/expansion.hpp"
#include "strec/index.hpp"
#include "strec/recommender.hpp"
#include "strec/text.hpp"
#include "strec/topics.hpp"

namespace strec {

namespace fs = std::filesystem;

struct ExperimentConfig {
  fs::path corpus_path;
  fs::path discipline_map_path;
  fs::path stopword_path;
  fs::path topics_path;
  fs::path qrels_path;
  size_t expansion_terms = 4;   // n: suggestions used per query
  double expansion_weight = 0.5;
  size_t depth = 1000;
  std::vector<Strategy> strategies{Strategy::none, Strategy::general, Strategy::topic_class,
                                   Strategy::best};
  fs::path output_dir;
  std::string run_tag = "strec";
  std::string baseline = "general";
  int relevance_threshold = 1;
  std::optional<fs::path> models_dir;   // load pre-built models instead of rebuilding
  std::optional<fs::path> index_cache;  // binary index cache location

  void validate() const {
    if (expansion_terms == 0) throw IntegrityError("config: n must be >= 1");
    if (depth == 0) throw IntegrityError("config: depth must be >= 1");
    if (expansion_weight <= 0.0) throw IntegrityError("config: weight must be > 0");
    if (strategies.empty()) throw IntegrityError("config: no strategies selected");
  }
};

inline ExperimentConfig read_config(const nlohmann::json& j, const fs::path& base_dir,
                                    const std::string& name = "config") {
  if (!j.is_object()) throw ParseError(name + ": expected a JSON object");
  ExperimentConfig config;
  auto path_field = [&](const char* key, fs::path& out, bool required) {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) throw ParseError(name + ": missing field \"" + std::string(key) + "\"");
      return;
    }
    if (!it->is_string()) throw ParseError(name + ": field \"" + std::string(key) + "\" must be a string");
    fs::path p = it->get<std::string>();
    out = p.is_absolute() ? p : base_dir / p;
  };
  path_field("corpus", config.corpus_path, true);
  path_field("discipline_map", config.discipline_map_path, true);
  path_field("stopwords", config.stopword_path, true);
  path_field("topics", config.topics_path, true);
  path_field("qrels", config.qrels_path, true);
  path_field("output_dir", config.output_dir, true);
  if (j.contains("n")) config.expansion_terms = j["n"].get<size_t>();
  if (j.contains("weight")) config.expansion_weight = j["weight"].get<double>();
  if (j.contains("depth")) config.depth = j["depth"].get<size_t>();
  if (j.contains("tag")) config.run_tag = j["tag"].get<std::string>();
  if (j.contains("baseline")) config.baseline = j["baseline"].get<std::string>();
  if (j.contains("relevance_threshold")) {
    config.relevance_threshold = j["relevance_threshold"].get<int>();
  }
  if (j.contains("strategies")) {
    config.strategies.clear();
    for (const auto& s : j["strategies"]) {
      auto strategy = strategy_from_string(s.get<std::string>());
      if (!strategy) throw ParseError(name + ": unknown strategy \"" + s.get<std::string>() + "\"");
      config.strategies.push_back(*strategy);
    }
  }
  fs::path optional_path;
  if (j.contains("models_dir")) {
    path_field("models_dir", optional_path, false);
    config.models_dir = optional_path;
  }
  if (j.contains("index_cache")) {
    path_field("index_cache", optional_path, false);
    config.index_cache = optional_path;
  }
  config.validate();
  return config;
}

/// Relative paths in the file resolve against the config file's directory.
inline ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.filename().string() + ": " + e.what());
  }
  return read_config(j, path.parent_path(), path.filename().string());
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json j{{"corpus", config.corpus_path.string()},
                   {"discipline_map", config.discipline_map_path.string()},
                   {"stopwords", config.stopword_path.string()},
                   {"topics", config.topics_path.string()},
                   {"qrels", config.qrels_path.string()},
                   {"n", config.expansion_terms},
                   {"weight", config.expansion_weight},
                   {"depth", config.depth},
                   {"output_dir", config.output_dir.string()},
                   {"tag", config.run_tag},
                   {"baseline", config.baseline},
                   {"relevance_threshold", config.relevance_threshold}};
  nlohmann::json strategies = nlohmann::json::array();
  for (Strategy s : config.strategies) strategies.push_back(to_string(s));
  j["strategies"] = std::move(strategies);
  if (config.models_dir) j["models_dir"] = config.models_dir->string();
  if (config.index_cache) j["index_cache"] = config.index_cache->string();
  return j;
}

/// FNV-1a 64-bit over the canonical config JSON; provenance only.
inline std::string config_hash(const ExperimentConfig& config) {
  const std::string bytes = config_to_json(config).dump();
  uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

// --- ingest summary (corpus overview shaped like the model-table) ---

struct DisciplineSummary {
  std::string label;
  size_t documents = 0;
  size_t terms = 0;  // controlled-vocabulary terms in the partition
};

struct IngestSummary {
  size_t documents = 0;
  size_t vocabulary = 0;
  size_t unmapped = 0;
  std::vector<DisciplineSummary> disciplines;  // ascending by label

  std::string to_text() const {
    std::ostringstream out;
    auto pad = [](std::string s, size_t width) {
      if (s.size() < width) s.append(width - s.size(), ' ');
      return s;
    };
    size_t label_width = 12;
    for (const DisciplineSummary& d : disciplines) {
      label_width = std::max(label_width, d.label.size() + 2);
    }
    out << pad("Partition", label_width) << pad("#Docs", 10) << pad("#CT", 10) << '\n';
    for (const DisciplineSummary& d : disciplines) {
      out << pad(d.label, label_width) << pad(std::to_string(d.documents), 10)
          << pad(std::to_string(d.terms), 10) << '\n';
    }
    out << pad("global", label_width) << pad(std::to_string(documents), 10)
        << pad(std::to_string(vocabulary), 10) << '\n';
    out << "unmapped documents: " << unmapped << '\n';
    return out.str();
  }
};

inline IngestSummary summarize_corpus(const Corpus& corpus, const DisciplineMap& map) {
  IngestSummary summary;
  summary.documents = corpus.size();
  summary.vocabulary = corpus.descriptor_vocabulary().size();
  Partitions parts = partition(corpus, map);
  summary.unmapped = parts.unmapped_documents;
  for (const auto& [label, sub] : parts.by_label) {
    summary.disciplines.push_back({label, sub.size(), sub.descriptor_vocabulary().size()});
  }
  return summary;
}

// --- model building and persistence ---

inline std::string model_filename(const std::string& label) {
  std::string slug;
  for (char c : fold_case(label)) {
    if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      slug.push_back(c);
    } else if (!slug.empty() && slug.back() != '-') {
      slug.push_back('-');
    }
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return "str-" + slug + ".json";
}

/// Builds the global model plus one model per non-empty partition.
/// Labels of empty partitions are reported through `skipped`.
inline ModelSet build_models(const Corpus& corpus, const DisciplineMap& map,
                             const StopwordSet& stopwords,
                             std::vector<std::string>* skipped = nullptr) {
  if (corpus.empty()) throw EmptyPartitionError("build_models: corpus is empty");
  ModelSet models;
  models.global = RecommenderModel::build(corpus, stopwords, "global");
  Partitions parts = partition(corpus, map);
  for (const auto& [prefix, label] : map.entries()) {
    auto it = parts.by_label.find(label);
    if (it == parts.by_label.end()) {
      if (skipped) skipped->push_back(label);
      continue;
    }
    models.disciplines.emplace(label, RecommenderModel::build(it->second, stopwords, label));
  }
  return models;
}

inline std::vector<fs::path> write_models(const ModelSet& models, const fs::path& dir) {
  fs::create_directories(dir);
  std::map<std::string, std::string> used;  // filename -> label
  std::vector<fs::path> files;
  auto write_one = [&](const RecommenderModel& model) {
    const std::string filename = model_filename(model.label());
    auto [it, inserted] = used.emplace(filename, model.label());
    if (!inserted) {
      throw IntegrityError("model file name collision between labels \"" + it->second +
                           "\" and \"" + model.label() + "\"");
    }
    fs::path path = dir / filename;
    model.save(path);
    files.push_back(path);
  };
  write_one(models.global);
  for (const auto& [label, model] : models.disciplines) write_one(model);
  return files;
}

/// Loads every `str-*.json` in the directory; the global model must be
/// among them.
inline ModelSet load_models(const fs::path& dir) {
  ModelSet models;
  bool have_global = false;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("str-", 0) == 0 && name.size() > 9 &&
        name.compare(name.size() - 5, 5, ".json") == 0) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const fs::path& path : files) {
    RecommenderModel model = RecommenderModel::load(path);
    if (model.label() == "global") {
      models.global = std::move(model);
      have_global = true;
    } else {
      std::string label = model.label();
      models.disciplines.emplace(std::move(label), std::move(model));
    }
  }
  if (!have_global) {
    throw IntegrityError("no global model (str-global.json) in " + dir.string());
  }
  return models;
}

// --- full experiment ---

struct ExperimentResult {
  EvaluationReport report;
  std::vector<fs::path> files;  // everything written, provenance last
};

namespace detail {

inline InvertedIndex obtain_index(const ExperimentConfig& config, const Corpus& corpus,
                                  const StopwordSet& stopwords) {
  if (config.index_cache) {
    if (auto cached = InvertedIndex::load_cache(*config.index_cache)) {
      if (cached->doc_count() == corpus.size()) return std::move(*cached);
    }
    InvertedIndex index = InvertedIndex::build(corpus, stopwords);
    fs::create_directories(config.index_cache->parent_path());
    index.save_cache(*config.index_cache);
    return index;
  }
  return InvertedIndex::build(corpus, stopwords);
}

}  // namespace detail

/// Runs every configured strategy, writing per-strategy TREC run files and
/// expansion-plan audit files, the evaluation report (text + JSON) and a
/// provenance sidecar into the output directory.
inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const StopwordSet stopwords = load_stopwords(config.stopword_path);
  const Corpus corpus = load_corpus(config.corpus_path);
  const DisciplineMap map = load_discipline_map(config.discipline_map_path);
  const std::vector<Topic> topics = load_topics(config.topics_path);
  const Qrels qrels = load_qrels(config.qrels_path);
  const InvertedIndex index = detail::obtain_index(config, corpus, stopwords);
  std::vector<std::string> skipped_partitions;
  const ModelSet models = config.models_dir
                              ? load_models(*config.models_dir)
                              : build_models(corpus, map, stopwords, &skipped_partitions);

  fs::create_directories(config.output_dir);
  ExperimentResult result;
  std::vector<StrategyEvaluation> evaluations;
  for (Strategy strategy : config.strategies) {
    StrategyRun run = run_strategy(topics, qrels, corpus, index, models, map, strategy,
                                   config.expansion_terms, config.expansion_weight,
                                   config.depth, stopwords, config.relevance_threshold);
    const std::string slabel = to_string(strategy);
    fs::path run_path = config.output_dir / (config.run_tag + "." + slabel + ".run");
    {
      std::ofstream out(run_path);
      if (!out) throw Error("cannot write run file: " + run_path.string());
      write_trec_run(out, run.rankings(), config.run_tag + "-" + slabel);
    }
    result.files.push_back(run_path);
    fs::path plans_path = config.output_dir / (config.run_tag + "." + slabel + ".plans.jsonl");
    {
      std::ofstream out(plans_path);
      if (!out) throw Error("cannot write plans file: " + plans_path.string());
      write_plans_jsonl(out, run);
    }
    result.files.push_back(plans_path);

    StrategyEvaluation eval;
    eval.strategy = slabel;
    for (const TopicOutcome& outcome : run.outcomes) {
      if (outcome.skipped) {
        eval.skipped_topics.push_back(outcome.topic_id);
        continue;
      }
      if (outcome.plan.fallback) eval.fallback_topics.push_back(outcome.topic_id);
      try {
        eval.per_topic.push_back(
            evaluate_topic(outcome.ranking, qrels, config.relevance_threshold));
      } catch (const UnjudgedTopicError&) {
        eval.excluded_topics.push_back(outcome.topic_id);
      }
    }
    if (!eval.per_topic.empty()) eval.aggregates = aggregate(eval.per_topic, slabel);
    evaluations.push_back(std::move(eval));
  }

  result.report = build_report(std::move(evaluations), config.baseline);
  fs::path text_path = config.output_dir / (config.run_tag + ".report.txt");
  {
    std::ofstream out(text_path);
    if (!out) throw Error("cannot write report: " + text_path.string());
    out << result.report.to_text();
  }
  result.files.push_back(text_path);
  fs::path json_path = config.output_dir / (config.run_tag + ".report.json");
  {
    nlohmann::json j = result.report.to_json();
    j["run_tag"] = config.run_tag;
    j["config_hash"] = config_hash(config);
    if (!skipped_partitions.empty()) j["skipped_partitions"] = skipped_partitions;
    std::ofstream out(json_path);
    if (!out) throw Error("cannot write report: " + json_path.string());
    out << j.dump(2) << '\n';
  }
  result.files.push_back(json_path);

  fs::path provenance_path = config.output_dir / "provenance.json";
  {
    nlohmann::json files = nlohmann::json::array();
    for (const fs::path& p : result.files) files.push_back(p.filename().string());
    nlohmann::json j{{"run_tag", config.run_tag},
                     {"config_hash", config_hash(config)},
                     {"config", config_to_json(config)},
                     {"files", std::move(files)}};
    std::ofstream out(provenance_path);
    if (!out) throw Error("cannot write provenance: " + provenance_path.string());
    out << j.dump(2) << '\n';
  }
  result.files.push_back(provenance_path);
  return result;
}

}  // namespace strec
