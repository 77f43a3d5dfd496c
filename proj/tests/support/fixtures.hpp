#pragma once

// Shared test fixtures: the micro corpora used in unit examples, randomized
// generators for property tests, and the synthetic two-discipline benchmark.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "strec/strec.hpp"

namespace fixtures {

namespace fs = std::filesystem;

inline strec::StopwordSet tiny_stopwords() {
  return {"the", "of", "a", "an", "and", "in", "to", "for"};
}

inline std::string two_digits(size_t k) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02zu", k);
  return buf;
}

// d1/d2 pair with shared and distinct descriptors; the smallest interesting
// recommender input.
inline strec::Corpus micro_recommender_corpus() {
  std::vector<strec::Document> docs(2);
  docs[0].id = "d1";
  docs[0].title = "bilingual education school";
  docs[0].descriptors = {"Multilingualism", "Child"};
  docs[1].id = "d2";
  docs[1].title = "bilingual children";
  docs[1].descriptors = {"Multilingualism", "Speech"};
  return strec::Corpus(std::move(docs));
}

inline strec::Corpus micro_index_corpus() {
  std::vector<strec::Document> docs(3);
  docs[0].id = "d1";
  docs[0].title = "bilingual education school";
  docs[1].id = "d2";
  docs[1].title = "bilingual children";
  docs[2].id = "d3";
  docs[2].title = "tax policy";
  return strec::Corpus(std::move(docs));
}

// --- randomized corpora ---

struct RandomCorpusParams {
  size_t docs = 30;
  size_t token_vocab = 30;
  size_t min_tokens = 3;
  size_t max_tokens = 12;
  size_t descriptor_vocab = 10;
  size_t max_descriptors = 4;
  size_t max_codes = 3;
};

inline strec::Corpus random_corpus(std::mt19937& rng, const RandomCorpusParams& p = {}) {
  std::uniform_int_distribution<size_t> n_tokens(p.min_tokens, p.max_tokens);
  std::uniform_int_distribution<size_t> token_pick(0, p.token_vocab - 1);
  std::uniform_int_distribution<size_t> n_desc(0, p.max_descriptors);
  std::uniform_int_distribution<size_t> desc_pick(0, p.descriptor_vocab - 1);
  std::uniform_int_distribution<size_t> n_codes(0, p.max_codes);
  std::uniform_int_distribution<int> digit(0, 9);
  std::uniform_int_distribution<int> case_style(0, 2);
  const char* prefixes[] = {"101", "102", "201", "202", "999"};
  std::uniform_int_distribution<size_t> prefix_pick(0, 4);

  std::vector<strec::Document> docs;
  for (size_t d = 0; d < p.docs; ++d) {
    strec::Document doc;
    doc.id = "doc" + std::to_string(d);
    const size_t len = n_tokens(rng);
    for (size_t i = 0; i < len; ++i) {
      if (!doc.title.empty()) doc.title.push_back(' ');
      doc.title += "w" + std::to_string(token_pick(rng));
    }
    const size_t nd = n_desc(rng);
    std::set<size_t> seen;
    for (size_t i = 0; i < nd; ++i) {
      size_t pick = desc_pick(rng);
      if (!seen.insert(pick).second) continue;
      std::string name = "term" + std::to_string(pick);
      switch (case_style(rng)) {  // random display case exercises folding
        case 0: break;
        case 1: name[0] = static_cast<char>(name[0] - 'a' + 'A'); break;
        default:
          for (char& c : name) {
            if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
          }
      }
      doc.descriptors.push_back(name);
    }
    const size_t nc = n_codes(rng);
    for (size_t i = 0; i < nc; ++i) {
      std::string code = prefixes[prefix_pick(rng)];
      code.push_back(static_cast<char>('0' + digit(rng)));
      code.push_back(static_cast<char>('0' + digit(rng)));
      doc.classifications.push_back(code);
    }
    docs.push_back(std::move(doc));
  }
  return strec::Corpus(std::move(docs));
}

inline strec::DisciplineMap random_corpus_map() {
  return strec::DisciplineMap(
      3, {{"101", "History"}, {"102", "Sociology"}, {"201", "Economics"}, {"202", "Education"}});
}

// --- randomized rankings with judgments (for metric cross-checks) ---

struct RankingFixture {
  strec::RankedList list;
  std::vector<std::string> ranked_ids;
  std::set<std::string> relevant;  // judged relevant; may include unretrieved docs
  strec::Qrels qrels;
};

inline RankingFixture random_ranking(std::mt19937& rng, const std::string& topic_id) {
  std::uniform_int_distribution<size_t> n_retrieved(1, 100);
  std::uniform_int_distribution<size_t> n_relevant(1, 20);
  std::uniform_int_distribution<int> grade(1, 3);
  std::vector<std::string> universe;
  for (size_t i = 0; i < 120; ++i) universe.push_back("doc" + std::to_string(100 + i));
  std::shuffle(universe.begin(), universe.end(), rng);

  RankingFixture fx;
  fx.list.topic_id = topic_id;
  const size_t retrieved = n_retrieved(rng);
  fx.ranked_ids.assign(universe.begin(), universe.begin() + retrieved);
  double score = 100.0;
  for (size_t i = 0; i < fx.ranked_ids.size(); ++i) {
    score -= 0.25;
    fx.list.entries.push_back({fx.ranked_ids[i], score, static_cast<uint32_t>(i + 1)});
  }
  // relevant docs drawn from the whole universe so some are never retrieved
  std::vector<std::string> pool = universe;
  std::shuffle(pool.begin(), pool.end(), rng);
  const size_t rel = n_relevant(rng);
  for (size_t i = 0; i < rel; ++i) {
    fx.relevant.insert(pool[i]);
    fx.qrels.add(topic_id, pool[i], grade(rng));
  }
  for (size_t i = rel; i < rel + 5 && i < pool.size(); ++i) {
    fx.qrels.add(topic_id, pool[i], 0);  // judged non-relevant
  }
  return fx;
}

// --- randomized classification fixture ---

struct ClassificationFixture {
  strec::Topic topic;
  strec::Qrels qrels;
  strec::Corpus corpus;
  strec::DisciplineMap map;
};

inline ClassificationFixture random_classification(std::mt19937& rng) {
  ClassificationFixture fx;
  fx.map = random_corpus_map();
  fx.corpus = random_corpus(rng);
  fx.topic = {"t1", "synthetic topic"};
  std::vector<std::string> ids;
  for (const strec::Document& d : fx.corpus.documents()) ids.push_back(d.id);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::uniform_int_distribution<size_t> n_relevant(1, 20);
  std::uniform_int_distribution<int> grade(0, 3);  // grade 0 = judged non-relevant
  const size_t judged = std::min(n_relevant(rng) + 4, ids.size());
  for (size_t i = 0; i < judged; ++i) fx.qrels.add(fx.topic.id, ids[i], grade(rng));
  return fx;
}

// --- synthetic two-discipline benchmark ---
//
// Two disciplines with disjoint descriptor vocabularies share 20 theme
// tokens. Economics sub-collections are larger and carry four planted
// descriptors per theme, so the global recommender drags every theme query
// toward economics; the sociology topics are rescued only by the
// discipline-specific model. 600 documents, 40 topics.

struct Benchmark {
  strec::Corpus corpus;
  strec::DisciplineMap map;
  std::vector<strec::Topic> topics;
  strec::Qrels qrels;
  strec::StopwordSet stopwords;
};

inline Benchmark two_discipline_benchmark() {
  Benchmark b;
  b.stopwords = tiny_stopwords();
  b.map = strec::DisciplineMap(3, {{"102", "Sociology"}, {"201", "Economics"}});
  std::vector<strec::Document> docs;
  for (size_t k = 0; k < 20; ++k) {
    const std::string kk = two_digits(k);
    const std::string theme = "theme" + kk;
    for (size_t i = 0; i < 12; ++i) {
      strec::Document d;
      d.id = "a" + kk + "-" + two_digits(i);
      d.title = theme + " sociofix" + kk + " sociobase";
      d.abstract = "filler";
      d.descriptors = {"Sociofix" + kk, "Sociobase"};
      d.classifications = {"102" + kk};
      docs.push_back(std::move(d));
    }
    for (size_t i = 0; i < 18; ++i) {
      strec::Document d;
      d.id = "b" + kk + "-" + two_digits(i);
      d.title = theme + " econfix" + kk + " econguide" + kk + " econplan" + kk + " econview" +
                kk + " econbase";
      d.abstract = "filler";
      d.descriptors = {"Econfix" + kk, "Econguide" + kk, "Econplan" + kk, "Econview" + kk,
                       "Econbase"};
      d.classifications = {"201" + kk};
      docs.push_back(std::move(d));
    }
  }
  b.corpus = strec::Corpus(std::move(docs));
  for (size_t k = 0; k < 20; ++k) {
    const std::string kk = two_digits(k);
    b.topics.push_back({"ta" + kk, "the theme" + kk});
    for (size_t i = 0; i < 12; ++i) b.qrels.add("ta" + kk, "a" + kk + "-" + two_digits(i), 1);
    b.qrels.add("ta" + kk, "b" + kk + "-00", 0);
    b.qrels.add("ta" + kk, "b" + kk + "-01", 0);
  }
  for (size_t k = 0; k < 20; ++k) {
    const std::string kk = two_digits(k);
    b.topics.push_back({"tb" + kk, "the theme" + kk});
    for (size_t i = 0; i < 18; ++i) {
      b.qrels.add("tb" + kk, "b" + kk + "-" + two_digits(i), i % 2 == 0 ? 2 : 1);
    }
    b.qrels.add("tb" + kk, "a" + kk + "-00", 0);
  }
  return b;
}

// --- on-disk fixture writers ---

inline void write_discipline_map(const strec::DisciplineMap& map, const fs::path& path) {
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [prefix, label] : map.entries()) entries[prefix] = label;
  nlohmann::json j{{"prefix_length", map.prefix_length()}, {"entries", std::move(entries)}};
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

inline void write_topics(const std::vector<strec::Topic>& topics, const fs::path& path) {
  std::ofstream out(path);
  for (const strec::Topic& t : topics) out << t.id << '\t' << t.title << '\n';
}

inline void write_qrels(const strec::Qrels& qrels, const fs::path& path) {
  std::ofstream out(path);
  for (const auto& [topic, docs] : qrels.judgments()) {
    for (const auto& [doc, grade] : docs) out << topic << " 0 " << doc << ' ' << grade << '\n';
  }
}

inline void write_stopwords(const strec::StopwordSet& stopwords, const fs::path& path) {
  std::set<std::string> sorted(stopwords.begin(), stopwords.end());
  std::ofstream out(path);
  for (const std::string& s : sorted) out << s << '\n';
}

// Writes every input file plus a config; returns the config path.
inline fs::path write_experiment_dir(const Benchmark& b, const fs::path& dir,
                                     const std::string& tag, size_t depth = 1000) {
  fs::create_directories(dir);
  strec::save_corpus(b.corpus, dir / "corpus.jsonl");
  write_discipline_map(b.map, dir / "disciplines.json");
  write_topics(b.topics, dir / "topics.tsv");
  write_qrels(b.qrels, dir / "qrels.txt");
  write_stopwords(b.stopwords, dir / "stopwords.txt");
  nlohmann::json j{{"corpus", "corpus.jsonl"},
                   {"discipline_map", "disciplines.json"},
                   {"stopwords", "stopwords.txt"},
                   {"topics", "topics.tsv"},
                   {"qrels", "qrels.txt"},
                   {"output_dir", "out"},
                   {"tag", tag},
                   {"depth", depth},
                   {"strategies", {"none", "general", "topic-class", "best"}}};
  fs::path config_path = dir / "config.json";
  std::ofstream out(config_path);
  out << j.dump(2) << '\n';
  return config_path;
}

inline fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("strec-tests-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace fixtures
