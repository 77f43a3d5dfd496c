#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "catch2/catch_amalgamated.hpp"
#include "strec/index.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using strec::InvertedIndex;
using strec::RankedList;
using strec::WeightedQuery;

namespace {

strec::Corpus one_doc(const std::string& id, const std::string& title) {
  std::vector<strec::Document> docs(1);
  docs[0].id = id;
  docs[0].title = title;
  return strec::Corpus(std::move(docs));
}

std::vector<std::string> ranked_ids(const RankedList& list) {
  std::vector<std::string> ids;
  for (const auto& e : list.entries) ids.push_back(e.doc_id);
  return ids;
}

}  // namespace

TEST_CASE("index counts term and document frequencies") {
  InvertedIndex index = InvertedIndex::build(one_doc("d", "tax tax policy"), {});
  CHECK(index.doc_count() == 1);
  CHECK(index.doc_length("d") == 3);
  CHECK(index.term_frequency("tax", "d") == 2);
  CHECK(index.term_frequency("policy", "d") == 1);
  CHECK(index.doc_freq("tax") == 1);
  CHECK(index.doc_freq("absent") == 0);
}

TEST_CASE("empty corpus builds an empty index") {
  InvertedIndex index = InvertedIndex::build(strec::Corpus(), {});
  CHECK(index.doc_count() == 0);
  CHECK(index.search(WeightedQuery{{{"tax", 1.0}}}, 10).entries.empty());
}

TEST_CASE("doc_freq matches a brute-force scan on random corpora") {
  std::mt19937 rng(42);
  strec::Corpus corpus = fixtures::random_corpus(rng, {.docs = 100});
  strec::StopwordSet stops{"w0", "w1"};
  std::set<std::string> oracle_stops(stops.begin(), stops.end());
  InvertedIndex index = InvertedIndex::build(corpus, stops);
  std::map<std::string, size_t> df;
  for (const strec::Document& doc : corpus.documents()) {
    std::set<std::string> distinct;
    for (const std::string& t : oracle::tokenize(doc.title + " " + doc.abstract, oracle_stops)) {
      distinct.insert(t);
    }
    for (const std::string& t : distinct) ++df[t];
  }
  for (const auto& [token, count] : df) CHECK(index.doc_freq(token) == count);
  for (const auto& [token, list] : index.postings()) CHECK(df.at(token) == list.size());
}

TEST_CASE("search scores the micro corpus per the tf-idf formula") {
  InvertedIndex index = InvertedIndex::build(fixtures::micro_index_corpus(), {});

  RankedList tax = index.search(WeightedQuery{{{"tax", 1.0}}}, 10);
  CHECK(ranked_ids(tax) == std::vector<std::string>{"d3"});

  RankedList bilingual = index.search(WeightedQuery{{{"bilingual", 1.0}}}, 10);
  REQUIRE(ranked_ids(bilingual) == std::vector<std::string>{"d2", "d1"});
  // equal tf and idf; the shorter document wins on length normalization
  const double idf = std::log(1.0 + 3.0 / 2.0);
  CHECK_THAT(bilingual.entries[0].score,
             Catch::Matchers::WithinAbs(idf / std::sqrt(2.0), 1e-12));
  CHECK_THAT(bilingual.entries[1].score,
             Catch::Matchers::WithinAbs(idf / std::sqrt(3.0), 1e-12));
  CHECK(bilingual.entries[0].rank == 1);
  CHECK(bilingual.entries[1].rank == 2);
}

TEST_CASE("search input validation") {
  InvertedIndex index = InvertedIndex::build(fixtures::micro_index_corpus(), {});
  CHECK_THROWS_AS(index.search(WeightedQuery{}, 10), strec::EmptyQueryError);
  CHECK_THROWS_AS(index.search(WeightedQuery{{{"tax", 1.0}}}, 0), strec::IntegrityError);
  CHECK_THROWS_AS(index.search(WeightedQuery{{{"tax", 0.0}}}, 10), strec::IntegrityError);
}

TEST_CASE("score ties are broken by ascending document id") {
  std::vector<strec::Document> docs(3);
  docs[0].id = "z";
  docs[0].title = "alpha beta";
  docs[1].id = "a";
  docs[1].title = "alpha gamma";
  docs[2].id = "m";
  docs[2].title = "alpha delta";
  InvertedIndex index = InvertedIndex::build(strec::Corpus(std::move(docs)), {});
  RankedList list = index.search(WeightedQuery{{{"alpha", 1.0}}}, 10);
  CHECK(ranked_ids(list) == std::vector<std::string>{"a", "m", "z"});
}

TEST_CASE("results at a smaller depth are a prefix of deeper results") {
  std::mt19937 rng(9);
  strec::Corpus corpus = fixtures::random_corpus(rng, {.docs = 60});
  InvertedIndex index = InvertedIndex::build(corpus, {});
  WeightedQuery query{{{"w3", 1.0}, {"w7", 0.5}, {"w11", 2.0}}};
  RankedList shallow = index.search(query, 5);
  RankedList deep = index.search(query, 50);
  REQUIRE(shallow.entries.size() <= 5);
  for (size_t i = 0; i < shallow.entries.size(); ++i) {
    CHECK(shallow.entries[i].doc_id == deep.entries[i].doc_id);
    CHECK(shallow.entries[i].score == deep.entries[i].score);
  }
}

TEST_CASE("corpus order does not affect scores or ranking") {
  std::mt19937 rng(11);
  strec::Corpus corpus = fixtures::random_corpus(rng, {.docs = 40});
  std::vector<strec::Document> shuffled = corpus.documents();
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  InvertedIndex a = InvertedIndex::build(corpus, {});
  InvertedIndex b = InvertedIndex::build(strec::Corpus(std::move(shuffled)), {});
  WeightedQuery query{{{"w2", 1.0}, {"w5", 0.5}}};
  RankedList ra = a.search(query, 100);
  RankedList rb = b.search(query, 100);
  REQUIRE(ra.entries.size() == rb.entries.size());
  for (size_t i = 0; i < ra.entries.size(); ++i) {
    CHECK(ra.entries[i].doc_id == rb.entries[i].doc_id);
    CHECK(ra.entries[i].score == rb.entries[i].score);
  }
}

TEST_CASE("adding a document sharing no query terms preserves the order") {
  strec::Corpus base = fixtures::micro_index_corpus();
  InvertedIndex before = InvertedIndex::build(base, {});
  WeightedQuery query{{{"bilingual", 1.0}}};
  std::vector<std::string> order_before = ranked_ids(before.search(query, 10));
  std::vector<strec::Document> docs = base.documents();
  strec::Document extra;
  extra.id = "d4";
  extra.title = "unrelated content entirely";
  docs.push_back(extra);
  InvertedIndex after = InvertedIndex::build(strec::Corpus(std::move(docs)), {});
  CHECK(ranked_ids(after.search(query, 10)) == order_before);
}

TEST_CASE("search matches an independent quadratic scorer on random corpora") {
  std::mt19937 rng(123);
  for (int round = 0; round < 8; ++round) {
    strec::Corpus corpus = fixtures::random_corpus(rng, {.docs = 50});
    strec::StopwordSet stops{"w1"};
    std::set<std::string> oracle_stops(stops.begin(), stops.end());
    InvertedIndex index = InvertedIndex::build(corpus, stops);

    std::map<std::string, std::vector<std::string>> streams;
    for (const strec::Document& doc : corpus.documents()) {
      streams[doc.id] = oracle::tokenize(doc.title + " " + doc.abstract, oracle_stops);
    }
    std::uniform_int_distribution<int> pick(0, 29);
    std::vector<std::pair<std::string, double>> terms;
    WeightedQuery query;
    for (int t = 0; t < 3; ++t) {
      std::string token = "w" + std::to_string(pick(rng));
      double weight = t == 0 ? 1.0 : 0.5;
      terms.emplace_back(token, weight);
      query.terms.push_back({token, weight});
    }
    RankedList list = index.search(query, 1000);
    for (const strec::RankedEntry& entry : list.entries) {
      double expected = oracle::tfidf_score(streams, entry.doc_id, terms);
      CHECK_THAT(entry.score, Catch::Matchers::WithinAbs(expected, 1e-9));
    }
    // every document the oracle scores positive must be retrieved
    size_t positive = 0;
    for (const auto& [id, _] : streams) {
      if (oracle::tfidf_score(streams, id, terms) > 0.0) ++positive;
    }
    CHECK(list.entries.size() == positive);
  }
}

TEST_CASE("index cache round-trips and rejects foreign files") {
  auto dir = fixtures::fresh_dir("index-cache");
  std::mt19937 rng(5);
  strec::Corpus corpus = fixtures::random_corpus(rng);
  InvertedIndex index = InvertedIndex::build(corpus, {});
  const auto path = dir / "index.bin";
  index.save_cache(path);

  auto loaded = InvertedIndex::load_cache(path);
  REQUIRE(loaded.has_value());
  WeightedQuery query{{{"w4", 1.0}, {"w9", 0.5}}};
  RankedList a = index.search(query, 100);
  RankedList b = loaded->search(query, 100);
  REQUIRE(a.entries.size() == b.entries.size());
  for (size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].doc_id == b.entries[i].doc_id);
    CHECK(a.entries[i].score == b.entries[i].score);
  }

  CHECK_FALSE(InvertedIndex::load_cache(dir / "missing.bin").has_value());

  {
    std::ofstream out(dir / "magic.bin", std::ios::binary);
    out << "NOTANIDX" << std::string(64, '\0');
  }
  CHECK_FALSE(InvertedIndex::load_cache(dir / "magic.bin").has_value());

  {
    // right magic, wrong format version
    std::ofstream out(dir / "version.bin", std::ios::binary);
    out << "STRECIDX";
    uint32_t version = 999;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    uint64_t zero = 0;
    out.write(reinterpret_cast<const char*>(&zero), sizeof zero);
  }
  CHECK_FALSE(InvertedIndex::load_cache(dir / "version.bin").has_value());

  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::ofstream out(dir / "truncated.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_FALSE(InvertedIndex::load_cache(dir / "truncated.bin").has_value());
}

TEST_CASE("TREC run files are written in canonical form and re-read") {
  RankedList list;
  list.topic_id = "t7";
  list.entries = {{"docB", 1.25, 1}, {"docA", 0.5, 2}};
  std::ostringstream out;
  strec::write_trec_run(out, {list}, "mytag");
  CHECK(out.str() == "t7 Q0 docB 1 1.250000 mytag\nt7 Q0 docA 2 0.500000 mytag\n");

  std::istringstream in(out.str());
  strec::TrecRun run = strec::read_trec_run(in, "test");
  CHECK(run.tag == "mytag");
  REQUIRE(run.lists.size() == 1);
  CHECK(run.lists[0].topic_id == "t7");
  REQUIRE(run.lists[0].entries.size() == 2);
  CHECK(run.lists[0].entries[0].doc_id == "docB");
  CHECK(run.lists[0].entries[1].doc_id == "docA");

  std::istringstream bad("t7 Q0 docB notanumber 1.0 tag\n");
  CHECK_THROWS_AS(strec::read_trec_run(bad, "test"), strec::ParseError);
}
