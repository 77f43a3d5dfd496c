#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "strec/corpus.hpp"
#include "strec/errors.hpp"
#include "strec/text.hpp"

namespace strec {

struct WeightedTerm {
  std::string token;
  double weight = 1.0;
};

/// Query terms with per-term weights (> 0). Carries original and
/// expansion terms into ranking.
struct WeightedQuery {
  std::vector<WeightedTerm> terms;
};

struct RankedEntry {
  std::string doc_id;
  double score = 0.0;
  uint32_t rank = 0;  // 1-based
};

struct RankedList {
  std::string topic_id;
  std::vector<RankedEntry> entries;
};

/// Inverted index over title+abstract with tf-idf ranking:
///
///   score(d) = sum_t w(t) * (1 + ln tf(t,d)) * ln(1 + N/df(t)) / sqrt(len(d))
///
/// Terms unseen in the corpus contribute nothing; documents matching no
/// term are not returned. Ties in score are broken by ascending document id.
class InvertedIndex {
 public:
  struct Posting {
    uint32_t doc = 0;  // dense index into doc_ids()
    uint32_t tf = 0;
  };

  InvertedIndex() = default;

  static InvertedIndex build(const Corpus& corpus, const StopwordSet& stopwords) {
    InvertedIndex index;
    index.doc_ids_.reserve(corpus.size());
    index.doc_lengths_.reserve(corpus.size());
    for (const Document& doc : corpus.documents()) {
      TokenStream tokens = tokenize(doc.title + " " + doc.abstract, stopwords);
      uint32_t dense = static_cast<uint32_t>(index.doc_ids_.size());
      index.doc_ids_.push_back(doc.id);
      index.doc_lengths_.push_back(static_cast<uint32_t>(tokens.size()));
      std::map<std::string, uint32_t> tf;
      for (const std::string& t : tokens) ++tf[t];
      for (const auto& [token, count] : tf) {
        index.postings_[token].push_back({dense, count});
      }
    }
    for (auto& [token, list] : index.postings_) {
      std::sort(list.begin(), list.end(), [&](const Posting& a, const Posting& b) {
        return index.doc_ids_[a.doc] < index.doc_ids_[b.doc];
      });
    }
    index.rebuild_id_lookup();
    return index;
  }

  size_t doc_count() const { return doc_ids_.size(); }

  size_t doc_freq(const std::string& token) const {
    auto it = postings_.find(token);
    return it == postings_.end() ? 0 : it->second.size();
  }

  size_t doc_length(const std::string& doc_id) const {
    auto it = id_to_dense_.find(doc_id);
    return it == id_to_dense_.end() ? 0 : doc_lengths_[it->second];
  }

  size_t term_frequency(const std::string& token, const std::string& doc_id) const {
    auto pit = postings_.find(token);
    auto dit = id_to_dense_.find(doc_id);
    if (pit == postings_.end() || dit == id_to_dense_.end()) return 0;
    for (const Posting& p : pit->second) {
      if (p.doc == dit->second) return p.tf;
    }
    return 0;
  }

  const std::map<std::string, std::vector<Posting>>& postings() const { return postings_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }

  RankedList search(const WeightedQuery& query, size_t depth) const {
    if (query.terms.empty()) throw EmptyQueryError("search: query has no terms");
    if (depth == 0) throw IntegrityError("search: depth must be >= 1");
    const double n = static_cast<double>(doc_count());
    std::unordered_map<uint32_t, double> acc;
    for (const WeightedTerm& term : query.terms) {
      if (term.weight <= 0.0) {
        throw IntegrityError("search: non-positive weight for term \"" + term.token + "\"");
      }
      auto it = postings_.find(term.token);
      if (it == postings_.end()) continue;
      const double idf = std::log(1.0 + n / static_cast<double>(it->second.size()));
      for (const Posting& p : it->second) {
        acc[p.doc] += term.weight * (1.0 + std::log(static_cast<double>(p.tf))) * idf;
      }
    }
    RankedList result;
    result.entries.reserve(acc.size());
    for (const auto& [dense, sum] : acc) {
      double score = sum / std::sqrt(static_cast<double>(doc_lengths_[dense]));
      if (score > 0.0) result.entries.push_back({doc_ids_[dense], score, 0});
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return a.doc_id < b.doc_id;
              });
    if (result.entries.size() > depth) result.entries.resize(depth);
    for (size_t i = 0; i < result.entries.size(); ++i) {
      result.entries[i].rank = static_cast<uint32_t>(i + 1);
    }
    return result;
  }

  // --- on-disk cache, internal versioned binary format ---

  static constexpr uint32_t kCacheFormatVersion = 1;

  void save_cache(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write index cache: " + path.string());
    out.write(kCacheMagic, 8);
    write_u32(out, kCacheFormatVersion);
    write_u64(out, doc_ids_.size());
    for (size_t i = 0; i < doc_ids_.size(); ++i) {
      write_string(out, doc_ids_[i]);
      write_u32(out, doc_lengths_[i]);
    }
    write_u64(out, postings_.size());
    for (const auto& [token, list] : postings_) {
      write_string(out, token);
      write_u64(out, list.size());
      for (const Posting& p : list) {
        write_u32(out, p.doc);
        write_u32(out, p.tf);
      }
    }
  }

  /// Returns nothing when the file is absent, truncated, or carries a
  /// different format version; callers rebuild from the corpus then.
  static std::optional<InvertedIndex> load_cache(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8] = {};
    in.read(magic, 8);
    if (!in || std::string_view(magic, 8) != kCacheMagic) return std::nullopt;
    uint32_t version = 0;
    if (!read_u32(in, version) || version != kCacheFormatVersion) return std::nullopt;
    InvertedIndex index;
    uint64_t n_docs = 0;
    if (!read_u64(in, n_docs)) return std::nullopt;
    index.doc_ids_.reserve(n_docs);
    index.doc_lengths_.reserve(n_docs);
    for (uint64_t i = 0; i < n_docs; ++i) {
      std::string id;
      uint32_t len = 0;
      if (!read_string(in, id) || !read_u32(in, len)) return std::nullopt;
      index.doc_ids_.push_back(std::move(id));
      index.doc_lengths_.push_back(len);
    }
    uint64_t n_tokens = 0;
    if (!read_u64(in, n_tokens)) return std::nullopt;
    for (uint64_t i = 0; i < n_tokens; ++i) {
      std::string token;
      uint64_t n_postings = 0;
      if (!read_string(in, token) || !read_u64(in, n_postings)) return std::nullopt;
      std::vector<Posting> list(n_postings);
      for (auto& p : list) {
        if (!read_u32(in, p.doc) || !read_u32(in, p.tf)) return std::nullopt;
        if (p.doc >= n_docs) return std::nullopt;
      }
      index.postings_.emplace(std::move(token), std::move(list));
    }
    index.rebuild_id_lookup();
    return index;
  }

 private:
  static constexpr const char* kCacheMagic = "STRECIDX";

  void rebuild_id_lookup() {
    id_to_dense_.clear();
    id_to_dense_.reserve(doc_ids_.size());
    for (uint32_t i = 0; i < doc_ids_.size(); ++i) id_to_dense_[doc_ids_[i]] = i;
  }

  static void write_u32(std::ostream& out, uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  static void write_u64(std::ostream& out, uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  static void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  static bool read_u32(std::istream& in, uint32_t& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
  }
  static bool read_u64(std::istream& in, uint64_t& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof v));
  }
  static bool read_string(std::istream& in, std::string& s) {
    uint32_t len = 0;
    if (!read_u32(in, len)) return false;
    s.resize(len);
    return static_cast<bool>(in.read(s.data(), len));
  }

  std::vector<std::string> doc_ids_;    // dense index -> document id, corpus order
  std::vector<uint32_t> doc_lengths_;   // post-stopword token counts
  std::map<std::string, std::vector<Posting>> postings_;  // sorted by doc id
  std::unordered_map<std::string, uint32_t> id_to_dense_;
};

// --- TREC run format ---

inline std::string format_score(double score) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", score);
  return buf;
}

/// One line per entry: `<topic-id> Q0 <doc-id> <rank> <score> <run-tag>`.
inline void write_trec_run(std::ostream& out, const std::vector<RankedList>& lists,
                           const std::string& run_tag) {
  for (const RankedList& list : lists) {
    for (const RankedEntry& e : list.entries) {
      out << list.topic_id << " Q0 " << e.doc_id << ' ' << e.rank << ' '
          << format_score(e.score) << ' ' << run_tag << '\n';
    }
  }
}

struct TrecRun {
  std::vector<RankedList> lists;  // topics in first-appearance order
  std::string tag;
};

inline TrecRun read_trec_run(std::istream& in, const std::string& name = "run") {
  TrecRun run;
  std::map<std::string, size_t> topic_index;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string topic, q0, doc, tag;
    uint32_t rank = 0;
    double score = 0.0;
    if (!(ss >> topic >> q0 >> doc >> rank >> score >> tag)) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": malformed run line");
    }
    auto [it, inserted] = topic_index.emplace(topic, run.lists.size());
    if (inserted) run.lists.push_back(RankedList{topic, {}});
    run.lists[it->second].entries.push_back({doc, score, rank});
    run.tag = tag;
  }
  for (RankedList& list : run.lists) {
    std::sort(list.entries.begin(), list.entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) { return a.rank < b.rank; });
  }
  return run;
}

inline TrecRun load_trec_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open run file: " + path.string());
  return read_trec_run(in, path.filename().string());
}

}  // namespace strec
