#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "strec/errors.hpp"
#include "strec/text.hpp"

namespace strec {

/// One corpus record: free text plus assigned descriptors and hierarchical
/// classification codes (digit strings, e.g. "10209").
struct Document {
  std::string id;
  std::string title;
  std::string abstract;
  std::vector<std::string> descriptors;      // verbatim, sorted, unique
  std::vector<std::string> classifications;  // digit strings, sorted, unique

  friend bool operator==(const Document&, const Document&) = default;
};

namespace detail {

inline bool is_digit_string(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return c >= '0' && c <= '9'; });
}

inline void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

class Corpus {
 public:
  Corpus() = default;

  /// Takes ownership of the documents; rejects duplicate or empty ids and
  /// malformed classification codes.
  explicit Corpus(std::vector<Document> documents)
      : documents_(std::move(documents)) {
    by_id_.reserve(documents_.size());
    for (size_t i = 0; i < documents_.size(); ++i) {
      Document& doc = documents_[i];
      if (doc.id.empty()) throw IntegrityError("document with empty id");
      for (const std::string& code : doc.classifications) {
        if (!detail::is_digit_string(code) || code.size() < 3) {
          throw IntegrityError("document " + doc.id +
                               ": invalid classification code \"" + code + "\"");
        }
      }
      detail::sort_unique(doc.descriptors);
      detail::sort_unique(doc.classifications);
      if (!by_id_.emplace(doc.id, i).second) {
        throw IntegrityError("duplicate document id \"" + doc.id + "\"");
      }
    }
  }

  const std::vector<Document>& documents() const { return documents_; }
  size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  const Document* find(const std::string& id) const {
    auto it = by_id_.find(id);
    return it == by_id_.end() ? nullptr : &documents_[it->second];
  }

  /// Union of all document descriptor sets. Descriptors are compared
  /// case-insensitively; the display form of each entry is the
  /// lexicographically smallest verbatim variant seen, which keeps the
  /// vocabulary independent of document order.
  std::vector<std::string> descriptor_vocabulary() const {
    std::map<std::string, std::string> folded_to_display;
    for (const Document& doc : documents_) {
      for (const std::string& d : doc.descriptors) {
        auto [it, inserted] = folded_to_display.emplace(fold_case(d), d);
        if (!inserted && d < it->second) it->second = d;
      }
    }
    std::vector<std::string> vocab;
    vocab.reserve(folded_to_display.size());
    for (auto& [folded, display] : folded_to_display) vocab.push_back(display);
    return vocab;
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.documents_ == b.documents_;
  }

 private:
  std::vector<Document> documents_;
  std::unordered_map<std::string, size_t> by_id_;
};

// --- corpus file format: JSON Lines, one document per line ---

namespace detail {

inline Document parse_document_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
  Document doc;
  auto require_string = [&](const char* key) -> std::string {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw ParseError(where + ": missing or non-string field \"" + key + "\"");
    }
    return it->get<std::string>();
  };
  doc.id = require_string("id");
  doc.title = require_string("title");
  if (auto it = j.find("abstract"); it != j.end()) {
    if (!it->is_string()) throw ParseError(where + ": field \"abstract\" must be a string");
    doc.abstract = it->get<std::string>();
  }
  auto read_string_array = [&](const char* key, std::vector<std::string>& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array()) throw ParseError(where + ": field \"" + key + "\" must be an array");
    for (const auto& v : *it) {
      if (!v.is_string()) throw ParseError(where + ": field \"" + key + "\" must contain strings");
      out.push_back(v.get<std::string>());
    }
  };
  read_string_array("descriptors", doc.descriptors);
  read_string_array("classifications", doc.classifications);
  return doc;
}

}  // namespace detail

inline Corpus read_corpus_jsonl(std::istream& in, const std::string& name = "corpus") {
  std::vector<Document> docs;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::string where = name + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    Document doc = detail::parse_document_json(j, where);
    for (const std::string& code : doc.classifications) {
      if (!detail::is_digit_string(code) || code.size() < 3) {
        throw ParseError(where + ": invalid classification code \"" + code + "\"");
      }
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs));
}

inline Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file: " + path.string());
  return read_corpus_jsonl(in, path.filename().string());
}

inline void write_corpus_jsonl(std::ostream& out, const Corpus& corpus) {
  for (const Document& doc : corpus.documents()) {
    nlohmann::json j{{"id", doc.id},
                     {"title", doc.title},
                     {"abstract", doc.abstract},
                     {"descriptors", doc.descriptors},
                     {"classifications", doc.classifications}};
    out << j.dump() << '\n';
  }
}

inline void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write corpus file: " + path.string());
  write_corpus_jsonl(out, corpus);
}

// --- discipline map ---

/// Classification-prefix -> discipline-name table defining the partitions.
class DisciplineMap {
 public:
  DisciplineMap() = default;

  DisciplineMap(size_t prefix_length, std::map<std::string, std::string> entries)
      : prefix_length_(prefix_length), entries_(std::move(entries)) {
    if (prefix_length_ == 0) throw IntegrityError("discipline map: prefix_length must be positive");
    std::unordered_map<std::string, std::string> seen_labels;
    for (const auto& [prefix, label] : entries_) {
      if (!detail::is_digit_string(prefix) || prefix.size() != prefix_length_) {
        throw IntegrityError("discipline map: prefix \"" + prefix +
                             "\" is not a digit string of length " +
                             std::to_string(prefix_length_));
      }
      if (label.empty()) throw IntegrityError("discipline map: empty label for prefix " + prefix);
      if (label == "global") {
        throw IntegrityError("discipline map: label \"global\" is reserved");
      }
      if (!seen_labels.emplace(label, prefix).second) {
        throw IntegrityError("discipline map: duplicate label \"" + label + "\"");
      }
    }
  }

  size_t prefix_length() const { return prefix_length_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Prefix of the code's discipline, if mapped.
  std::optional<std::string> prefix_of(const std::string& code) const {
    if (code.size() < prefix_length_) return std::nullopt;
    std::string prefix = code.substr(0, prefix_length_);
    return entries_.count(prefix) ? std::optional(prefix) : std::nullopt;
  }

  const std::string& label_for(const std::string& prefix) const {
    return entries_.at(prefix);
  }

 private:
  size_t prefix_length_ = 3;
  std::map<std::string, std::string> entries_;
};

inline DisciplineMap read_discipline_map(std::istream& in, const std::string& name) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(name + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("prefix_length") || !j.contains("entries")) {
    throw ParseError(name + ": expected {\"prefix_length\": N, \"entries\": {...}}");
  }
  if (!j["prefix_length"].is_number_unsigned() || !j["entries"].is_object()) {
    throw ParseError(name + ": bad field types");
  }
  std::map<std::string, std::string> entries;
  for (auto& [prefix, label] : j["entries"].items()) {
    if (!label.is_string()) throw ParseError(name + ": entry for \"" + prefix + "\" must be a string");
    entries[prefix] = label.get<std::string>();
  }
  return DisciplineMap(j["prefix_length"].get<size_t>(), std::move(entries));
}

inline DisciplineMap load_discipline_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open discipline map: " + path.string());
  return read_discipline_map(in, path.filename().string());
}

// --- partitioning ---

struct Partitions {
  std::map<std::string, Corpus> by_label;  // discipline label -> sub-corpus
  size_t unmapped_documents = 0;           // documents matching no prefix
};

/// A document joins the partition of every mapped prefix any of its codes
/// starts with; documents matching no prefix are only counted.
inline Partitions partition(const Corpus& corpus, const DisciplineMap& map) {
  if (map.empty()) throw IntegrityError("partition: discipline map is empty");
  std::map<std::string, std::vector<Document>> members;
  Partitions result;
  for (const Document& doc : corpus.documents()) {
    std::vector<std::string> prefixes;
    for (const std::string& code : doc.classifications) {
      if (auto prefix = map.prefix_of(code)) {
        if (std::find(prefixes.begin(), prefixes.end(), *prefix) == prefixes.end()) {
          prefixes.push_back(*prefix);
        }
      }
    }
    if (prefixes.empty()) {
      ++result.unmapped_documents;
      continue;
    }
    for (const std::string& prefix : prefixes) {
      members[map.label_for(prefix)].push_back(doc);
    }
  }
  for (auto& [label, docs] : members) {
    result.by_label.emplace(label, Corpus(std::move(docs)));
  }
  return result;
}

}  // namespace strec
