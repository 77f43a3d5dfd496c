#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "strec/errors.hpp"

namespace strec {

/// An evaluation query: id plus a free-text title.
struct Topic {
  std::string id;
  std::string title;
};

/// Topics file: tab-separated `<topic-id>\t<title>` lines.
inline std::vector<Topic> read_topics(std::istream& in, const std::string& name = "topics") {
  std::vector<Topic> topics;
  std::map<std::string, size_t> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      throw ParseError(name + ":" + std::to_string(line_no) +
                       ": expected <topic-id>\\t<title>");
    }
    Topic topic{line.substr(0, tab), line.substr(tab + 1)};
    if (!seen.emplace(topic.id, line_no).second) {
      throw IntegrityError(name + ":" + std::to_string(line_no) + ": duplicate topic id \"" +
                           topic.id + "\"");
    }
    topics.push_back(std::move(topic));
  }
  return topics;
}

inline std::vector<Topic> load_topics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open topics file: " + path.string());
  return read_topics(in, path.filename().string());
}

/// Graded relevance judgments, binarized at a configurable threshold
/// (a document is relevant when its grade is >= the threshold).
class Qrels {
 public:
  Qrels() = default;

  void add(const std::string& topic, const std::string& doc, int grade) {
    if (grade < 0) {
      throw IntegrityError("qrels: negative grade for (" + topic + ", " + doc + ")");
    }
    if (!by_topic_[topic].emplace(doc, grade).second) {
      throw IntegrityError("qrels: duplicate judgment for (" + topic + ", " + doc + ")");
    }
  }

  int grade(const std::string& topic, const std::string& doc) const {
    auto t = by_topic_.find(topic);
    if (t == by_topic_.end()) return 0;
    auto d = t->second.find(doc);
    return d == t->second.end() ? 0 : d->second;
  }

  bool is_relevant(const std::string& topic, const std::string& doc, int threshold = 1) const {
    return grade(topic, doc) >= threshold;
  }

  /// All judged-relevant documents for the topic, retrieved or not.
  std::vector<std::string> relevant_docs(const std::string& topic, int threshold = 1) const {
    std::vector<std::string> docs;
    auto t = by_topic_.find(topic);
    if (t == by_topic_.end()) return docs;
    for (const auto& [doc, grade] : t->second) {
      if (grade >= threshold) docs.push_back(doc);
    }
    return docs;
  }

  size_t relevant_count(const std::string& topic, int threshold = 1) const {
    size_t n = 0;
    auto t = by_topic_.find(topic);
    if (t == by_topic_.end()) return 0;
    for (const auto& [doc, grade] : t->second) {
      if (grade >= threshold) ++n;
    }
    return n;
  }

  const std::map<std::string, std::map<std::string, int>>& judgments() const {
    return by_topic_;
  }

 private:
  std::map<std::string, std::map<std::string, int>> by_topic_;
};

/// TREC qrels format: `<topic-id> 0 <doc-id> <grade>`, whitespace-separated.
inline Qrels read_qrels(std::istream& in, const std::string& name = "qrels") {
  Qrels qrels;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string topic, iteration, doc;
    int grade = 0;
    if (!(ss >> topic >> iteration >> doc >> grade)) {
      throw ParseError(name + ":" + std::to_string(line_no) + ": malformed qrels line");
    }
    try {
      qrels.add(topic, doc, grade);
    } catch (const IntegrityError& e) {
      throw IntegrityError(name + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return qrels;
}

inline Qrels load_qrels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open qrels file: " + path.string());
  return read_qrels(in, path.filename().string());
}

}  // namespace strec
