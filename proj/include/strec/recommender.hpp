#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "strec/corpus.hpp"
#include "strec/errors.hpp"
#include "strec/text.hpp"

namespace strec {

/// A recommended controlled-vocabulary term with its aggregate score.
struct Suggestion {
  std::string descriptor;
  double score = 0.0;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

/// Search-term recommender: document-wise co-occurrence statistics between
/// free-text tokens (title+abstract) and assigned descriptors, scored with a
/// logarithmically modified Jaccard similarity
///
///   score(t, c) = ln(co + 1) * co / (df_t + df_c - co)
///
/// where co is the number of partition documents containing both, df_t the
/// documents containing the token and df_c the documents carrying the
/// descriptor. Counts are per document: repeats inside one document count
/// once. Descriptors are matched case-insensitively as whole assigned units.
class RecommenderModel {
 public:
  static constexpr uint32_t kFormatVersion = 1;

  RecommenderModel() = default;

  static RecommenderModel build(const Corpus& partition, const StopwordSet& stopwords,
                                std::string label) {
    if (partition.empty()) {
      throw EmptyPartitionError("build_str: partition \"" + label + "\" is empty");
    }
    RecommenderModel model;
    model.label_ = std::move(label);
    model.doc_count_ = partition.size();
    for (const Document& doc : partition.documents()) {
      TokenStream tokens = tokenize(doc.title + " " + doc.abstract, stopwords);
      std::set<std::string> distinct(tokens.begin(), tokens.end());
      // descriptors keyed by folded form; remember the smallest verbatim
      // variant for display
      std::map<std::string, std::string> descriptors;
      for (const std::string& d : doc.descriptors) {
        auto [it, inserted] = descriptors.emplace(fold_case(d), d);
        if (!inserted && d < it->second) it->second = d;
      }
      for (const std::string& token : distinct) ++model.token_df_[token];
      for (const auto& [key, display] : descriptors) {
        auto [it, inserted] = model.descriptors_.emplace(key, DescriptorInfo{display, 1});
        if (!inserted) {
          ++it->second.df;
          if (display < it->second.display) it->second.display = display;
        }
      }
      for (const std::string& token : distinct) {
        auto& row = model.cooc_[token];
        for (const auto& [key, display] : descriptors) ++row[key];
      }
    }
    return model;
  }

  const std::string& label() const { return label_; }
  size_t doc_count() const { return doc_count_; }

  size_t token_df(const std::string& token) const {
    auto it = token_df_.find(token);
    return it == token_df_.end() ? 0 : it->second;
  }

  size_t descriptor_df(const std::string& descriptor) const {
    auto it = descriptors_.find(fold_case(descriptor));
    return it == descriptors_.end() ? 0 : it->second.df;
  }

  size_t cooccurrence(const std::string& token, const std::string& descriptor) const {
    auto row = cooc_.find(token);
    if (row == cooc_.end()) return 0;
    auto it = row->second.find(fold_case(descriptor));
    return it == row->second.end() ? 0 : it->second;
  }

  std::vector<std::string> descriptor_vocabulary() const {
    std::vector<std::string> vocab;
    vocab.reserve(descriptors_.size());
    for (const auto& [key, info] : descriptors_) vocab.push_back(info.display);
    return vocab;
  }

  double score(const std::string& token, const std::string& descriptor) const {
    return score_counts(cooccurrence(token, descriptor), token_df(token),
                        descriptor_df(descriptor));
  }

  static double score_counts(size_t co, size_t token_df, size_t descriptor_df) {
    if (co == 0) return 0.0;
    const double c = static_cast<double>(co);
    return std::log(c + 1.0) * c /
           (static_cast<double>(token_df) + static_cast<double>(descriptor_df) - c);
  }

  /// Top-n descriptors by the sum of per-token scores over the distinct
  /// query tokens. Descriptors equal (case-insensitively) to a query token
  /// are excluded; ties are broken case-insensitively lexicographically.
  std::vector<Suggestion> recommend(const TokenStream& query, size_t n) const {
    if (n == 0) throw IntegrityError("recommend: n must be >= 1");
    std::vector<std::string> distinct;
    std::unordered_set<std::string> seen;
    for (const std::string& token : query) {
      if (seen.insert(fold_case(token)).second) distinct.push_back(fold_case(token));
    }
    std::map<std::string, double> totals;  // folded descriptor -> score
    for (const std::string& token : distinct) {
      auto row = cooc_.find(token);
      if (row == cooc_.end()) continue;
      const double tdf = static_cast<double>(token_df_.at(token));
      for (const auto& [key, co] : row->second) {
        if (seen.count(key)) continue;  // identical to a query token
        const double c = static_cast<double>(co);
        totals[key] += std::log(c + 1.0) * c /
                       (tdf + static_cast<double>(descriptors_.at(key).df) - c);
      }
    }
    // map iteration gives ascending folded keys; a stable sort on score
    // alone therefore leaves ties in lexicographic order
    std::vector<std::pair<std::string, double>> ranked(totals.begin(), totals.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<Suggestion> out;
    for (const auto& [key, total] : ranked) {
      if (out.size() == n) break;
      if (total <= 0.0) break;
      out.push_back({descriptors_.at(key).display, total});
    }
    return out;
  }

  // --- serialization: versioned JSON with the three count tables ---

  nlohmann::json to_json() const {
    nlohmann::json token_df = nlohmann::json::object();
    for (const auto& [token, df] : token_df_) token_df[token] = df;
    nlohmann::json descriptor_df = nlohmann::json::object();
    for (const auto& [key, info] : descriptors_) descriptor_df[info.display] = info.df;
    nlohmann::json cooc = nlohmann::json::object();
    for (const auto& [token, row] : cooc_) {
      nlohmann::json jrow = nlohmann::json::object();
      for (const auto& [key, count] : row) jrow[descriptors_.at(key).display] = count;
      cooc[token] = std::move(jrow);
    }
    return nlohmann::json{{"format_version", kFormatVersion},
                          {"label", label_},
                          {"doc_count", doc_count_},
                          {"token_df", std::move(token_df)},
                          {"descriptor_df", std::move(descriptor_df)},
                          {"cooccurrence", std::move(cooc)}};
  }

  static RecommenderModel from_json(const nlohmann::json& j, const std::string& name = "model") {
    if (!j.is_object()) throw ParseError(name + ": expected a JSON object");
    if (!j.contains("format_version") || !j["format_version"].is_number_unsigned() ||
        j["format_version"].get<uint32_t>() != kFormatVersion) {
      throw IntegrityError(name + ": unsupported model format version");
    }
    for (const char* key : {"label", "doc_count", "token_df", "descriptor_df", "cooccurrence"}) {
      if (!j.contains(key)) throw ParseError(name + ": missing field \"" + std::string(key) + "\"");
    }
    RecommenderModel model;
    model.label_ = j["label"].get<std::string>();
    model.doc_count_ = j["doc_count"].get<uint64_t>();
    for (auto& [token, df] : j["token_df"].items()) {
      model.token_df_[token] = df.get<uint32_t>();
    }
    for (auto& [display, df] : j["descriptor_df"].items()) {
      std::string key = fold_case(display);
      if (!model.descriptors_.emplace(key, DescriptorInfo{display, df.get<uint32_t>()}).second) {
        throw IntegrityError(name + ": descriptors \"" + display +
                             "\" collide case-insensitively");
      }
    }
    for (auto& [token, row] : j["cooccurrence"].items()) {
      auto& dst = model.cooc_[token];
      for (auto& [display, count] : row.items()) {
        std::string key = fold_case(display);
        if (!model.descriptors_.count(key)) {
          throw IntegrityError(name + ": co-occurrence names unknown descriptor \"" + display + "\"");
        }
        dst[key] = count.get<uint32_t>();
      }
    }
    model.check_counts(name);
    return model;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write model file: " + path.string());
    out << to_json().dump(2) << '\n';
  }

  static RecommenderModel load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.filename().string() + ": " + e.what());
    }
    return from_json(j, path.filename().string());
  }

 private:
  struct DescriptorInfo {
    std::string display;
    uint32_t df = 0;
  };

  void check_counts(const std::string& name) const {
    for (const auto& [token, row] : cooc_) {
      auto tdf = token_df_.find(token);
      if (tdf == token_df_.end()) {
        throw IntegrityError(name + ": co-occurrence names unknown token \"" + token + "\"");
      }
      for (const auto& [key, count] : row) {
        if (count == 0 || count > tdf->second || count > descriptors_.at(key).df) {
          throw IntegrityError(name + ": inconsistent co-occurrence count for (" + token +
                               ", " + descriptors_.at(key).display + ")");
        }
      }
    }
  }

  std::string label_;
  uint64_t doc_count_ = 0;
  std::map<std::string, uint32_t> token_df_;
  std::map<std::string, DescriptorInfo> descriptors_;            // folded -> info
  std::map<std::string, std::map<std::string, uint32_t>> cooc_;  // token -> folded -> count
};

}  // namespace strec
