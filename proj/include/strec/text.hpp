#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "strec/errors.hpp"

namespace strec {

using TokenStream = std::vector<std::string>;
using StopwordSet = std::unordered_set<std::string>;

namespace detail {

// Token characters are ASCII alphanumerics plus any byte >= 0x80, so
// multi-byte UTF-8 sequences stay inside tokens.
inline bool is_token_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
         (c >= 'A' && c <= 'Z') || c >= 0x80;
}

inline char to_lower_byte(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace detail

/// ASCII-only case folding; non-ASCII bytes pass through unchanged.
inline std::string fold_case(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(detail::to_lower_byte(c));
  return out;
}

/// Lowercases, splits on maximal runs of non-alphanumeric characters and
/// drops stopwords. Order and duplicates are preserved.
inline TokenStream tokenize(std::string_view text, const StopwordSet& stopwords) {
  TokenStream tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      if (stopwords.find(current) == stopwords.end()) tokens.push_back(current);
      current.clear();
    }
  };
  for (char c : text) {
    if (detail::is_token_byte(static_cast<unsigned char>(c))) {
      current.push_back(detail::to_lower_byte(c));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

inline std::string join_tokens(const TokenStream& tokens, char sep = ' ') {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(sep);
    out += tokens[i];
  }
  return out;
}

/// Stopword file: one lowercase token per line, `#` starts a comment line.
inline StopwordSet read_stopwords(std::istream& in) {
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    size_t end = line.find_last_not_of(" \t");
    std::string word = line.substr(begin, end - begin + 1);
    if (word.empty() || word.front() == '#') continue;
    set.insert(fold_case(word));
  }
  return set;
}

inline StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open stopword file: " + path.string());
  return read_stopwords(in);
}

}  // namespace strec
