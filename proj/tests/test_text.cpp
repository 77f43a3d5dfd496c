#include <sstream>

#include "catch2/catch_amalgamated.hpp"
#include "strec/text.hpp"
#include "support/oracles.hpp"

using strec::StopwordSet;
using strec::TokenStream;
using strec::tokenize;

TEST_CASE("tokenize splits on non-alphanumerics and lowercases") {
  StopwordSet none;
  CHECK(tokenize("Bilingual education", none) == TokenStream{"bilingual", "education"});
  CHECK(tokenize("C++-based, 2nd-gen systems", none) ==
        TokenStream{"c", "based", "2nd", "gen", "systems"});
  CHECK(tokenize("", none).empty());
  CHECK(tokenize("  ...  ", none).empty());
}

TEST_CASE("tokenize preserves order and duplicates") {
  StopwordSet none;
  CHECK(tokenize("tax tax policy", none) == TokenStream{"tax", "tax", "policy"});
}

TEST_CASE("tokenize drops stopwords after lowercasing") {
  StopwordSet stops{"the", "of", "a"};
  CHECK(tokenize("The effect of a policy", stops) == TokenStream{"effect", "policy"});
  CHECK(tokenize("THE OF A", stops).empty());
}

TEST_CASE("bytes outside ASCII are kept as token characters") {
  StopwordSet none;
  // UTF-8 content passes through; only ASCII letters are case-folded
  CHECK(tokenize("M\xc3\xbcller studie", none) == TokenStream{"m\xc3\xbcller", "studie"});
}

TEST_CASE("fold_case is ASCII-only") {
  CHECK(strec::fold_case("MiXeD-42") == "mixed-42");
  CHECK(strec::fold_case("\xc3\x9c") == "\xc3\x9c");  // non-ASCII byte untouched
}

TEST_CASE("tokenize agrees with an independent re-implementation") {
  StopwordSet stops{"and", "the"};
  std::set<std::string> oracle_stops(stops.begin(), stops.end());
  const char* samples[] = {
      "Social integration, 2nd edition",
      "the quick brown fox AND the dog",
      "x1 y2 z3 --- x1",
      "a;b;c and D:E:F",
  };
  for (const char* s : samples) {
    CHECK(tokenize(s, stops) == oracle::tokenize(s, oracle_stops));
  }
}

TEST_CASE("stopword files ignore comments and blank lines") {
  std::istringstream in("# comment\nthe\n\nof\r\n  a  \n#tail\n");
  StopwordSet set = strec::read_stopwords(in);
  CHECK(set == StopwordSet{"the", "of", "a"});
}

TEST_CASE("join_tokens") {
  CHECK(strec::join_tokens({"a", "b", "c"}) == "a b c");
  CHECK(strec::join_tokens({}).empty());
}
