#include <gtest/gtest.h>

#include "iol/text.hpp"

using iol::text::ngrams;
using iol::text::tokenize;
using V = std::vector<std::string>;

TEST(Tokenize, LowercasesAndSplits) {
  EXPECT_EQ(tokenize("COVID-19 vaccine's... OK?", false), (V{"covid", "19", "vaccine", "s", "ok"}));
  EXPECT_EQ(tokenize("", false), V{});
  EXPECT_EQ(tokenize("  ,,; ", false), V{});
}

TEST(Tokenize, KeepsUtf8Words) {
  EXPECT_EQ(tokenize("caf\xc3\xa9 na\xc3\xafve", false), (V{"caf\xc3\xa9", "na\xc3\xafve"}));
}

TEST(Tokenize, Stopwords) {
  const auto& sw = iol::text::english_stopwords();
  EXPECT_TRUE(sw.count("the"));
  EXPECT_TRUE(sw.count("a"));
  EXPECT_FALSE(sw.count("virus"));
  EXPECT_EQ(tokenize("The virus is in a lab", true), (V{"virus", "lab"}));
}

TEST(Ngrams, UpToN) {
  V toks{"a", "b", "c"};
  EXPECT_EQ(ngrams(toks, 1), toks);
  auto two = ngrams(toks, 2);
  EXPECT_EQ(two.size(), 5u);
  EXPECT_NE(std::find(two.begin(), two.end(), "a b"), two.end());
  EXPECT_NE(std::find(two.begin(), two.end(), "b c"), two.end());
  EXPECT_EQ(ngrams({"x"}, 3), V{"x"});
}
