#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "oracles.hpp"
#include "sumhis/textproc.hpp"

using namespace sumhis;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

std::string upper_ascii(std::string s) {
  for (char& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

}  // namespace

TEST(SplitSentences, EmptyText) { EXPECT_TRUE(split_sentences("").empty()); }

TEST(SplitSentences, TwoSentences) {
  const auto s = split_sentences("A cat. A dog!");
  EXPECT_EQ(texts(s), (std::vector<std::string>{"A cat.", "A dog!"}));
  EXPECT_EQ(s[0].index, 0u);
  EXPECT_EQ(s[1].index, 1u);
}

TEST(SplitSentences, AbbreviationDoesNotSplit) {
  EXPECT_EQ(split_sentences("Dr. Smith ran.").size(), 1u);
  EXPECT_EQ(split_sentences("They met in the U.S. yesterday. Then left.").size(), 2u);
  EXPECT_EQ(split_sentences("Fruit, e.g. apples, is good.").size(), 1u);
}

TEST(SplitSentences, NoBoundaryInsideToken) {
  EXPECT_EQ(split_sentences("Pi is 3.14 roughly. Yes").size(), 2u);
  EXPECT_EQ(split_sentences("Really?!Yes.").size(), 1u);
}

TEST(SplitSentences, DropsTokenlessSegments) {
  const auto s = split_sentences("Hello there. ... !! Bye.");
  EXPECT_EQ(texts(s), (std::vector<std::string>{"Hello there.", "Bye."}));
  EXPECT_EQ(s[1].index, 1u);
}

TEST(SplitSentences, TrimsUnicodeSpace) {
  const auto s = split_sentences(" First one. Second one.");
  EXPECT_EQ(texts(s), (std::vector<std::string>{"First one.", "Second one."}));
}

TEST(SplitSentences, ResplitOfJoinIsIdempotent) {
  oracles::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto [text, expected] = oracles::random_text(rng, 1 + oracles::pick(rng, 6), 20);
    const auto first = split_sentences(text);
    std::string joined;
    for (const auto& s : first) joined += (joined.empty() ? "" : " ") + s.text;
    EXPECT_EQ(texts(split_sentences(joined)), texts(first));
    ASSERT_EQ(first.size(), expected.size());
    for (std::size_t i = 0; i < first.size(); ++i) EXPECT_EQ(first[i].tokens, expected[i]);
  }
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("The cat."), (TokenList{"the", "cat"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("U.S.-based"), (TokenList{"u.s.-based"}));
  EXPECT_EQ(tokenize("(don't) stop!!"), (TokenList{"don't", "stop"}));
  EXPECT_TRUE(tokenize(" -- ... ").empty());
}

TEST(Tokenize, UnicodeLowercase) {
  EXPECT_EQ(tokenize("ÉCOLE ΑΒ"), (TokenList{"école", "αβ"}));
}

TEST(Tokenize, CaseInsensitive) {
  oracles::Rng rng(12);
  for (int trial = 0; trial < 300; ++trial) {
    auto [text, unused] = oracles::random_text(rng, 3, 30);
    EXPECT_EQ(tokenize(text), tokenize(upper_ascii(text)));
  }
}

TEST(WordCount, Examples) {
  EXPECT_EQ(word_count("a b c"), 3u);
  EXPECT_EQ(word_count(""), 0u);
  EXPECT_EQ(word_count("Dr. Smith ran."), 3u);
}

TEST(NGrams, Examples) {
  EXPECT_EQ(ngrams({"a", "b", "a", "b"}, 2), (NGramCounts{{{"a", "b"}, 2}, {{"b", "a"}, 1}}));
  EXPECT_TRUE(ngrams({"a"}, 2).empty());
  EXPECT_EQ(ngrams({"a", "b"}, 1), (NGramCounts{{{"a"}, 1}, {{"b"}, 1}}));
}

TEST(NGrams, ZeroOrderRejected) { EXPECT_THROW(ngrams({"a"}, 0), Error); }

TEST(NGrams, TotalMultiplicity) {
  oracles::Rng rng(13);
  for (int trial = 0; trial < 500; ++trial) {
    const auto t = oracles::random_tokens(rng, 0, 12, 4);
    const std::size_t n = 1 + oracles::pick(rng, 4);
    std::size_t total = 0;
    for (const auto& [g, c] : ngrams(t, n)) {
      EXPECT_EQ(g.size(), n);
      total += c;
    }
    EXPECT_EQ(total, t.size() >= n ? t.size() - n + 1 : 0u);
  }
}

TEST(Document, SentencesCarryTokens) {
  const Document d = make_document("x", "One two. Three!", "one");
  ASSERT_EQ(d.sentences.size(), 2u);
  EXPECT_EQ(d.token_count(), 3u);
  EXPECT_EQ(concat_tokens(d, {1, 0}), (TokenList{"three", "one", "two"}));
}
