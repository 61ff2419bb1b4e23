#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "nestccg/lexicon.h"
#include "support/oracles.h"

using namespace nestccg;

namespace {

std::vector<Sentence> corpus_of(const std::vector<std::string>& lines) {
  std::vector<Sentence> out;
  for (const auto& l : lines) {
    Sentence s;
    std::istringstream ss(l);
    for (std::string w; ss >> w;) s.tokens.push_back(w);
    out.push_back(s);
  }
  return out;
}

std::vector<Sentence> ab_corpus() {
  return corpus_of({"a b", "a b", "a b", "b a"});
}

// Boundaries delimited by rarity: each chunk recurs on its own 15 times, each
// chunk-boundary bigram occurs once.
std::vector<Sentence> four_chunk_corpus() {
  std::vector<std::string> lines{"all students are required to finish in two hours"};
  for (int k = 0; k < 15; ++k) {
    lines.insert(lines.end(), {"all students", "are required to", "finish", "in two hours"});
  }
  return corpus_of(lines);
}

std::vector<std::size_t> delimiters(const std::vector<Ngram>& pieces) {
  std::vector<std::size_t> d;
  std::size_t pos = 0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) d.push_back(pos += pieces[i].size());
  return d;
}

}  // namespace

TEST_CASE("n-gram counts slide a window over each sentence") {
  const auto t = count_ngrams(ab_corpus(), 2);
  CHECK(t.count({"a"}) == 4);
  CHECK(t.count({"b"}) == 4);
  CHECK(t.count({"a", "b"}) == 3);
  CHECK(t.count({"b", "a"}) == 1);
  CHECK(t.total(1) == 8);
  CHECK(t.total(2) == 4);

  const auto single = count_ngrams(corpus_of({"x"}), 2);
  CHECK(single.count({"x"}) == 1);
  CHECK(single.total(2) == 0);

  const auto repeat = count_ngrams(corpus_of({"a a a"}), 2);
  CHECK(repeat.count({"a"}) == 3);
  CHECK(repeat.count({"a", "a"}) == 2);
}

TEST_CASE("count table totals equal per-length sums") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = count_ngrams(oracle::random_corpus(rng, 10, 9, 4), 4);
    std::vector<std::size_t> sums(4, 0);
    for (const auto& [g, c] : t.counts()) {
      REQUIRE(g.size() >= 1);
      REQUIRE(g.size() <= 4);
      sums[g.size() - 1] += c;
    }
    for (std::size_t k = 1; k <= 4; ++k) CHECK(sums[k - 1] == t.total(k));
  }
}

TEST_CASE("count table rejects bad arguments") {
  CHECK_THROWS(count_ngrams({}, 2));
  CHECK_THROWS(count_ngrams(ab_corpus(), 1));
}

TEST_CASE("pmi uses per-length probabilities and natural log") {
  const auto t = count_ngrams(ab_corpus(), 2);
  CHECK(pmi(t, "a", "b") == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(std::abs(pmi(t, "b", "a")) < 1e-15);
}

TEST_CASE("pmi of an unseen bigram is negative infinity") {
  const auto t = count_ngrams(corpus_of({"a b", "c"}), 2);
  CHECK(pmi(t, "a", "c") == -std::numeric_limits<double>::infinity());
  CHECK_THROWS(pmi(t, "a", "zzz"));
}

TEST_CASE("segmentation cuts below the threshold and keeps ties together") {
  const auto t = count_ngrams(ab_corpus(), 2);
  // pmi(b, a) is exactly 0: tie keeps words together.
  CHECK(segment(corpus_of({"b a"})[0], t, 0.0) == std::vector<Ngram>{{"b", "a"}});
  CHECK(segment(corpus_of({"b a"})[0], t, 0.5) == std::vector<Ngram>{{"b"}, {"a"}});
  CHECK(segment(corpus_of({"a"})[0], t, 0.0) == std::vector<Ngram>{{"a"}});
  CHECK(segment(corpus_of({"a b a b"})[0], t, -1.0) == std::vector<Ngram>{{"a", "b", "a", "b"}});
}

TEST_CASE("segmentation isolates low-pmi boundaries") {
  // s1 | s2 s3 s4 | s5: the inner trigram recurs, the outer words recur
  // elsewhere, and the boundary bigrams occur once.
  std::vector<std::string> lines{"s1 s2 s3 s4 s5"};
  for (int k = 0; k < 10; ++k) lines.insert(lines.end(), {"s1 s5", "s2 s3 s4"});
  const auto data = corpus_of(lines);
  const auto t = count_ngrams(data, 2);
  REQUIRE(pmi(t, "s1", "s2") < 0.0);
  REQUIRE(pmi(t, "s2", "s3") >= 0.0);
  REQUIRE(pmi(t, "s4", "s5") < 0.0);
  CHECK(segment(data[0], t, 0.0) == std::vector<Ngram>{{"s1"}, {"s2", "s3", "s4"}, {"s5"}});
}

TEST_CASE("segments partition the sentence and cuts are monotone in the threshold") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = oracle::random_corpus(rng, 12, 8, 5);
    const auto t = count_ngrams(data, 2);
    double lo = th(rng), hi = th(rng);
    if (lo > hi) std::swap(lo, hi);
    for (const auto& s : data) {
      const auto pieces = segment(s, t, lo);
      std::vector<std::string> joined;
      for (const auto& p : pieces) joined.insert(joined.end(), p.begin(), p.end());
      CHECK(joined == s.tokens);
      const auto dl = delimiters(pieces);
      const auto dh = delimiters(segment(s, t, hi));
      CHECK(std::includes(dh.begin(), dh.end(), dl.begin(), dl.end()));
    }
  }
}

TEST_CASE("pmi and segmentation agree with an independent counter") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const auto data = oracle::random_corpus(rng, 12, 8, 5);
    const auto t = count_ngrams(data, 3);
    for (const auto& s : data) {
      for (std::size_t i = 1; i < s.size(); ++i) {
        CHECK(std::abs(pmi(t, s.tokens[i - 1], s.tokens[i]) -
                       oracle::brute_pmi(data, s.tokens[i - 1], s.tokens[i])) <= 1e-12);
      }
      CHECK(segment(s, t, 0.0) == oracle::brute_segment(data, s, 0.0));
    }
  }
}

TEST_CASE("lexicon collects the segments of every sentence") {
  const auto lex = build_lexicon(four_chunk_corpus(), 5, 0.0);
  const std::set<Ngram> want{{"all", "students"},
                             {"are", "required", "to"},
                             {"finish"},
                             {"in", "two", "hours"}};
  CHECK(lex.ngrams() == want);
  CHECK(lex.max_len() == 5);
  CHECK(lex.threshold() == 0.0);
}

TEST_CASE("overlong segments contribute their max-length windows") {
  const auto lex = build_lexicon(corpus_of({"a b c d e f g"}), 5, 0.0);
  const std::set<Ngram> want{{"a", "b", "c", "d", "e"},
                             {"b", "c", "d", "e", "f"},
                             {"c", "d", "e", "f", "g"}};
  CHECK(lex.ngrams() == want);
}

TEST_CASE("an infinite threshold leaves only unigrams") {
  const auto data = four_chunk_corpus();
  const auto lex = build_lexicon(data, 5, std::numeric_limits<double>::infinity());
  CHECK(lex.size() == 9);
  for (const auto& g : lex.ngrams()) CHECK(g.size() == 1);
}

TEST_CASE("lexicon entries respect the length bound") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto lex = build_lexicon(oracle::random_corpus(rng, 10, 12, 3), 3, -1.0);
    for (const auto& g : lex.ngrams()) {
      CHECK(g.size() >= 1);
      CHECK(g.size() <= 3);
    }
  }
  PMILexicon lex(2, 0.0);
  CHECK_THROWS(lex.insert({"a", "b", "c"}));
  CHECK_THROWS(lex.insert({}));
  lex.insert({"a", "b"});
  CHECK(lex.contains({"a", "b"}));
  CHECK_FALSE(lex.contains({"A", "b"}));
}

TEST_CASE("lexicon files round-trip and re-validate lengths") {
  const auto lex = build_lexicon(four_chunk_corpus(), 5, 0.25);
  std::stringstream io;
  write_lexicon(io, lex);
  CHECK(parse_lexicon(io) == lex);

  std::istringstream too_long("maxlen=2 threshold=0\na b c\n");
  CHECK_THROWS_AS(parse_lexicon(too_long), FormatError);
  std::istringstream no_header("a b\n");
  CHECK_THROWS_AS(parse_lexicon(no_header), FormatError);
  std::istringstream inf("maxlen=3 threshold=inf\nx\n");
  CHECK(std::isinf(parse_lexicon(inf).threshold()));
}
