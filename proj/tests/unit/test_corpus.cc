#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "nestccg/corpus.h"

using namespace nestccg;

namespace {

std::vector<TaggedSentence> tagged(const std::string& text) {
  std::istringstream in(text);
  return parse_tagged(in);
}

std::vector<TaggedSentence> with_tags(const std::vector<std::string>& tags) {
  TaggedSentence ts;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    ts.sentence.tokens.push_back("w" + std::to_string(i));
    ts.tags.push_back(tags[i]);
  }
  return {ts};
}

}  // namespace

TEST_CASE("tagged file reads token and tag columns") {
  const auto data = tagged("The\tNP[nb]/N\nDow\tN\n\n");
  REQUIRE(data.size() == 1);
  CHECK(data[0].sentence.tokens == std::vector<std::string>{"The", "Dow"});
  CHECK(data[0].tags == std::vector<std::string>{"NP[nb]/N", "N"});
}

TEST_CASE("tagged file keeps sentence order and tolerates missing final blank line") {
  const auto data = tagged("a\tX\n\n\nb\tY\nc\tZ");
  REQUIRE(data.size() == 2);
  CHECK(data[0].sentence.tokens == std::vector<std::string>{"a"});
  CHECK(data[1].tags == std::vector<std::string>{"Y", "Z"});
}

TEST_CASE("tagged line with one column is rejected at its line") {
  try {
    tagged("a\tX\nword\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(tagged("a\tX\tY\n"), FormatError);
  CHECK_THROWS_AS(tagged("a b\tX\n"), FormatError);
}

TEST_CASE("empty datasets are errors") {
  CHECK_THROWS_AS(tagged(""), FormatError);
  CHECK_THROWS_AS(tagged("\n\n"), FormatError);
  std::istringstream raw("   \n");
  CHECK_THROWS_AS(parse_raw(raw), FormatError);
}

TEST_CASE("raw file splits on whitespace") {
  std::istringstream in("a b c\n\n  d\te \n");
  const auto data = parse_raw(in);
  REQUIRE(data.size() == 2);
  CHECK(data[0].tokens == std::vector<std::string>{"a", "b", "c"});
  CHECK(data[1].tokens == std::vector<std::string>{"d", "e"});
}

TEST_CASE("tagged serialization reproduces canonical files byte for byte") {
  const std::string text = "The\tNP[nb]/N\nDow\tN\n\nfell\tS[dcl]\\NP\n\n";
  std::ostringstream out;
  write_tagged(out, tagged(text));
  CHECK(out.str() == text);
}

TEST_CASE("random tagged datasets round-trip") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> len(1, 6), sym(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TaggedSentence> data(static_cast<std::size_t>(len(rng)));
    for (auto& ts : data) {
      for (int i = len(rng); i > 0; --i) {
        ts.sentence.tokens.push_back("t" + std::to_string(sym(rng)));
        ts.tags.push_back("(S\\NP)/N" + std::to_string(sym(rng)));
      }
    }
    std::ostringstream out;
    write_tagged(out, data);
    CHECK(tagged(out.str()) == data);
  }
}

TEST_CASE("tag set keeps the most frequent tags") {
  const auto ts = build_tagset(with_tags({"A", "A", "A", "A", "A", "B", "B", "B", "C"}), 2);
  CHECK(ts.tags() == std::vector<std::string>{"A", "B", TagSet::kOther});
  CHECK(ts.index("C") == ts.other_index());
}

TEST_CASE("tag set frequency ties break lexicographically") {
  CHECK(build_tagset(with_tags({"B", "A", "B", "A"}), 1).tags() ==
        std::vector<std::string>{"A", TagSet::kOther});
  CHECK(build_tagset(with_tags({"z", "y", "x"}), 3).tags() ==
        std::vector<std::string>{"x", "y", "z", TagSet::kOther});
}

TEST_CASE("tag set of 425 distinct tags keeps them all at the default cap") {
  std::vector<std::string> tags;
  for (int i = 0; i < 425; ++i) tags.push_back("T" + std::to_string(i));
  const auto ts = build_tagset(with_tags(tags), 425);
  CHECK(ts.size() == 426);
  for (const auto& t : tags) CHECK(ts.index(t) != ts.other_index());
}

TEST_CASE("tag set is deterministic and lookup is total") {
  const auto data = with_tags({"N", "NP", "N", "S", "NP", "N"});
  auto shuffled = data;
  std::reverse(shuffled[0].tags.begin(), shuffled[0].tags.end());
  CHECK(build_tagset(data, 5) == build_tagset(shuffled, 5));
  const auto ts = build_tagset(data, 2);
  CHECK(ts.index("never-seen") == ts.other_index());
  CHECK(ts.tag(ts.index(TagSet::kOther)) == TagSet::kOther);
  CHECK_THROWS(build_tagset({}, 3));
  CHECK_THROWS(build_tagset(data, 0));
  CHECK_THROWS(TagSet({"A", "A"}));
}

TEST_CASE("embedding blocks are validated against the dataset") {
  const std::vector<Sentence> two{Sentence{{"a", "b"}}};
  std::istringstream ok("d0=3 sentences=1\nsentence 0 rows=2\n1 2 3\n4 5 6\n");
  const auto table = parse_embeddings(ok, two);
  CHECK(table.dim == 3);
  REQUIRE(table.blocks.size() == 1);
  CHECK(table.blocks[0].rows() == 2);
  CHECK(table.blocks[0](1, 2) == 6.0);

  const std::vector<Sentence> three{Sentence{{"a", "b", "c"}}};
  std::istringstream bad("d0=3 sentences=1\nsentence 0 rows=2\n1 2 3\n4 5 6\n");
  try {
    parse_embeddings(bad, three);
    FAIL("expected shape mismatch");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("sentence 0") != std::string::npos);
  }

  std::istringstream zeros("d0=4 sentences=1\nsentence 0 rows=2\n0 0 0 0\n0 0 0 0\n");
  CHECK(parse_embeddings(zeros, two).blocks[0] == Matrix(2, 4));

  std::istringstream text("d0=2 sentences=1\nsentence 0 rows=2\n1 x\n0 0\n");
  CHECK_THROWS_AS(parse_embeddings(text, two), FormatError);
  std::istringstream narrow("d0=2 sentences=1\nsentence 0 rows=2\n1\n0 0\n");
  CHECK_THROWS_AS(parse_embeddings(narrow, two), FormatError);
}

TEST_CASE("embedding tables round-trip exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Sentence> data{Sentence{{"a", "b"}}, Sentence{{"c"}}};
  EmbeddingTable t{5, {Matrix(2, 5), Matrix(1, 5)}};
  for (auto& b : t.blocks)
    for (double& v : b.data()) v = g(rng);
  std::stringstream io;
  write_embeddings(io, t);
  const auto back = parse_embeddings(io, data);
  CHECK(back.dim == 5);
  CHECK(back.blocks == t.blocks);
}
