#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "nestccg/corpus.h"
#include "nestccg/lexicon.h"
#include "support/oracles.h"

namespace fs = std::filesystem;

namespace {

const std::string kData = NESTCCG_TEST_DATA;

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("nestccg-cli-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(const TempDir& dir, const std::string& args) {
  const std::string out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string(NESTCCG_CLI) + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

void write_corpus(const std::string& path, const std::vector<nestccg::TaggedSentence>& data) {
  std::ofstream out(path);
  nestccg::write_tagged(out, data);
}

double last_number_after(const std::string& text, const std::string& key) {
  const auto pos = text.rfind(key);
  REQUIRE(pos != std::string::npos);
  return std::stod(text.substr(pos + key.size()));
}

}  // namespace

TEST_CASE("build-lexicon writes the lexicon and a length histogram") {
  TempDir dir;
  auto r = cli(dir, "build-lexicon " + kData + "/dow_close.tagged " + (dir / "lex.txt"));
  REQUIRE(r.code == 0);
  CHECK(r.out.find("length 5: 3 n-grams") != std::string::npos);
  CHECK(r.out.find("total: 3 n-grams") != std::string::npos);
  CHECK(nestccg::load_lexicon(dir / "lex.txt").size() == 3);

  r = cli(dir, "build-lexicon " + kData + "/dow_close.tagged " + (dir / "uni.txt") +
                   " --pmi-threshold inf");
  REQUIRE(r.code == 0);
  const auto uni = nestccg::load_lexicon(dir / "uni.txt");
  CHECK(uni.size() == 7);
  CHECK(uni.length_histogram()[0] == 7);
  CHECK(r.out.find("length 2: 0 n-grams") != std::string::npos);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  TempDir dir;
  spit(dir / "cfg.txt", "# lexicon settings\nmax_len = 2\n");
  const std::string train = kData + "/dow_close.tagged ";
  REQUIRE(cli(dir, "build-lexicon " + train + (dir / "a.txt")).code == 0);
  REQUIRE(cli(dir, "build-lexicon " + train + (dir / "b.txt") + " --config " + (dir / "cfg.txt")).code == 0);
  REQUIRE(cli(dir, "build-lexicon " + train + (dir / "c.txt") + " --config " + (dir / "cfg.txt") +
                       " --max-len 3").code == 0);
  CHECK(nestccg::load_lexicon(dir / "a.txt").max_len() == 5);
  CHECK(nestccg::load_lexicon(dir / "b.txt").max_len() == 2);
  CHECK(nestccg::load_lexicon(dir / "c.txt").max_len() == 3);

  spit(dir / "bad.txt", "max_len = 2\nnonsense\n");
  const auto r = cli(dir, "build-lexicon " + train + (dir / "d.txt") + " --config " + (dir / "bad.txt"));
  CHECK(r.code != 0);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "d.txt"));
}

TEST_CASE("train, tag and eval agree with the logged training accuracy") {
  TempDir dir;
  const auto corpus = oracle::synthetic_chunk_corpus(21, 60, 0);
  write_corpus(dir / "train.tagged", corpus.train);
  {
    std::ofstream out(dir / "lex.txt");
    nestccg::write_lexicon(out, corpus.lexicon);
  }
  const std::string args = "train --train " + (dir / "train.tagged") + " --lexicon " + (dir / "lex.txt") +
                           " --dim 16 --epochs 6 --lr 0.01 --seed 3 -o ";
  const auto r = cli(dir, args + (dir / "m1.txt"));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("epoch 6 loss") != std::string::npos);
  const double logged = last_number_after(r.out, "selected epoch 6 train ");

  REQUIRE(cli(dir, "tag " + (dir / "m1.txt") + " " + (dir / "train.tagged") + " --tagged-input -o " +
                       (dir / "pred.tagged")).code == 0);
  const auto e = cli(dir, "eval " + (dir / "train.tagged") + " " + (dir / "pred.tagged"));
  REQUIRE(e.code == 0);
  CHECK(last_number_after(e.out, "TAG ") >= logged - 1.0);
  CHECK(e.out.find("LF not computed") != std::string::npos);

  // Same seed, same bytes.
  REQUIRE(cli(dir, args + (dir / "m2.txt") + " -q").code == 0);
  CHECK(slurp(dir / "m1.txt") == slurp(dir / "m2.txt"));
}

TEST_CASE("tag handles empty input and k-best output") {
  TempDir dir;
  const std::string train = kData + "/dow_close.tagged";
  REQUIRE(cli(dir, "train --train " + train + " --graph full --dim 8 --epochs 3 -q -o " + (dir / "m.txt")).code == 0);

  spit(dir / "empty.txt", "\n  \n");
  auto r = cli(dir, "tag " + (dir / "m.txt") + " " + (dir / "empty.txt"));
  CHECK(r.code == 0);
  CHECK(r.out.empty());

  spit(dir / "raw.txt", "The Dow closed\nat unknownword\n");
  r = cli(dir, "tag " + (dir / "m.txt") + " " + (dir / "raw.txt") + " --kbest --beam-ratio 1.0");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int tokens = 0, blanks = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) {
      ++blanks;
      continue;
    }
    ++tokens;
    CHECK(line.find(',') == std::string::npos);
    CHECK(line.find(':') != std::string::npos);
  }
  CHECK(tokens == 5);
  CHECK(blanks == 2);

  r = cli(dir, "tag " + (dir / "m.txt") + " " + (dir / "raw.txt") + " --kbest --beam-ratio 1e-300");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("<OTHER>:") != std::string::npos);
}

TEST_CASE("eval scores, errors and misalignment") {
  TempDir dir;
  spit(dir / "gold.tagged", "a\tX\nb\tY\n\nc\tX\nd\tY\n\n");
  spit(dir / "pred.tagged", "a\tX\nb\tY\n\nc\tX\nd\tZ\n\n");
  auto r = cli(dir, "eval " + (dir / "gold.tagged") + " " + (dir / "gold.tagged"));
  CHECK(r.code == 0);
  CHECK(r.out.find("TAG 100.00") != std::string::npos);
  r = cli(dir, "eval " + (dir / "gold.tagged") + " " + (dir / "pred.tagged"));
  CHECK(r.code == 0);
  CHECK(r.out.find("TAG 75.00") != std::string::npos);
  CHECK(r.out.find("sentence exact match 50.00") != std::string::npos);

  spit(dir / "none.tagged", "\n\n");
  r = cli(dir, "eval " + (dir / "none.tagged") + " " + (dir / "none.tagged"));
  CHECK(r.code != 0);
  CHECK(r.out.find("nan") == std::string::npos);

  spit(dir / "short.tagged", "a\tX\nb\tY\n\n");
  r = cli(dir, "eval " + (dir / "gold.tagged") + " " + (dir / "short.tagged"));
  CHECK(r.code != 0);
  CHECK(r.err.find("diverge at sentence 2") != std::string::npos);
}

TEST_CASE("parse reproduces the golden derivation and reports coverage") {
  TempDir dir;
  const std::string train = kData + "/dow_close.tagged";
  REQUIRE(cli(dir, "train --train " + train +
                       " --graph none --layers 0 --dropout 0 --lr 0.05 --batch 1 --epochs 100 -q -o " +
                       (dir / "m.txt")).code == 0);
  auto r = cli(dir, "parse " + (dir / "m.txt") + " " + train + " --tagged-input --beam-ratio 1.0");
  REQUIRE(r.code == 0);
  CHECK(r.out == slurp(kData + "/dow_close.deriv"));
  CHECK(r.err.find("coverage: 1/1 sentences parsed (100.00%)") != std::string::npos);

  spit(dir / "bad.txt", "closed closed\n");
  r = cli(dir, "parse " + (dir / "m.txt") + " " + (dir / "bad.txt") + " --beam-ratio 1.0");
  REQUIRE(r.code == 0);
  CHECK(r.out == "NOPARSE\n");
  CHECK(r.err.find("coverage: 0/1") != std::string::npos);
}

TEST_CASE("inspect-graph prints chunks and edges") {
  TempDir dir;
  const auto r = cli(dir, "inspect-graph --lexicon " + kData +
                              "/four_chunk.lexicon all students are required to finish in two hours");
  REQUIRE(r.code == 0);
  CHECK(r.out == slurp(kData + "/four_chunk.graph"));

  const auto none = cli(dir, "inspect-graph --graph none a b c");
  REQUIRE(none.code == 0);
  CHECK(none.out.empty());
  CHECK(cli(dir, "inspect-graph a b").code != 0);  // chunk mode without a lexicon
}

TEST_CASE("failing commands leave no partial output") {
  TempDir dir;
  const std::string train = kData + "/dow_close.tagged";
  auto r = cli(dir, "train --train " + train + " -o " + (dir / "m.txt"));
  CHECK(r.code != 0);
  CHECK(r.err.find("error: ") == 0);
  CHECK_FALSE(fs::exists(dir / "m.txt"));

  spit(dir / "bad.tagged", "a\tX\nb\n");
  r = cli(dir, "build-lexicon " + (dir / "bad.tagged") + " " + (dir / "lex.txt"));
  CHECK(r.code != 0);
  CHECK(r.err.find("line 2") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "lex.txt"));

  REQUIRE(cli(dir, "train --train " + train + " --graph none --epochs 1 -q -o " + (dir / "m.txt")).code == 0);
  spit(dir / "out.txt", "previous\n");
  r = cli(dir, "tag " + (dir / "m.txt") + " " + (dir / "bad.tagged") + " --tagged-input -o " + (dir / "out.txt"));
  CHECK(r.code != 0);
  CHECK(slurp(dir / "out.txt") == "previous\n");
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
  }
  CHECK(cli(dir, "frobnicate").code != 0);
}
