#include <doctest.h>

#include <cmath>
#include <sstream>

#include "nestccg/config.h"

using namespace nestccg;

TEST_CASE("defaults") {
  const RunConfig c;
  CHECK(c.model.graph == GraphMode::kChunk);
  CHECK(c.model.attention);
  CHECK(c.model.layers == 2);
  CHECK(c.model.dropout == 0.2);
  CHECK(c.train.learning_rate == 1e-3);
  CHECK(c.train.batch_size == 16);
  CHECK(c.train.epochs == 50);
  CHECK(c.train.seed == 42);
  CHECK(c.train.warmup_ratio == 0.1);
  CHECK(c.max_len == 5);
  CHECK(c.pmi_threshold == 0.0);
  CHECK(c.max_tags == 425);
}

TEST_CASE("config files set values, ignore comments and accept dashes") {
  RunConfig c;
  std::istringstream in(
      "# model\n"
      "graph = full\n"
      "attention = off   # plain aggregation\n"
      "\n"
      "max-len = 3\n"
      "pmi_threshold = inf\n"
      "lr = 0.05\n"
      "seed = 9\n");
  apply_config(c, in);
  CHECK(c.model.graph == GraphMode::kFull);
  CHECK_FALSE(c.model.attention);
  CHECK(c.max_len == 3);
  CHECK(std::isinf(c.pmi_threshold));
  CHECK(c.train.learning_rate == 0.05);
  CHECK(c.train.seed == 9);
  CHECK(c.model.seed == 9);
}

TEST_CASE("later settings override earlier ones") {
  RunConfig c;
  std::istringstream in("layers = 3\n");
  apply_config(c, in);
  apply_setting(c, "layers", "1");
  CHECK(c.model.layers == 1);
}

TEST_CASE("bad config lines report their line number") {
  RunConfig c;
  std::istringstream no_eq("layers = 2\njust words\n");
  try {
    apply_config(c, no_eq);
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream bad_value("\n\nlayers = many\n");
  try {
    apply_config(c, bad_value);
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 3);
  }
  std::istringstream unknown("colour = blue\n");
  CHECK_THROWS_AS(apply_config(c, unknown), FormatError);
  CHECK_THROWS(apply_setting(c, "graph", "tree"));
  CHECK_THROWS(apply_setting(c, "attention", "maybe"));
  CHECK_THROWS(apply_setting(c, "dropout", "1.0"));
  CHECK_THROWS(apply_config_file(c, "/nonexistent/config"));
}
