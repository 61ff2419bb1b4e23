#include "nestccg/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <stdexcept>

#include "nestccg/io.h"

namespace nestccg {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

std::size_t parse_size(const std::string& v) {
  if (v.empty() || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("expected a non-negative integer, got '" + v + "'");
  }
  return static_cast<std::size_t>(std::stoull(v));
}

double parse_in(const std::string& v, double lo, double hi, bool lo_open, bool hi_open) {
  const double x = parse_double(v);
  if (std::isnan(x) || (lo_open ? x <= lo : x < lo) || (hi_open ? x >= hi : x > hi)) {
    throw std::invalid_argument("value " + v + " is out of range");
  }
  return x;
}

std::size_t parse_positive(const std::string& v) {
  const std::size_t x = parse_size(v);
  if (x == 0) throw std::invalid_argument("expected a positive integer, got '" + v + "'");
  return x;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& raw_key, const std::string& value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "graph") {
    config.model.graph = parse_graph_mode(value);
  } else if (key == "attention") {
    config.model.attention = parse_bool(value);
  } else if (key == "in_chunk") {
    config.model.edges.in_chunk = parse_bool(value);
  } else if (key == "cross_chunk") {
    config.model.edges.cross_chunk = parse_bool(value);
  } else if (key == "layers") {
    config.model.layers = parse_size(value);
  } else if (key == "dim") {
    config.model.dim = parse_positive(value);
  } else if (key == "dropout") {
    config.model.dropout = parse_in(value, 0.0, 1.0, false, true);
  } else if (key == "seed") {
    config.model.seed = parse_size(value);
    config.train.seed = config.model.seed;
  } else if (key == "epochs") {
    config.train.epochs = parse_positive(value);
  } else if (key == "batch" || key == "batch_size") {
    config.train.batch_size = parse_positive(value);
  } else if (key == "lr" || key == "learning_rate") {
    config.train.learning_rate = parse_in(value, 0.0, HUGE_VAL, true, true);
  } else if (key == "warmup" || key == "warmup_ratio") {
    config.train.warmup_ratio = parse_in(value, 0.0, 1.0, false, false);
  } else if (key == "max_len") {
    config.max_len = parse_positive(value);
  } else if (key == "pmi_threshold") {
    config.pmi_threshold = parse_double(value);
  } else if (key == "beam_ratio") {
    config.beam_ratio = parse_in(value, 0.0, 1.0, true, false);
  } else if (key == "max_tags") {
    config.max_tags = parse_positive(value);
  } else if (key == "train") {
    config.train_path = value;
  } else if (key == "dev") {
    config.dev_path = value;
  } else if (key == "lexicon") {
    config.lexicon_path = value;
  } else if (key == "embeddings") {
    config.embeddings_path = value;
  } else if (key == "dev_embeddings") {
    config.dev_embeddings_path = value;
  } else {
    throw std::invalid_argument("unknown setting '" + raw_key + "'");
  }
}

void apply_config(RunConfig& config, std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("expected 'key = value'", lineno);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw FormatError("empty key", lineno);
    try {
      apply_setting(config, key, value);
    } catch (const std::invalid_argument& e) {
      throw FormatError(e.what(), lineno);
    }
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  try {
    apply_config(config, in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace nestccg
