#ifndef NESTCCG_CONFIG_H_
#define NESTCCG_CONFIG_H_

#include <cstddef>
#include <iosfwd>
#include <string>

#include "nestccg/agcn.h"

namespace nestccg {

// Everything a command can be configured with. Defaults are the model and
// lexicon defaults; a config file overrides them and flags override both.
struct RunConfig {
  ModelOptions model;
  TrainConfig train;
  std::size_t max_len = 5;
  double pmi_threshold = 0.0;
  double beam_ratio = 0.01;
  std::size_t max_tags = 425;

  std::string train_path;
  std::string dev_path;
  std::string lexicon_path;
  std::string embeddings_path;
  std::string dev_embeddings_path;
};

// Keys use underscores or dashes interchangeably: "lr", "max-len",
// "pmi_threshold", "attention = false", "graph = full", ...
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);

// "key = value" lines; '#' starts a comment; blank lines are ignored.
void apply_config(RunConfig& config, std::istream& in);
void apply_config_file(RunConfig& config, const std::string& path);

}  // namespace nestccg

#endif  // NESTCCG_CONFIG_H_
