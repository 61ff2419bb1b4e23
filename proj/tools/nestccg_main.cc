// nestccg: lexicon building, tagger training, tagging, parsing and evaluation.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nestccg/agcn.h"
#include "nestccg/categories.h"
#include "nestccg/chunk_graph.h"
#include "nestccg/config.h"
#include "nestccg/corpus.h"
#include "nestccg/derivation.h"
#include "nestccg/io.h"
#include "nestccg/lexicon.h"

namespace {

using namespace nestccg;

// Flags are recorded as settings and applied after the config file, which
// gives flag > config > default precedence.
struct Settings {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> flags;

  RunConfig resolve() const {
    RunConfig config;
    if (!config_path.empty()) apply_config_file(config, config_path);
    for (const auto& [k, v] : flags) apply_setting(config, k, v);
    return config;
  }
};

void add_value_flag(CLI::App* cmd, Settings& s, const std::string& flag, const std::string& key,
                    const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&s, key](const std::string& v) { s.flags.emplace_back(key, v); }, help);
}

void add_switch(CLI::App* cmd, Settings& s, const std::string& flag, const std::string& key,
                const std::string& value, const std::string& help) {
  cmd->add_flag_callback(flag, [&s, key, value] { s.flags.emplace_back(key, value); }, help);
}

void add_config_flag(CLI::App* cmd, Settings& s) {
  cmd->add_option("--config", s.config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);
}

void add_model_flags(CLI::App* cmd, Settings& s) {
  add_value_flag(cmd, s, "--graph", "graph", "graph mode: chunk, full or none");
  add_switch(cmd, s, "--no-attention", "attention", "false", "plain GCN aggregation");
  add_switch(cmd, s, "--no-in-chunk", "in_chunk", "false", "drop in-chunk edges");
  add_switch(cmd, s, "--no-cross-chunk", "cross_chunk", "false", "drop cross-chunk edges");
  add_value_flag(cmd, s, "--layers", "layers", "number of graph layers");
  add_value_flag(cmd, s, "--dim", "dim", "hidden dimension (lookup encoder)");
  add_value_flag(cmd, s, "--dropout", "dropout", "dropout rate");
  add_value_flag(cmd, s, "--seed", "seed", "random seed");
}

// Writes to `path` atomically, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::function<void(std::ostream&)>& writer) {
  if (path.empty() || path == "-") {
    writer(std::cout);
    std::cout.flush();
  } else {
    write_file_atomic(path, writer);
  }
}

std::vector<Sentence> read_input(const std::string& path, bool tagged) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  try {
    if (tagged) return sentences_of(parse_tagged(in));
    return parse_raw(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

// An input without any token is a valid, vacuous request for tag and parse.
std::vector<Sentence> read_sentences_or_empty(const std::string& path, bool tagged) {
  std::ifstream probe(path);
  if (!probe) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  bool any = false;
  while (std::getline(probe, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      any = true;
      break;
    }
  }
  if (!any) return {};
  return read_input(path, tagged);
}

std::vector<Matrix> embedding_blocks(const TaggerModel& model, const std::string& path,
                                     const std::vector<Sentence>& data) {
  if (model.encoder().kind != EncoderKind::kPrecomputed) return {};
  if (path.empty()) throw std::runtime_error("this model needs --embeddings");
  EmbeddingTable table = load_embeddings(path, data);
  if (table.dim != model.dim()) {
    throw std::runtime_error("embedding dimension " + std::to_string(table.dim) +
                             " does not match the checkpoint dimension " +
                             std::to_string(model.dim()));
  }
  return std::move(table.blocks);
}

const Matrix* block_at(const std::vector<Matrix>& blocks, std::size_t i) {
  return blocks.empty() ? nullptr : &blocks[i];
}

int cmd_build_lexicon(const std::string& train_path, const std::string& out_path, bool raw,
                      const Settings& s) {
  const RunConfig config = s.resolve();
  const std::vector<Sentence> data = raw ? load_raw(train_path) : sentences_of(load_tagged(train_path));
  const PMILexicon lexicon = build_lexicon(data, config.max_len, config.pmi_threshold);
  write_file_atomic(out_path, [&](std::ostream& out) { write_lexicon(out, lexicon); });
  const auto hist = lexicon.length_histogram();
  for (std::size_t k = 0; k < hist.size(); ++k) {
    std::cout << "length " << k + 1 << ": " << hist[k] << " n-grams\n";
  }
  std::cout << "total: " << lexicon.size() << " n-grams\n";
  return 0;
}

int cmd_train(const std::string& out_path, bool quiet, const Settings& s) {
  RunConfig config = s.resolve();
  if (config.train_path.empty()) throw std::runtime_error("no training data (--train)");
  const auto train_data = load_tagged(config.train_path);
  std::vector<TaggedSentence> dev_data;
  if (!config.dev_path.empty()) dev_data = load_tagged(config.dev_path);

  std::optional<PMILexicon> lexicon;
  if (config.model.graph == GraphMode::kChunk && config.model.layers > 0) {
    if (config.lexicon_path.empty()) {
      throw std::runtime_error("chunk graphs need a lexicon (--lexicon); see build-lexicon");
    }
    lexicon = load_lexicon(config.lexicon_path);
  }

  EmbeddingTable train_emb, dev_emb;
  std::vector<std::string> vocabulary;
  if (!config.embeddings_path.empty()) {
    config.model.encoder = EncoderKind::kPrecomputed;
    train_emb = load_embeddings(config.embeddings_path, sentences_of(train_data));
    config.model.dim = train_emb.dim;
    if (!dev_data.empty()) {
      if (config.dev_embeddings_path.empty()) {
        throw std::runtime_error("a dev set with precomputed embeddings needs --dev-embeddings");
      }
      dev_emb = load_embeddings(config.dev_embeddings_path, sentences_of(dev_data));
    }
  } else {
    std::set<std::string> words;
    for (const auto& ts : train_data) words.insert(ts.sentence.tokens.begin(), ts.sentence.tokens.end());
    vocabulary.assign(words.begin(), words.end());
  }

  TaggerModel model(config.model, build_tagset(train_data, config.max_tags), vocabulary, lexicon);
  const auto train_examples = make_examples(model, train_data, &train_emb);
  const auto dev_examples = make_examples(model, dev_data, &dev_emb);

  std::cout << "parameters: " << model.parameter_count() << ", tags: " << model.tagset().size()
            << ", sentences: " << train_data.size() << "\n";
  const auto log = train(model, train_examples, config.train,
                         dev_examples.empty() ? nullptr : &dev_examples, [&](const EpochLog& e) {
                           if (quiet) return;
                           char buf[160];
                           std::snprintf(buf, sizeof buf, "epoch %zu loss %.6f train %.2f", e.epoch,
                                         e.loss, 100.0 * e.train_accuracy);
                           std::cout << buf;
                           if (e.dev_accuracy) {
                             std::snprintf(buf, sizeof buf, " dev %.2f", 100.0 * *e.dev_accuracy);
                             std::cout << buf;
                           }
                           std::cout << std::endl;
                         });
  const EpochLog& chosen = log.epochs.at(log.selected_epoch - 1);
  char buf[160];
  std::snprintf(buf, sizeof buf, "selected epoch %zu train %.2f", log.selected_epoch,
                100.0 * chosen.train_accuracy);
  std::cout << buf;
  if (chosen.dev_accuracy) {
    std::snprintf(buf, sizeof buf, " dev %.2f", 100.0 * *chosen.dev_accuracy);
    std::cout << buf;
  }
  std::cout << "\n";
  save_checkpoint(out_path, model);
  return 0;
}

int cmd_tag(const std::string& model_path, const std::string& input, const std::string& out_path,
            bool kbest, bool tagged_input, const Settings& s) {
  const RunConfig config = s.resolve();
  const TaggerModel model = load_checkpoint(model_path);
  const auto data = read_sentences_or_empty(input, tagged_input);
  const auto blocks = embedding_blocks(model, config.embeddings_path, data);
  std::ostringstream out;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sentence& sent = data[i];
    const AdjacencyMatrix graph = model.graph_for(sent);
    if (kbest) {
      const auto lists = predict_kbest(model, sent, graph, config.beam_ratio, block_at(blocks, i));
      for (std::size_t t = 0; t < sent.size(); ++t) {
        out << sent.tokens[t] << '\t';
        for (std::size_t k = 0; k < lists[t].size(); ++k) {
          out << (k ? "," : "") << model.tagset().tag(lists[t][k].tag) << ':'
              << format_double(lists[t][k].log_prob);
        }
        out << '\n';
      }
    } else {
      const auto tags = decode(model_forward(model, sent, graph, false, block_at(blocks, i))).tags;
      for (std::size_t t = 0; t < sent.size(); ++t) {
        out << sent.tokens[t] << '\t' << model.tagset().tag(tags[t]) << '\n';
      }
    }
    out << '\n';
  }
  emit(out_path, [&](std::ostream& o) { o << out.str(); });
  return 0;
}

int cmd_parse(const std::string& model_path, const std::string& input, const std::string& out_path,
              bool tagged_input, const Settings& s) {
  const RunConfig config = s.resolve();
  const TaggerModel model = load_checkpoint(model_path);
  const auto data = read_sentences_or_empty(input, tagged_input);
  const auto blocks = embedding_blocks(model, config.embeddings_path, data);

  // Tag strings that are not categories (and OTHER) never enter the chart.
  std::vector<std::optional<Category>> categories;
  for (const auto& tag : model.tagset().tags()) {
    std::optional<Category> c;
    if (tag != TagSet::kOther) {
      try {
        c = parse_category(tag);
      } catch (const CategoryParseError&) {
      }
    }
    categories.push_back(c);
  }

  std::ostringstream out;
  std::size_t parsed = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sentence& sent = data[i];
    const auto lists =
        predict_kbest(model, sent, model.graph_for(sent), config.beam_ratio, block_at(blocks, i));
    std::vector<std::vector<Candidate>> candidates(sent.size());
    bool feasible = true;
    for (std::size_t t = 0; t < sent.size(); ++t) {
      for (const ScoredTag& st : lists[t]) {
        if (categories[st.tag]) candidates[t].push_back({*categories[st.tag], st.log_prob});
      }
      feasible = feasible && !candidates[t].empty();
    }
    std::optional<Derivation> d;
    if (feasible) d = cky_parse(candidates);
    if (d) {
      out << format_derivation(*d, sent.tokens) << '\n';
      ++parsed;
    } else {
      out << "NOPARSE\n";
    }
  }
  emit(out_path, [&](std::ostream& o) { o << out.str(); });
  char buf[128];
  std::snprintf(buf, sizeof buf, "coverage: %zu/%zu sentences parsed (%.2f%%)\n", parsed,
                data.size(), data.empty() ? 100.0 : 100.0 * parsed / data.size());
  std::cerr << buf;
  return 0;
}

int cmd_eval(const std::string& gold_path, const std::string& pred_path) {
  const auto gold = load_tagged(gold_path);
  const auto pred = load_tagged(pred_path);
  std::size_t tokens = 0, correct = 0, exact = 0;
  for (std::size_t i = 0; i < std::max(gold.size(), pred.size()); ++i) {
    if (i >= gold.size() || i >= pred.size() || gold[i].sentence != pred[i].sentence) {
      throw std::runtime_error("files diverge at sentence " + std::to_string(i + 1));
    }
    std::size_t ok = 0;
    for (std::size_t t = 0; t < gold[i].tags.size(); ++t) {
      ok += gold[i].tags[t] == pred[i].tags[t] && pred[i].tags[t] != TagSet::kOther;
    }
    correct += ok;
    tokens += gold[i].tags.size();
    exact += ok == gold[i].tags.size();
  }
  if (tokens == 0) throw std::runtime_error("no tokens to evaluate");
  char buf[128];
  std::snprintf(buf, sizeof buf, "TAG %.2f\nsentence exact match %.2f\n",
                100.0 * static_cast<double>(correct) / static_cast<double>(tokens),
                100.0 * static_cast<double>(exact) / static_cast<double>(gold.size()));
  std::cout << buf
            << "LF not computed: labeled dependency F requires an external conversion of "
               "derivations to dependencies\n";
  return 0;
}

int cmd_inspect_graph(const std::vector<std::string>& words, const std::string& input,
                      const Settings& s) {
  const RunConfig config = s.resolve();
  std::vector<Sentence> data;
  if (!input.empty()) data = load_raw(input);
  if (!words.empty()) data.push_back(Sentence{words});
  if (data.empty()) throw std::runtime_error("no sentence given");
  std::optional<PMILexicon> lexicon;
  if (!config.lexicon_path.empty()) lexicon = load_lexicon(config.lexicon_path);
  if (config.model.graph == GraphMode::kChunk && !lexicon) {
    throw std::runtime_error("chunk graphs need a lexicon (--lexicon)");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sentence& sent = data[i];
    if (i) std::cout << '\n';
    ChunkPartition partition;
    if (lexicon) {
      partition = chunk_sentence(sent, *lexicon);
      std::cout << format_partition(sent, partition) << '\n';
    }
    for (const Edge& e : graph_edges(partition, sent.size(), config.model.graph, config.model.edges)) {
      std::cout << e.i << ' ' << e.j << ' ' << to_string(e.kind) << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chunk-graph supertagger and CCG derivation toolkit"};
  app.require_subcommand(1);
  Settings settings;

  std::string train_path, out_path, model_path, input_path, gold_path, pred_path;
  bool raw = false, quiet = false, kbest = false, tagged_input = false;
  std::vector<std::string> words;

  auto* lex = app.add_subcommand("build-lexicon", "extract the PMI n-gram lexicon");
  lex->add_option("train", train_path, "training file (tagged, or raw with --raw)")
      ->required()
      ->check(CLI::ExistingFile);
  lex->add_option("output", out_path, "lexicon file to write")->required();
  lex->add_flag("--raw", raw, "training file is raw text");
  add_value_flag(lex, settings, "--max-len", "max_len", "longest n-gram");
  add_value_flag(lex, settings, "--pmi-threshold", "pmi_threshold", "PMI cut (inf: unigrams only)");
  add_config_flag(lex, settings);

  auto* tr = app.add_subcommand("train", "train a tagger and write a checkpoint");
  add_value_flag(tr, settings, "--train", "train", "tagged training file");
  add_value_flag(tr, settings, "--dev", "dev", "tagged dev file for checkpoint selection");
  add_value_flag(tr, settings, "--lexicon", "lexicon", "lexicon file (chunk graphs)");
  add_value_flag(tr, settings, "--embeddings", "embeddings", "precomputed training embeddings");
  add_value_flag(tr, settings, "--dev-embeddings", "dev_embeddings", "precomputed dev embeddings");
  tr->add_option("-o,--output", out_path, "checkpoint to write")->required();
  tr->add_flag("-q,--quiet", quiet, "no per-epoch log");
  add_model_flags(tr, settings);
  add_value_flag(tr, settings, "--epochs", "epochs", "training epochs");
  add_value_flag(tr, settings, "--batch", "batch", "sentences per update");
  add_value_flag(tr, settings, "--lr", "lr", "peak learning rate");
  add_value_flag(tr, settings, "--warmup", "warmup", "warmup fraction of all updates");
  add_value_flag(tr, settings, "--max-tags", "max_tags", "tag set size before OTHER");
  add_config_flag(tr, settings);

  auto* tg = app.add_subcommand("tag", "tag raw sentences");
  tg->add_option("model", model_path, "checkpoint")->required()->check(CLI::ExistingFile);
  tg->add_option("input", input_path, "raw sentences, one per line")->required()->check(CLI::ExistingFile);
  tg->add_option("-o,--output", out_path, "output file (default stdout)");
  tg->add_flag("--kbest", kbest, "emit every tag within the beam with its log-probability");
  tg->add_flag("--tagged-input", tagged_input, "input is a tagged file; its tags are ignored");
  add_value_flag(tg, settings, "--beam-ratio", "beam_ratio", "k-best cutoff relative to the best tag");
  add_value_flag(tg, settings, "--embeddings", "embeddings", "precomputed input embeddings");
  add_config_flag(tg, settings);

  auto* ps = app.add_subcommand("parse", "tag and build CCG derivations");
  ps->add_option("model", model_path, "checkpoint")->required()->check(CLI::ExistingFile);
  ps->add_option("input", input_path, "raw sentences, one per line")->required()->check(CLI::ExistingFile);
  ps->add_option("-o,--output", out_path, "output file (default stdout)");
  ps->add_flag("--tagged-input", tagged_input, "input is a tagged file; its tags are ignored");
  add_value_flag(ps, settings, "--beam-ratio", "beam_ratio", "supertag cutoff relative to the best tag");
  add_value_flag(ps, settings, "--embeddings", "embeddings", "precomputed input embeddings");
  add_config_flag(ps, settings);

  auto* ev = app.add_subcommand("eval", "tagging accuracy of predictions against gold");
  ev->add_option("gold", gold_path, "gold tagged file")->required()->check(CLI::ExistingFile);
  ev->add_option("predicted", pred_path, "predicted tagged file")->required()->check(CLI::ExistingFile);

  auto* ig = app.add_subcommand("inspect-graph", "print chunks and graph edges of sentences");
  ig->add_option("words", words, "sentence tokens");
  ig->add_option("-i,--input", input_path, "raw sentences file")->check(CLI::ExistingFile);
  add_value_flag(ig, settings, "--lexicon", "lexicon", "lexicon file");
  add_value_flag(ig, settings, "--graph", "graph", "graph mode: chunk, full or none");
  add_switch(ig, settings, "--no-in-chunk", "in_chunk", "false", "drop in-chunk edges");
  add_switch(ig, settings, "--no-cross-chunk", "cross_chunk", "false", "drop cross-chunk edges");
  add_config_flag(ig, settings);

  CLI11_PARSE(app, argc, argv);

  try {
    if (lex->parsed()) return cmd_build_lexicon(train_path, out_path, raw, settings);
    if (tr->parsed()) return cmd_train(out_path, quiet, settings);
    if (tg->parsed()) return cmd_tag(model_path, input_path, out_path, kbest, tagged_input, settings);
    if (ps->parsed()) return cmd_parse(model_path, input_path, out_path, tagged_input, settings);
    if (ev->parsed()) return cmd_eval(gold_path, pred_path);
    if (ig->parsed()) return cmd_inspect_graph(words, input_path, settings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
