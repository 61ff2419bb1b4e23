#include "nestccg/agcn.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "nestccg/io.h"

namespace nestccg {

std::string to_string(EncoderKind kind) {
  return kind == EncoderKind::kLookup ? "lookup" : "precomputed";
}

EncoderKind parse_encoder_kind(const std::string& s) {
  if (s == "lookup") return EncoderKind::kLookup;
  if (s == "precomputed") return EncoderKind::kPrecomputed;
  throw std::invalid_argument("unknown encoder kind '" + s + "'");
}

std::size_t Encoder::lookup(const std::string& word) const {
  auto it = index.find(word);
  return it == index.end() ? 0 : it->second;
}

void Encoder::set_vocabulary(std::vector<std::string> known_words) {
  words.clear();
  index.clear();
  words.emplace_back(kUnknownWord);
  index.emplace(kUnknownWord, 0);
  for (auto& w : known_words) {
    if (index.emplace(w, words.size()).second) words.push_back(std::move(w));
  }
}

AGCNLayer::AGCNLayer(std::size_t d, const std::string& prefix)
    : weight(prefix + ".weight", Matrix(d, d)),
      bias(prefix + ".bias", Matrix(1, d)),
      w_left(prefix + ".w_left", Matrix(d, d)),
      w_right(prefix + ".w_right", Matrix(d, d)),
      w_self(prefix + ".w_self", Matrix(d, d)),
      ln_gain(prefix + ".ln_gain", Matrix(1, d, 1.0)),
      ln_bias(prefix + ".ln_bias", Matrix(1, d)) {}

std::vector<Parameter*> AGCNLayer::parameters() {
  return {&weight, &bias, &w_left, &w_right, &w_self, &ln_gain, &ln_bias};
}

namespace {

void glorot(Matrix& m, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : m.data()) v = dist(rng);
}

}  // namespace

TaggerModel::TaggerModel(const ModelOptions& options, TagSet tagset,
                         std::vector<std::string> vocabulary, std::optional<PMILexicon> lexicon)
    : options_(options), tagset_(std::move(tagset)), lexicon_(std::move(lexicon)) {
  if (options_.dim == 0) throw std::invalid_argument("TaggerModel: dimension must be positive");
  if (options_.dropout < 0.0 || options_.dropout >= 1.0) {
    throw std::invalid_argument("TaggerModel: dropout must lie in [0, 1)");
  }
  if (options_.graph == GraphMode::kChunk && options_.layers > 0 && !lexicon_) {
    throw std::invalid_argument("TaggerModel: chunk graphs need a lexicon");
  }
  std::mt19937_64 rng(options_.seed);
  encoder_.kind = options_.encoder;
  encoder_.dim = options_.dim;
  if (encoder_.kind == EncoderKind::kLookup) {
    encoder_.set_vocabulary(std::move(vocabulary));
    encoder_.embedding = Parameter("embedding", Matrix(encoder_.words.size(), options_.dim));
    glorot(encoder_.embedding.value, rng);
  }
  for (std::size_t l = 0; l < options_.layers; ++l) {
    AGCNLayer layer(options_.dim, "layer" + std::to_string(l));
    for (Parameter* p : {&layer.weight, &layer.w_left, &layer.w_right, &layer.w_self}) {
      glorot(p->value, rng);
    }
    layers_.push_back(std::move(layer));
  }
  output_ = Parameter("output", Matrix(tagset_.size(), options_.dim));
  glorot(output_.value, rng);
}

std::vector<Parameter*> TaggerModel::parameters() {
  std::vector<Parameter*> ps;
  if (encoder_.kind == EncoderKind::kLookup) ps.push_back(&encoder_.embedding);
  for (auto& layer : layers_)
    for (Parameter* p : layer.parameters()) ps.push_back(p);
  ps.push_back(&output_);
  return ps;
}

std::size_t TaggerModel::parameter_count() const {
  std::size_t n = output_.value.size();
  if (encoder_.kind == EncoderKind::kLookup) n += encoder_.embedding.value.size();
  for (const auto& layer : layers_) n += 4 * layer.weight.value.size() + 3 * layer.bias.value.size();
  return n;
}

AdjacencyMatrix TaggerModel::graph_for(const Sentence& s) const {
  if (options_.graph == GraphMode::kChunk) {
    if (!lexicon_) throw std::logic_error("chunk graph requested but the model has no lexicon");
    return build_adjacency(chunk_sentence(s, *lexicon_), s.size(), GraphMode::kChunk,
                           options_.edges);
  }
  return build_adjacency(ChunkPartition{}, s.size(), options_.graph, options_.edges);
}

namespace {

Var apply_dropout(Tape& tape, Var x, double rate, std::mt19937_64* rng) {
  if (rng == nullptr || rate <= 0.0) return x;
  const Matrix& v = tape.value(x);
  Matrix keep(v.rows(), v.cols());
  std::bernoulli_distribution coin(1.0 - rate);
  const double scale = 1.0 / (1.0 - rate);
  for (double& k : keep.data()) k = coin(*rng) ? scale : 0.0;
  return tape.scale_const(x, keep);
}

// Works for both const (inference) and mutable (training) layers: const
// parameters enter the tape as constants.
template <typename Layer>
Var attention_on_tape(Tape& tape, Layer& layer, Var h, const Matrix& mask) {
  auto score = [&](auto& w) { return tape.matmul_nt(tape.matmul(h, tape.param(w)), h); };
  const Var logits = tape.positional_select(score(layer.w_left), score(layer.w_right),
                                            score(layer.w_self));
  return tape.masked_softmax_rows(logits, mask);
}

template <typename Layer>
Var layer_on_tape(Tape& tape, Layer& layer, Var h, const Matrix& mask, bool attention) {
  const Var coef = attention ? attention_on_tape(tape, layer, h, mask) : tape.constant(mask);
  const Var messages = tape.add_bias(tape.matmul_nt(h, tape.param(layer.weight)),
                                     tape.param(layer.bias));
  const Var agg = tape.matmul(coef, messages);
  return tape.relu(
      tape.layer_norm_rows(agg, tape.param(layer.ln_gain), tape.param(layer.ln_bias)));
}

template <typename Model>
Var forward_on_tape(Tape& tape, Model& model, const Sentence& sentence, const AdjacencyMatrix& graph,
                    const Matrix* embeddings, std::mt19937_64* dropout_rng) {
  const std::size_t n = sentence.size();
  if (n == 0) throw std::invalid_argument("model_forward: empty sentence");
  if (graph.size() != n) {
    throw std::invalid_argument("model_forward: graph has " + std::to_string(graph.size()) +
                                " nodes for " + std::to_string(n) + " tokens");
  }
  auto& enc = model.encoder();
  Var h;
  if (enc.kind == EncoderKind::kLookup) {
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = enc.lookup(sentence.tokens[i]);
    h = tape.gather_rows(tape.param(enc.embedding), std::move(ids));
  } else {
    if (embeddings == nullptr) {
      throw std::invalid_argument("model_forward: precomputed encoder needs embeddings");
    }
    if (embeddings->rows() != n || embeddings->cols() != model.dim()) {
      throw std::invalid_argument("model_forward: embedding block is " +
                                  std::to_string(embeddings->rows()) + "x" +
                                  std::to_string(embeddings->cols()) + ", model expects " +
                                  std::to_string(n) + "x" + std::to_string(model.dim()));
    }
    h = tape.constant(*embeddings);
  }
  const double rate = model.options().dropout;
  const bool attention = model.options().attention;
  const Matrix mask = graph.to_matrix();
  for (auto& layer : model.layers()) {
    h = apply_dropout(tape, h, rate, dropout_rng);
    h = layer_on_tape(tape, layer, h, mask, attention);
  }
  h = apply_dropout(tape, h, rate, dropout_rng);
  return tape.matmul_nt(h, tape.param(model.output()));
}

}  // namespace

Matrix attention_scores(const Matrix& hidden, const AdjacencyMatrix& graph, const AGCNLayer& layer) {
  if (hidden.rows() != graph.size() || hidden.cols() != layer.dim()) {
    throw std::invalid_argument("attention_scores: shape mismatch");
  }
  Tape tape(false);
  return tape.value(attention_on_tape(tape, layer, tape.constant(hidden), graph.to_matrix()));
}

Matrix layer_forward(const Matrix& hidden, const AdjacencyMatrix& graph, const AGCNLayer& layer,
                     bool attention) {
  if (hidden.rows() != graph.size() || hidden.cols() != layer.dim()) {
    throw std::invalid_argument("layer_forward: shape mismatch");
  }
  Tape tape(false);
  return tape.value(
      layer_on_tape(tape, layer, tape.constant(hidden), graph.to_matrix(), attention));
}

Matrix model_forward(const TaggerModel& model, const Sentence& sentence,
                     const AdjacencyMatrix& graph, bool train_mode, const Matrix* embeddings,
                     std::mt19937_64* rng) {
  if (train_mode && rng == nullptr) {
    throw std::invalid_argument("model_forward: train mode needs a dropout generator");
  }
  Tape tape(false);
  return tape.value(
      forward_on_tape(tape, model, sentence, graph, embeddings, train_mode ? rng : nullptr));
}

Decoded decode(const Matrix& logits) {
  Decoded out{std::vector<std::size_t>(logits.rows()), Matrix(logits.rows(), logits.cols())};
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto p = softmax(logits.row_span(r));
    std::copy(p.begin(), p.end(), out.probs.row_span(r).begin());
    const auto row = logits.row_span(r);
    out.tags[r] = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

std::vector<std::vector<ScoredTag>> kbest_from_probs(const Matrix& probs, double beam_ratio) {
  if (!(beam_ratio > 0.0 && beam_ratio <= 1.0)) {
    throw std::invalid_argument("beam ratio must lie in (0, 1]");
  }
  std::vector<std::vector<ScoredTag>> out(probs.rows());
  for (std::size_t r = 0; r < probs.rows(); ++r) {
    const auto row = probs.row_span(r);
    std::vector<std::size_t> order(row.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
    const double cutoff = beam_ratio * row[order.front()];
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && row[order[k]] < cutoff) break;
      out[r].push_back({order[k], std::log(row[order[k]])});
    }
  }
  return out;
}

std::vector<std::vector<ScoredTag>> predict_kbest(const TaggerModel& model, const Sentence& sentence,
                                                  const AdjacencyMatrix& graph, double beam_ratio,
                                                  const Matrix* embeddings) {
  return kbest_from_probs(decode(model_forward(model, sentence, graph, false, embeddings)).probs,
                          beam_ratio);
}

std::vector<Example> make_examples(const TaggerModel& model, const std::vector<TaggedSentence>& data,
                                   const EmbeddingTable* embeddings) {
  if (model.encoder().kind == EncoderKind::kPrecomputed) {
    if (embeddings == nullptr) throw std::invalid_argument("precomputed encoder needs embeddings");
    if (embeddings->dim != model.dim()) {
      throw std::invalid_argument("embedding dimension " + std::to_string(embeddings->dim) +
                                  " does not match model dimension " +
                                  std::to_string(model.dim()));
    }
    if (embeddings->blocks.size() != data.size()) {
      throw std::invalid_argument("embedding table and dataset differ in sentence count");
    }
  }
  std::vector<Example> out;
  out.reserve(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    const auto& ts = data[s];
    Example ex{ts.sentence, {}, model.graph_for(ts.sentence), {}};
    for (const auto& t : ts.tags) ex.gold.push_back(model.tagset().index(t));
    if (model.encoder().kind == EncoderKind::kPrecomputed) ex.embeddings = embeddings->blocks[s];
    out.push_back(std::move(ex));
  }
  return out;
}

Evaluation example_loss(TaggerModel& model, const Example& ex, bool with_gradients, bool train_mode,
                        std::mt19937_64* rng, double grad_scale) {
  Tape tape(with_gradients);
  const Matrix* emb = ex.embeddings.empty() ? nullptr : &ex.embeddings;
  const Var logits = with_gradients
                         ? forward_on_tape(tape, model, ex.sentence, ex.graph, emb,
                                           train_mode ? rng : nullptr)
                         : forward_on_tape(tape, std::as_const(model), ex.sentence, ex.graph, emb,
                                           train_mode ? rng : nullptr);
  const Var loss = tape.mean_cross_entropy(logits, ex.gold);
  if (with_gradients) tape.backward(loss, grad_scale);
  return {tape.value(loss)[0], tape.min_relu_margin()};
}

double scheduled_learning_rate(const TrainConfig& config, std::size_t step, std::size_t total) {
  const auto warmup = static_cast<std::size_t>(config.warmup_ratio * static_cast<double>(total));
  if (step < warmup) {
    return config.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup);
  }
  const double remaining = static_cast<double>(total - std::min(step, total));
  return config.learning_rate * remaining / static_cast<double>(total - warmup);
}

double accuracy(const TaggerModel& model, const std::vector<Example>& data) {
  std::size_t correct = 0, total = 0;
  for (const auto& ex : data) {
    const Matrix* emb = ex.embeddings.empty() ? nullptr : &ex.embeddings;
    const auto tags = decode(model_forward(model, ex.sentence, ex.graph, false, emb)).tags;
    for (std::size_t i = 0; i < tags.size(); ++i) {
      correct += tags[i] == ex.gold[i] && tags[i] != model.tagset().other_index();
    }
    total += tags.size();
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

TrainingLog train(TaggerModel& model, const std::vector<Example>& data, const TrainConfig& config,
                  const std::vector<Example>* dev,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  if (data.empty()) throw std::invalid_argument("train: no training data");
  if (config.batch_size == 0) throw std::invalid_argument("train: batch size must be positive");
  const auto params = model.parameters();
  std::vector<Matrix> m1, m2;
  for (Parameter* p : params) {
    m1.emplace_back(p->value.rows(), p->value.cols());
    m2.emplace_back(p->value.rows(), p->value.cols());
  }

  std::mt19937_64 shuffle_rng(config.seed);
  std::mt19937_64 dropout_rng(config.seed + 1);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batches = (data.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches * config.epochs;

  TrainingLog log;
  std::vector<Matrix> best;
  double best_dev = -1.0;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t token_sum = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t lo = b * config.batch_size;
      const std::size_t hi = std::min(data.size(), lo + config.batch_size);
      std::size_t batch_tokens = 0;
      for (std::size_t k = lo; k < hi; ++k) batch_tokens += data[order[k]].sentence.size();
      for (Parameter* p : params) p->zero_grad();
      for (std::size_t k = lo; k < hi; ++k) {
        const Example& ex = data[order[k]];
        const double weight = static_cast<double>(ex.sentence.size()) /
                              static_cast<double>(batch_tokens);
        const Evaluation e = example_loss(model, ex, true, true, &dropout_rng, weight);
        if (!std::isfinite(e.value)) {
          throw TrainingDiverged("loss became non-finite at epoch " + std::to_string(epoch) +
                                 ", step " + std::to_string(step) + "; lower the learning rate " +
                                 "(currently " + format_double(config.learning_rate) + ")");
        }
        loss_sum += e.value * static_cast<double>(ex.sentence.size());
        token_sum += ex.sentence.size();
      }

      const double lr = scheduled_learning_rate(config, step, total_steps);
      ++step;
      const double t = static_cast<double>(step);
      const double c1 = 1.0 - std::pow(config.beta1, t);
      const double c2 = 1.0 - std::pow(config.beta2, t);
      for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Parameter& p = *params[pi];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
          const double g = p.grad[i];
          m1[pi][i] = config.beta1 * m1[pi][i] + (1.0 - config.beta1) * g;
          m2[pi][i] = config.beta2 * m2[pi][i] + (1.0 - config.beta2) * g * g;
          p.value[i] -= lr * (m1[pi][i] / c1) / (std::sqrt(m2[pi][i] / c2) + config.adam_eps);
        }
      }
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.loss = loss_sum / static_cast<double>(token_sum);
    entry.train_accuracy = accuracy(model, data);
    if (dev != nullptr && !dev->empty()) {
      entry.dev_accuracy = accuracy(model, *dev);
      if (*entry.dev_accuracy > best_dev) {
        best_dev = *entry.dev_accuracy;
        log.selected_epoch = epoch;
        best.clear();
        for (Parameter* p : params) best.push_back(p->value);
      }
    } else {
      log.selected_epoch = epoch;
    }
    log.epochs.push_back(entry);
    if (on_epoch) on_epoch(entry);
  }
  if (!best.empty()) {
    for (std::size_t pi = 0; pi < params.size(); ++pi) params[pi]->value = best[pi];
  }
  return log;
}

// ---- checkpoints ----

namespace {

constexpr const char* kCheckpointHeader = "nestccg-model v1";

void write_parameter(std::ostream& out, const Parameter& p) {
  out << p.name << ' ' << p.value.rows() << ' ' << p.value.cols() << '\n';
  for (std::size_t r = 0; r < p.value.rows(); ++r) {
    for (std::size_t c = 0; c < p.value.cols(); ++c) {
      out << (c ? " " : "") << format_double(p.value(r, c));
    }
    out << '\n';
  }
}

class CheckpointReader {
 public:
  explicit CheckpointReader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) throw FormatError("checkpoint truncated", lineno_ + 1);
    ++lineno_;
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  void expect(const std::string& want) {
    const std::string got = line();
    if (got != want) throw FormatError("expected '" + want + "', found '" + got + "'", lineno_);
  }

  std::size_t lineno() const { return lineno_; }

  void read_parameter(Parameter& p) {
    std::istringstream head(line());
    std::string name;
    std::size_t rows = 0, cols = 0;
    if (!(head >> name >> rows >> cols)) throw FormatError("bad parameter header", lineno_);
    if (name != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      throw FormatError("parameter '" + name + "' " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " does not match expected '" + p.name + "' " +
                            std::to_string(p.value.rows()) + "x" + std::to_string(p.value.cols()),
                        lineno_);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      std::istringstream row(line());
      std::string field;
      for (std::size_t c = 0; c < cols; ++c) {
        if (!(row >> field)) throw FormatError("short parameter row", lineno_);
        try {
          p.value(r, c) = parse_double(field);
        } catch (const std::invalid_argument& e) {
          throw FormatError(e.what(), lineno_);
        }
      }
      if (row >> field) throw FormatError("long parameter row", lineno_);
    }
    p.grad = Matrix(rows, cols);
  }

 private:
  std::istream& in_;
  std::size_t lineno_ = 0;
};

}  // namespace

void write_checkpoint(std::ostream& out, const TaggerModel& model) {
  const ModelOptions& o = model.options_;
  out << kCheckpointHeader << '\n';
  out << "d0=" << o.dim << '\n';
  out << "layers=" << o.layers << '\n';
  out << "tagset_size=" << model.tagset_.size() << '\n';
  out << "attention=" << o.attention << '\n';
  out << "graph=" << to_string(o.graph) << '\n';
  out << "in_chunk=" << o.edges.in_chunk << '\n';
  out << "cross_chunk=" << o.edges.cross_chunk << '\n';
  out << "encoder=" << to_string(o.encoder) << '\n';
  out << "dropout=" << format_double(o.dropout) << '\n';
  out << "seed=" << o.seed << '\n';
  out << "vocab_size=" << model.encoder_.words.size() << '\n';
  if (model.lexicon_) {
    out << "lexicon_size=" << model.lexicon_->size() << '\n';
    out << "lexicon_maxlen=" << model.lexicon_->max_len() << '\n';
    out << "lexicon_threshold=" << format_double(model.lexicon_->threshold()) << '\n';
  }
  out << "tags\n";
  for (const auto& t : model.tagset_.tags()) out << t << '\n';
  out << "vocab\n";
  for (const auto& w : model.encoder_.words) out << w << '\n';
  if (model.lexicon_) {
    out << "lexicon\n";
    for (const auto& g : model.lexicon_->ngrams()) {
      for (std::size_t i = 0; i < g.size(); ++i) out << (i ? " " : "") << g[i];
      out << '\n';
    }
  }
  out << "params\n";
  if (model.encoder_.kind == EncoderKind::kLookup) write_parameter(out, model.encoder_.embedding);
  for (const auto& layer : model.layers_) {
    for (const Parameter* p : {&layer.weight, &layer.bias, &layer.w_left, &layer.w_right,
                               &layer.w_self, &layer.ln_gain, &layer.ln_bias}) {
      write_parameter(out, *p);
    }
  }
  write_parameter(out, model.output_);
  out << "end\n";
}

TaggerModel parse_checkpoint(std::istream& in) {
  CheckpointReader reader(in);
  reader.expect(kCheckpointHeader);
  std::unordered_map<std::string, std::string> kv;
  for (std::string s = reader.line(); s != "tags"; s = reader.line()) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw FormatError("expected key=value", reader.lineno());
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("checkpoint lacks '" + key + "'");
    return it->second;
  };
  auto get_size = [&](const std::string& key) {
    return static_cast<std::size_t>(std::stoull(get(key)));
  };

  TaggerModel model;
  ModelOptions& o = model.options_;
  o.dim = get_size("d0");
  o.layers = get_size("layers");
  o.attention = get("attention") == "1";
  o.graph = parse_graph_mode(get("graph"));
  o.edges.in_chunk = get("in_chunk") == "1";
  o.edges.cross_chunk = get("cross_chunk") == "1";
  o.encoder = parse_encoder_kind(get("encoder"));
  o.dropout = parse_double(get("dropout"));
  o.seed = std::stoull(get("seed"));

  const std::size_t tagset_size = get_size("tagset_size");
  if (tagset_size == 0) throw FormatError("empty tag set");
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < tagset_size; ++i) tags.push_back(reader.line());
  if (tags.back() != TagSet::kOther) throw FormatError("tag list must end with OTHER");
  tags.pop_back();
  model.tagset_ = TagSet(std::move(tags));

  reader.expect("vocab");
  const std::size_t vocab_size = get_size("vocab_size");
  std::vector<std::string> words;
  for (std::size_t i = 0; i < vocab_size; ++i) words.push_back(reader.line());

  if (kv.count("lexicon_size")) {
    reader.expect("lexicon");
    PMILexicon lex(get_size("lexicon_maxlen"), parse_double(get("lexicon_threshold")));
    const std::size_t n = get_size("lexicon_size");
    for (std::size_t i = 0; i < n; ++i) {
      std::istringstream ss(reader.line());
      Ngram g;
      std::string tok;
      while (ss >> tok) g.push_back(tok);
      lex.insert(std::move(g));
    }
    model.lexicon_ = std::move(lex);
  }

  model.encoder_.kind = o.encoder;
  model.encoder_.dim = o.dim;
  if (o.encoder == EncoderKind::kLookup) {
    if (words.empty() || words.front() != Encoder::kUnknownWord) {
      throw FormatError("vocabulary must start with the unknown-word entry");
    }
    words.erase(words.begin());
    model.encoder_.set_vocabulary(std::move(words));
    model.encoder_.embedding = Parameter("embedding", Matrix(model.encoder_.words.size(), o.dim));
  }
  for (std::size_t l = 0; l < o.layers; ++l) {
    model.layers_.emplace_back(o.dim, "layer" + std::to_string(l));
  }
  model.output_ = Parameter("output", Matrix(model.tagset_.size(), o.dim));

  reader.expect("params");
  for (Parameter* p : model.parameters()) reader.read_parameter(*p);
  reader.expect("end");
  return model;
}

void save_checkpoint(const std::string& path, const TaggerModel& model) {
  write_file_atomic(path, [&](std::ostream& out) { write_checkpoint(out, model); });
}

TaggerModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
  try {
    return parse_checkpoint(in);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace nestccg
