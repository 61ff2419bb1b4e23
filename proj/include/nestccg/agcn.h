#ifndef NESTCCG_AGCN_H_
#define NESTCCG_AGCN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "nestccg/chunk_graph.h"
#include "nestccg/corpus.h"
#include "nestccg/lexicon.h"
#include "nestccg/tensor.h"

namespace nestccg {

enum class EncoderKind { kLookup, kPrecomputed };

std::string to_string(EncoderKind kind);
EncoderKind parse_encoder_kind(const std::string& s);

// Produces one d0-vector per token. The lookup kind owns an embedding table
// whose row 0 is reserved for out-of-vocabulary words; the precomputed kind
// passes through externally supplied vectors.
struct Encoder {
  static constexpr const char* kUnknownWord = "<unk>";

  EncoderKind kind = EncoderKind::kLookup;
  std::size_t dim = 0;
  std::vector<std::string> words;  // index → word; words[0] is kUnknownWord
  std::unordered_map<std::string, std::size_t> index;
  Parameter embedding;

  std::size_t lookup(const std::string& word) const;
  void set_vocabulary(std::vector<std::string> known_words);
};

struct AGCNLayer {
  Parameter weight;   // W, d×d
  Parameter bias;     // b, 1×d
  Parameter w_left;   // positional bilinear forms, d×d each
  Parameter w_right;
  Parameter w_self;
  Parameter ln_gain;  // 1×d
  Parameter ln_bias;  // 1×d

  AGCNLayer() = default;
  AGCNLayer(std::size_t d, const std::string& prefix);
  std::size_t dim() const { return weight.value.rows(); }
  std::vector<Parameter*> parameters();
};

struct ModelOptions {
  EncoderKind encoder = EncoderKind::kLookup;
  std::size_t dim = 64;
  std::size_t layers = 2;
  bool attention = true;
  GraphMode graph = GraphMode::kChunk;
  EdgeTypes edges;
  double dropout = 0.2;
  std::uint64_t seed = 42;
};

class TaggerModel {
 public:
  TaggerModel() = default;
  // Glorot-uniform matrices, zero biases, unit LN gains, all drawn from `seed`.
  TaggerModel(const ModelOptions& options, TagSet tagset,
              std::vector<std::string> vocabulary = {},
              std::optional<PMILexicon> lexicon = std::nullopt);

  const ModelOptions& options() const { return options_; }
  ModelOptions& options() { return options_; }
  const TagSet& tagset() const { return tagset_; }
  const Encoder& encoder() const { return encoder_; }
  Encoder& encoder() { return encoder_; }
  std::vector<AGCNLayer>& layers() { return layers_; }
  const std::vector<AGCNLayer>& layers() const { return layers_; }
  Parameter& output() { return output_; }
  const Parameter& output() const { return output_; }
  const std::optional<PMILexicon>& lexicon() const { return lexicon_; }

  std::size_t dim() const { return options_.dim; }
  std::vector<Parameter*> parameters();
  std::size_t parameter_count() const;

  // Adjacency for `s` under the model's graph mode and edge flags.
  AdjacencyMatrix graph_for(const Sentence& s) const;

 private:
  friend void write_checkpoint(std::ostream&, const TaggerModel&);
  friend TaggerModel parse_checkpoint(std::istream&);

  ModelOptions options_;
  TagSet tagset_;
  Encoder encoder_;
  std::vector<AGCNLayer> layers_;
  Parameter output_;  // W_d, |T|×d
  std::optional<PMILexicon> lexicon_;
};

// Row-stochastic attention over the graph:
// P[i][j] ∝ a_ij · exp(h_i · W_pos · h_j), W_pos ∈ {left (j<i), right (j>i), self}.
Matrix attention_scores(const Matrix& hidden, const AdjacencyMatrix& graph, const AGCNLayer& layer);

// h'_i = ReLU(LN(Σ_j c_ij (W h_j + b))), c = attention_scores or the raw adjacency.
Matrix layer_forward(const Matrix& hidden, const AdjacencyMatrix& graph, const AGCNLayer& layer,
                     bool attention);

// Per-token tag logits, n×|T|. `embeddings` is required for the precomputed
// encoder and ignored otherwise. `rng` drives dropout when train_mode is set.
Matrix model_forward(const TaggerModel& model, const Sentence& sentence,
                     const AdjacencyMatrix& graph, bool train_mode = false,
                     const Matrix* embeddings = nullptr, std::mt19937_64* rng = nullptr);

struct Decoded {
  std::vector<std::size_t> tags;
  Matrix probs;
};

// Row softmax; argmax with ties to the lowest index.
Decoded decode(const Matrix& logits);

struct ScoredTag {
  std::size_t tag = 0;
  double log_prob = 0.0;
};

// Every tag with probability ≥ beam_ratio · max, best first.
std::vector<std::vector<ScoredTag>> kbest_from_probs(const Matrix& probs, double beam_ratio);
std::vector<std::vector<ScoredTag>> predict_kbest(const TaggerModel& model, const Sentence& sentence,
                                                  const AdjacencyMatrix& graph, double beam_ratio,
                                                  const Matrix* embeddings = nullptr);

// One sentence prepared for training or scoring.
struct Example {
  Sentence sentence;
  std::vector<std::size_t> gold;
  AdjacencyMatrix graph;
  Matrix embeddings;  // empty for the lookup encoder
};

std::vector<Example> make_examples(const TaggerModel& model, const std::vector<TaggedSentence>& data,
                                   const EmbeddingTable* embeddings = nullptr);

// Mean token cross-entropy of one example; with `with_gradients`, accumulates
// its gradient (scaled by `grad_scale`) into the model parameters.
Evaluation example_loss(TaggerModel& model, const Example& ex, bool with_gradients,
                        bool train_mode = false, std::mt19937_64* rng = nullptr,
                        double grad_scale = 1.0);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  double warmup_ratio = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> dev_accuracy;
};

struct TrainingLog {
  std::vector<EpochLog> epochs;
  std::size_t selected_epoch = 0;  // 1-based epoch whose parameters were kept
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Learning rate for update `step` (0-based) of `total`: linear warmup, then
// linear decay to zero.
double scheduled_learning_rate(const TrainConfig& config, std::size_t step, std::size_t total);

// Adam on mean per-token cross-entropy. With a dev set, the parameters of the
// epoch with the best dev accuracy are restored at the end.
TrainingLog train(TaggerModel& model, const std::vector<Example>& data, const TrainConfig& config,
                  const std::vector<Example>* dev = nullptr,
                  const std::function<void(const EpochLog&)>& on_epoch = {});

// Token accuracy in eval mode; OTHER predictions count as errors.
double accuracy(const TaggerModel& model, const std::vector<Example>& data);

void write_checkpoint(std::ostream& out, const TaggerModel& model);
TaggerModel parse_checkpoint(std::istream& in);
void save_checkpoint(const std::string& path, const TaggerModel& model);
TaggerModel load_checkpoint(const std::string& path);

}  // namespace nestccg

#endif  // NESTCCG_AGCN_H_
