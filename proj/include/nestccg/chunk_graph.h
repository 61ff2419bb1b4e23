#ifndef NESTCCG_CHUNK_GRAPH_H_
#define NESTCCG_CHUNK_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nestccg/corpus.h"
#include "nestccg/lexicon.h"
#include "nestccg/tensor.h"

namespace nestccg {

// Inclusive token range [first, last].
struct Span {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t length() const { return last - first + 1; }
  auto operator<=>(const Span&) const = default;
};

// Disjoint, sorted spans covering 0..n-1 without gaps.
struct ChunkPartition {
  std::vector<Span> chunks;

  bool valid_for(std::size_t n) const;
  // Index of the chunk containing token i.
  std::vector<std::size_t> chunk_of_token(std::size_t n) const;
};

enum class GraphMode { kChunk, kFull, kNone };

struct EdgeTypes {
  bool in_chunk = true;
  bool cross_chunk = true;
};

enum class EdgeKind { kInChunk, kCrossChunk, kFull };

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  EdgeKind kind = EdgeKind::kInChunk;

  auto operator<=>(const Edge&) const = default;
};

// Symmetric 0/1 matrix with unit diagonal.
class AdjacencyMatrix {
 public:
  // Identity of size n.
  explicit AdjacencyMatrix(std::size_t n = 0);

  std::size_t size() const { return n_; }
  bool operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j] != 0; }
  // Sets a[i][j] and a[j][i].
  void connect(std::size_t i, std::size_t j);
  std::size_t degree(std::size_t i) const;

  Matrix to_matrix() const;
  bool operator==(const AdjacencyMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<std::uint8_t> a_;
};

// Every [i, j] whose tokens form a lexicon entry, ordered by (first, last).
std::vector<Span> match_ngrams(const Sentence& sentence, const PMILexicon& lexicon);

// Merges transitively overlapping spans; uncovered tokens become singletons.
ChunkPartition merge_chunks(std::vector<Span> spans, std::size_t n);

ChunkPartition chunk_sentence(const Sentence& sentence, const PMILexicon& lexicon);

// Off-diagonal edges (i < j) the graph contains, each with its provenance.
// An edge that could arise twice keeps one entry.
std::vector<Edge> graph_edges(const ChunkPartition& partition, std::size_t n, GraphMode mode,
                              EdgeTypes types);

AdjacencyMatrix build_adjacency(const ChunkPartition& partition, std::size_t n, GraphMode mode,
                                EdgeTypes types);

std::string to_string(GraphMode mode);
GraphMode parse_graph_mode(const std::string& s);
std::string to_string(EdgeKind kind);

// "[all students] [are required to] ..."
std::string format_partition(const Sentence& sentence, const ChunkPartition& partition);

}  // namespace nestccg

#endif  // NESTCCG_CHUNK_GRAPH_H_
