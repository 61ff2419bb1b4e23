#include "nestccg/chunk_graph.h"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace nestccg {

bool ChunkPartition::valid_for(std::size_t n) const {
  std::size_t next = 0;
  for (const Span& s : chunks) {
    if (s.first != next || s.last < s.first || s.last >= n) return false;
    next = s.last + 1;
  }
  return next == n;
}

std::vector<std::size_t> ChunkPartition::chunk_of_token(std::size_t n) const {
  std::vector<std::size_t> owner(n, 0);
  for (std::size_t c = 0; c < chunks.size(); ++c)
    for (std::size_t i = chunks[c].first; i <= chunks[c].last && i < n; ++i) owner[i] = c;
  return owner;
}

AdjacencyMatrix::AdjacencyMatrix(std::size_t n) : n_(n), a_(n * n, 0) {
  for (std::size_t i = 0; i < n; ++i) a_[i * n + i] = 1;
}

void AdjacencyMatrix::connect(std::size_t i, std::size_t j) {
  if (i >= n_ || j >= n_) throw std::out_of_range("AdjacencyMatrix::connect");
  a_[i * n_ + j] = 1;
  a_[j * n_ + i] = 1;
}

std::size_t AdjacencyMatrix::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < n_; ++j) d += a_[i * n_ + j];
  return d;
}

Matrix AdjacencyMatrix::to_matrix() const {
  Matrix m(n_, n_);
  for (std::size_t k = 0; k < a_.size(); ++k) m[k] = a_[k];
  return m;
}

std::vector<Span> match_ngrams(const Sentence& sentence, const PMILexicon& lexicon) {
  const auto& t = sentence.tokens;
  std::vector<Span> spans;
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t k = 1; k <= lexicon.max_len() && i + k <= t.size(); ++k) {
      if (lexicon.contains(t.begin() + i, t.begin() + i + k)) spans.push_back({i, i + k - 1});
    }
  }
  return spans;
}

ChunkPartition merge_chunks(std::vector<Span> spans, std::size_t n) {
  for (const Span& s : spans) {
    if (s.last < s.first || s.last >= n) throw std::out_of_range("merge_chunks: span outside sentence");
  }
  std::sort(spans.begin(), spans.end());
  ChunkPartition out;
  std::size_t next = 0;  // first token not yet assigned
  auto fill_to = [&](std::size_t end) {
    for (; next < end; ++next) out.chunks.push_back({next, next});
  };
  for (std::size_t k = 0; k < spans.size();) {
    Span merged = spans[k++];
    while (k < spans.size() && spans[k].first <= merged.last) {
      merged.last = std::max(merged.last, spans[k++].last);
    }
    fill_to(merged.first);
    out.chunks.push_back(merged);
    next = merged.last + 1;
  }
  fill_to(n);
  return out;
}

ChunkPartition chunk_sentence(const Sentence& sentence, const PMILexicon& lexicon) {
  return merge_chunks(match_ngrams(sentence, lexicon), sentence.size());
}

std::vector<Edge> graph_edges(const ChunkPartition& partition, std::size_t n, GraphMode mode,
                              EdgeTypes types) {
  std::set<Edge> edges;
  auto add = [&](std::size_t a, std::size_t b, EdgeKind kind) {
    if (a == b) return;
    edges.insert({std::min(a, b), std::max(a, b), kind});
  };
  switch (mode) {
    case GraphMode::kNone:
      break;
    case GraphMode::kFull:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) add(i, j, EdgeKind::kFull);
      break;
    case GraphMode::kChunk: {
      if (!partition.valid_for(n)) throw std::invalid_argument("graph_edges: invalid partition");
      const auto& ch = partition.chunks;
      for (std::size_t c = 0; c < ch.size(); ++c) {
        if (types.in_chunk) {
          for (std::size_t i = ch[c].first; i < ch[c].last; ++i) add(i, i + 1, EdgeKind::kInChunk);
        }
        if (types.cross_chunk && c + 1 < ch.size()) {
          for (std::size_t a : {ch[c].first, ch[c].last})
            for (std::size_t b : {ch[c + 1].first, ch[c + 1].last}) add(a, b, EdgeKind::kCrossChunk);
        }
      }
      break;
    }
  }
  return {edges.begin(), edges.end()};
}

AdjacencyMatrix build_adjacency(const ChunkPartition& partition, std::size_t n, GraphMode mode,
                                EdgeTypes types) {
  AdjacencyMatrix a(n);
  for (const Edge& e : graph_edges(partition, n, mode, types)) a.connect(e.i, e.j);
  return a;
}

std::string to_string(GraphMode mode) {
  switch (mode) {
    case GraphMode::kChunk: return "chunk";
    case GraphMode::kFull: return "full";
    case GraphMode::kNone: return "none";
  }
  return "?";
}

GraphMode parse_graph_mode(const std::string& s) {
  if (s == "chunk") return GraphMode::kChunk;
  if (s == "full") return GraphMode::kFull;
  if (s == "none") return GraphMode::kNone;
  throw std::invalid_argument("unknown graph mode '" + s + "' (expected chunk, full or none)");
}

std::string to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kInChunk: return "in";
    case EdgeKind::kCrossChunk: return "cross";
    case EdgeKind::kFull: return "full";
  }
  return "?";
}

std::string format_partition(const Sentence& sentence, const ChunkPartition& partition) {
  std::string out;
  for (const Span& s : partition.chunks) {
    if (!out.empty()) out += ' ';
    out += '[';
    for (std::size_t i = s.first; i <= s.last; ++i) {
      if (i != s.first) out += ' ';
      out += sentence.tokens.at(i);
    }
    out += ']';
  }
  return out;
}

}  // namespace nestccg
